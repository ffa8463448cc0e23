use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::config::{ArqConfig, TrafficConfig};
use super::trace::{Device, DeviceId, DeviceState, SimTrace, TtiRecord};
use super::SimClock;
use crate::error::SimError;
use crate::rng::{stream, SimRng, Stream};
use crate::schemes::{self, AccessScheme, BuildContext, Outcome, SchemeConfig};

/// One simulation point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub traffic: TrafficConfig,
    #[serde(default)]
    pub arq: ArqConfig,
    #[serde(default = "default_horizon")]
    pub horizon_ttis: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_horizon() -> u64 {
    10_000
}

impl ScenarioConfig {
    pub fn new(scheme: SchemeConfig, arrival_rate: f64) -> Self {
        ScenarioConfig {
            scheme,
            traffic: TrafficConfig::with_rate(arrival_rate),
            arq: ArqConfig::default(),
            horizon_ttis: default_horizon(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.traffic.validate()?;
        self.arq.validate()?;
        if self.horizon_ttis == 0 {
            return Err(SimError::EmptyHorizon);
        }
        self.scheme.validate()
    }
}

/// Per-TTI Poisson arrival counts.
pub fn generate_arrivals<R: Rng + ?Sized>(
    rng: &mut R,
    traffic: &TrafficConfig,
    n_ttis: usize,
) -> Result<Vec<u32>, SimError> {
    traffic.validate()?;
    if n_ttis == 0 {
        return Err(SimError::EmptyHorizon);
    }
    if traffic.arrival_rate == 0.0 {
        return Ok(alloc::vec![0; n_ttis]);
    }
    let poisson = Poisson::new(traffic.arrival_rate).map_err(|_| SimError::NegativeRate(traffic.arrival_rate))?;
    Ok((0..n_ttis).map(|_| poisson.sample(rng) as u32).collect())
}

/// What happens to a device after a NACK.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backoff {
    RetryAt(u64),
    /// That NACK was final.
    Drop,
}

/// Backoff after the NACK for a transmission in `nacked_tti`: earliest retry
/// is `nacked_tti + ack_delay + 1`, delayed by a uniform window draw.
pub fn apply_backoff<R: Rng + ?Sized>(device: &Device, rng: &mut R, arq: &ArqConfig, nacked_tti: u64) -> Backoff {
    retry_after_feedback(device, rng, arq, nacked_tti + arq.ack_delay_ttis as u64)
}

fn retry_after_feedback<R: Rng + ?Sized>(device: &Device, rng: &mut R, arq: &ArqConfig, feedback_tti: u64) -> Backoff {
    if device.attempts_used >= arq.max_transmissions() {
        return Backoff::Drop;
    }
    let draw = rng.random_range(arq.backoff_min..=arq.backoff_max) as u64;
    Backoff::RetryAt(feedback_tti + 1 + draw)
}

/// Builds the configured scheme and runs it.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimTrace, SimError> {
    config.validate()?;
    let ctx = BuildContext { traffic: config.traffic, arq: config.arq, seed: config.seed };
    let mut scheme = schemes::build(&config.scheme, &ctx)?;
    run_with_scheme(scheme.as_mut(), &config.traffic, &config.arq, config.horizon_ttis, config.seed)
}

enum Event {
    Success(DeviceId),
    Failure(DeviceId),
}

/// Runs `scheme` for `horizon` TTIs.
///
/// Each TTI: new arrivals become backlogged, due devices are handed to the
/// scheme, and outcomes falling due this TTI are applied. Schemes may report
/// outcomes for later TTIs (grants, frames); those take effect when the clock
/// reaches them, and are dropped unapplied past the horizon.
///
/// Panics if the scheme breaks the interface contract (duplicate or
/// unsolicited outcomes, feedback before the ACK delay).
pub fn run_with_scheme(
    scheme: &mut dyn AccessScheme,
    traffic: &TrafficConfig,
    arq: &ArqConfig,
    horizon: u64,
    seed: u64,
) -> Result<SimTrace, SimError> {
    traffic.validate()?;
    arq.validate()?;
    let arrivals = generate_arrivals(&mut stream(seed, Stream::Arrivals), traffic, horizon as usize)?;
    let mut backoff_rng = stream(seed, Stream::Backoff);
    let mut scheme_rng: SimRng = stream(seed, Stream::Scheme);
    let mut devices: Vec<Device> = Vec::with_capacity(arrivals.iter().map(|&a| a as usize).sum());
    let mut attempt_start: Vec<u64> = Vec::new();
    let mut due: BTreeMap<u64, Vec<DeviceId>> = BTreeMap::new();
    let mut events: BTreeMap<u64, Vec<Event>> = BTreeMap::new();
    let mut records = alloc::vec![TtiRecord::default(); horizon as usize];
    let mut outcomes = Vec::new();
    let mut clock = SimClock::default();
    let ack = arq.ack_delay_ttis as u64;

    while clock.now() < horizon {
        let now = clock.now();
        let rec = &mut records[now as usize];
        rec.arrivals = arrivals[now as usize];
        for _ in 0..rec.arrivals {
            let id = DeviceId(devices.len() as u32);
            devices.push(Device::new(id, now));
            attempt_start.push(now);
            due.entry(now).or_default().push(id);
        }
        let starting = due.remove(&now).unwrap_or_default();
        for &id in &starting {
            let d = &mut devices[id.0 as usize];
            debug_assert_eq!(d.state, DeviceState::Backlogged);
            d.state = DeviceState::AwaitingFeedback;
            d.attempts_used += 1;
            attempt_start[id.0 as usize] = now;
        }
        rec.attempts = starting.len() as u32;

        outcomes.clear();
        scheme.on_tti(now, &starting, &mut scheme_rng, &mut outcomes);
        for o in outcomes.drain(..) {
            let (tti, ev) = match o {
                Outcome::Success { device, tx_tti } => (tx_tti, Event::Success(device)),
                Outcome::Failure { device, feedback_tti } => {
                    let start = attempt_start[device.0 as usize];
                    assert!(
                        feedback_tti >= start + ack,
                        "scheme `{}` sent feedback at {feedback_tti} for a transmission started at {start}",
                        scheme.name()
                    );
                    (feedback_tti, Event::Failure(device))
                }
            };
            assert!(tti >= now, "scheme `{}` reported an outcome in the past", scheme.name());
            events.entry(tti).or_default().push(ev);
        }

        if let Some(evs) = events.remove(&now) {
            for ev in evs {
                match ev {
                    Event::Success(id) => {
                        let d = &mut devices[id.0 as usize];
                        assert_eq!(d.state, DeviceState::AwaitingFeedback, "second outcome for {id:?}");
                        d.state = DeviceState::Succeeded;
                        d.completion_tti = Some(now + 1);
                        records[now as usize].successes += 1;
                    }
                    Event::Failure(id) => {
                        let d = &mut devices[id.0 as usize];
                        assert_eq!(d.state, DeviceState::AwaitingFeedback, "second outcome for {id:?}");
                        records[now as usize].failures += 1;
                        match retry_after_feedback(d, &mut backoff_rng, arq, now) {
                            Backoff::Drop => d.state = DeviceState::Dropped,
                            Backoff::RetryAt(t) => {
                                d.state = DeviceState::Backlogged;
                                due.entry(t).or_default().push(id);
                            }
                        }
                    }
                }
            }
        }
        clock.step();
    }
    Ok(SimTrace { ttis: records, devices, waiting_offset_ms: traffic.mean_waiting_time_ms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_is_all_zero() {
        let mut rng = stream(1, Stream::Arrivals);
        assert_eq!(generate_arrivals(&mut rng, &TrafficConfig::with_rate(0.0), 100).unwrap(), [0; 100]);
    }

    #[test]
    fn negative_rate_rejected() {
        let mut rng = stream(1, Stream::Arrivals);
        assert!(generate_arrivals(&mut rng, &TrafficConfig::with_rate(-1.0), 10).is_err());
    }

    #[test]
    fn nack_for_tti_7_retries_at_11() {
        let mut rng = stream(1, Stream::Backoff);
        let arq = ArqConfig { backoff_max: 0, ..ArqConfig::default() };
        let mut d = Device::new(DeviceId(0), 7);
        d.attempts_used = 1;
        assert_eq!(apply_backoff(&d, &mut rng, &arq, 7), Backoff::RetryAt(11));
        d.attempts_used = 4;
        assert_eq!(apply_backoff(&d, &mut rng, &arq, 7), Backoff::Drop);
    }
}
