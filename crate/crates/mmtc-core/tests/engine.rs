use mmtc_core::schemes::SchemeConfig;
use mmtc_core::sim::{run_scenario, summarize, ArqConfig, DeviceState, ScenarioConfig, SimTrace};
use proptest::prelude::*;

fn scenario(name: &str, lambda: f64, seed: u64, horizon: u64, arq: ArqConfig) -> ScenarioConfig {
    let mut sc = ScenarioConfig::new(SchemeConfig::default_for(name).unwrap(), lambda);
    sc.seed = seed;
    sc.horizon_ttis = horizon;
    sc.arq = arq;
    sc
}

fn conserved(trace: &SimTrace) -> bool {
    let arrivals = trace.total_arrivals();
    let succeeded = trace.devices.iter().filter(|d| d.state == DeviceState::Succeeded).count() as u64;
    let dropped = trace.devices.iter().filter(|d| d.state == DeviceState::Dropped).count() as u64;
    arrivals == trace.devices.len() as u64
        && succeeded == trace.total_successes()
        && dropped == trace.total_drops()
        && arrivals == succeeded + dropped + trace.total_pending()
}

const CHEAP: &[&str] = &["slotted-aloha", "notaft", "one-stage", "two-stage", "lte-multistage", "sbaia", "craplnc"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn devices_are_conserved(scheme in prop::sample::select(CHEAP), lambda in 0.0f64..60.0, seed in 0u64..1000, fresh: bool) {
        let arq = if fresh { ArqConfig::fresh_arrivals() } else { ArqConfig::default() };
        let trace = run_scenario(&scenario(scheme, lambda, seed, 300, arq)).unwrap();
        prop_assert!(conserved(&trace));
        for d in &trace.devices {
            prop_assert!(d.attempts_used <= arq.max_transmissions());
            if d.state == DeviceState::Succeeded {
                prop_assert!(d.completion_tti.unwrap() > d.arrival_tti);
            }
        }
    }

    #[test]
    fn runs_are_deterministic(scheme in prop::sample::select(CHEAP), lambda in 1.0f64..40.0, seed in 0u64..1000) {
        let sc = scenario(scheme, lambda, seed, 200, ArqConfig::default());
        prop_assert_eq!(run_scenario(&sc).unwrap(), run_scenario(&sc).unwrap());
    }

    #[test]
    fn retry_latency_floor(lambda in 5.0f64..80.0, seed in 0u64..1000, bmin in 0u32..4, extra in 0u32..6) {
        // n transmissions cost at least 1 + (n - 1) * (ack + 1 + backoff_min) TTIs.
        let arq = ArqConfig { backoff_min: bmin, backoff_max: bmin + extra, ..ArqConfig::default() };
        let trace = run_scenario(&scenario("slotted-aloha", lambda, seed, 300, arq)).unwrap();
        let step = (arq.ack_delay_ttis + 1 + arq.backoff_min) as u64;
        for d in trace.devices.iter().filter(|d| d.state == DeviceState::Succeeded) {
            prop_assert!(d.latency_ttis().unwrap() >= 1 + (d.attempts_used as u64 - 1) * step);
        }
    }
}

#[test]
fn one_stage_minimum_latency_is_one_and_a_half_ms() {
    let trace = run_scenario(&scenario("slotted-aloha", 0.5, 3, 2000, ArqConfig::default())).unwrap();
    let min = mmtc_core::sim::latencies_ms(&trace).iter().map(|l| l.1).fold(f64::MAX, f64::min);
    assert_eq!(min, 1.5);
}

#[test]
fn two_stage_minimum_latency() {
    // Request at i, grant at i + 3, data at i + 4, done at i + 5.
    let trace = run_scenario(&scenario("two-stage", 0.5, 3, 2000, ArqConfig::default())).unwrap();
    let min = mmtc_core::sim::latencies_ms(&trace).iter().map(|l| l.1).fold(f64::MAX, f64::min);
    assert_eq!(min, 5.5);
}

#[test]
fn zero_load_is_empty() {
    let trace = run_scenario(&scenario("slotted-aloha", 0.0, 1, 100, ArqConfig::default())).unwrap();
    let m = summarize(&trace, 10);
    assert_eq!(trace.total_arrivals(), 0);
    assert_eq!(m.throughput, 0.0);
    assert_eq!(m.pending, 0);
}

#[test]
fn arrival_stream_is_shared_across_schemes() {
    let a = run_scenario(&scenario("slotted-aloha", 7.0, 42, 500, ArqConfig::default())).unwrap();
    let b = run_scenario(&scenario("two-stage", 7.0, 42, 500, ArqConfig::default())).unwrap();
    let arrivals = |t: &SimTrace| t.ttis.iter().map(|r| r.arrivals).collect::<Vec<_>>();
    assert_eq!(arrivals(&a), arrivals(&b));
}

#[test]
fn every_scheme_conserves_devices() {
    for name in SchemeConfig::NAMES {
        let trace = run_scenario(&scenario(name, 8.0, 5, 120, ArqConfig::default())).unwrap();
        assert!(conserved(&trace), "{name}");
    }
}

#[test]
fn poisson_mean_matches_rate() {
    let trace = run_scenario(&scenario("slotted-aloha", 12.5, 9, 20_000, ArqConfig::fresh_arrivals())).unwrap();
    let mean = trace.total_arrivals() as f64 / 20_000.0;
    // 4 standard errors of a Poisson mean.
    assert!((mean - 12.5).abs() < 4.0 * (12.5f64 / 20_000.0).sqrt(), "{mean}");
}
