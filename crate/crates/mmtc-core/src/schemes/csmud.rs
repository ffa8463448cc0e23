//! Compressed-sensing multi-user detection for one-shot grant-free access.
//!
//! Active users pick a PN spreading sequence and transmit pilot and data in
//! the same TTI. The base station detects activity and channels jointly with
//! GOMP on the pilot observation.

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, Outcome};
use crate::capture::db_to_linear;
use crate::error::SimError;
use crate::rng::{stream, SimRng, Stream};
use crate::sim::DeviceId;
use crate::sparse::{complex_normal, default_epsilon, gomp, pn_matrix, CMatrix, CVector, GompOptions, SpreadingConfig, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CsmudParams {
    pub spreading: SpreadingConfig,
    pub snr_db: f64,
    /// Largest accepted relative channel error `|h_hat - h| / |h|`.
    pub channel_tolerance: f64,
}

impl Default for CsmudParams {
    fn default() -> Self {
        CsmudParams { spreading: SpreadingConfig::default(), snr_db: 10.0, channel_tolerance: 0.3 }
    }
}

impl CsmudParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.spreading.validate().map_err(|e| SimError::Scheme(alloc::format!("{e}")))?;
        if !(self.channel_tolerance > 0.0) {
            return Err(SimError::Scheme("channel_tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn noise_sigma(&self) -> f64 {
        libm::sqrt(1.0 / (self.spreading.spreading_length as f64 * db_to_linear(self.snr_db)))
    }
}

pub struct Csmud {
    params: CsmudParams,
    matrix: CMatrix,
    ack_delay: u64,
}

impl Csmud {
    pub fn new(params: &CsmudParams, ctx: &BuildContext) -> Result<Self, SimError> {
        params.validate()?;
        let matrix = pn_matrix(&params.spreading, &mut stream(ctx.seed, Stream::Setup));
        Ok(Csmud { params: params.clone(), matrix, ack_delay: ctx.arq.ack_delay_ttis as u64 })
    }

    /// One TTI with `n` users; `true` for each user received correctly.
    pub fn detect(&self, n: usize, rng: &mut SimRng) -> Vec<bool> {
        let cfg = &self.params.spreading;
        let taps = cfg.channel_taps;
        let tap_scale = 1.0 / libm::sqrt(taps as f64);
        let choice: Vec<usize> = (0..n).map(|_| rng.random_range(0..cfg.n_sequences)).collect();
        let channels: Vec<Vec<C64>> = (0..n).map(|_| (0..taps).map(|_| complex_normal(rng) * tap_scale).collect()).collect();
        let mut h = CVector::zeros(self.matrix.ncols());
        let mut load = alloc::vec![0u32; cfg.n_sequences];
        for (u, &s) in choice.iter().enumerate() {
            load[s] += 1;
            for t in 0..taps {
                h[s * taps + t] += channels[u][t];
            }
        }
        let sigma = self.params.noise_sigma();
        let m = cfg.spreading_length;
        let noise = CVector::from_fn(m, |_, _| complex_normal(rng) * sigma);
        let y = &self.matrix * &h + noise;
        let opts = GompOptions { max_groups: m, residual_threshold: default_epsilon(sigma, m) };
        let est = gomp(&self.matrix, &y, taps, opts).expect("dimensions are consistent");
        choice
            .iter()
            .zip(&channels)
            .map(|(&s, hu)| {
                if load[s] != 1 || est.active_set.binary_search(&s).is_err() {
                    return false;
                }
                let (mut err, mut norm) = (0.0, 0.0);
                for t in 0..taps {
                    err += (est.estimate[s * taps + t] - hu[t]).norm_sqr();
                    norm += hu[t].norm_sqr();
                }
                err <= self.params.channel_tolerance * self.params.channel_tolerance * norm
            })
            .collect()
    }
}

impl AccessScheme for Csmud {
    fn name(&self) -> &'static str {
        "csmud"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        if starting.is_empty() {
            return;
        }
        let ok = self.detect(starting.len(), rng);
        for (&device, ok) in starting.iter().zip(ok) {
            out.push(if ok {
                Outcome::Success { device, tx_tti: now }
            } else {
                Outcome::Failure { device, feedback_tti: now + self.ack_delay }
            });
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.params.spreading.n_sequences as u32
    }
}
