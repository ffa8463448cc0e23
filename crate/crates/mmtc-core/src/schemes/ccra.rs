//! Coded random access with a compressive-sensing control channel.
//!
//! Each user picks a preamble; the preamble fixes up to three frequency slots
//! for its data replicas and is spread over a common overloaded control
//! channel. The base station recovers the active preambles with HiHTP and
//! then peels the replica graph.

use alloc::vec::Vec;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::peeling::{peel, FrameGraph};
use super::{AccessScheme, BuildContext, Outcome};
use crate::error::SimError;
use crate::rng::{stream, SimRng, Stream};
use crate::sim::DeviceId;
use crate::sparse::{complex_normal, hihtp_solve, BlockSparsityPattern, CVector, CcraControlChannel, HihtpOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CcraParams {
    /// Frequency slots per TTI.
    pub slots: u32,
    /// Preambles `u`.
    pub preambles: u32,
    /// Channel taps per preamble block `s`.
    pub taps: u32,
    /// Nonzero taps per active user `k_s`.
    pub active_taps: u32,
    pub subcarriers: u32,
    /// Control-channel measurements `m`.
    pub measurements: u32,
    /// Pilot share of the transmit power.
    pub alpha: f64,
    pub snr_db: f64,
    pub replicas: u32,
    /// Upper bound `k_u` on active blocks used by the thresholding operator.
    pub max_active_blocks: u32,
    /// A block is active when its estimated energy exceeds this fraction of
    /// the pilot power.
    pub detect_threshold: f64,
    pub max_iters: u32,
}

impl Default for CcraParams {
    fn default() -> Self {
        CcraParams {
            slots: 50,
            preambles: 256,
            taps: 2,
            active_taps: 1,
            subcarriers: 2048,
            measurements: 192,
            alpha: 0.2,
            snr_db: 15.0,
            replicas: 3,
            max_active_blocks: 40,
            detect_threshold: 0.05,
            max_iters: 30,
        }
    }
}

impl CcraParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Scheme(m.into()));
        if self.replicas == 0 || self.replicas > 3 {
            return bad("replicas must be in 1..=3");
        }
        if self.replicas > self.slots {
            return bad("more replicas than slots");
        }
        if self.active_taps == 0 || self.active_taps > self.taps {
            return bad("need 1 <= active_taps <= taps");
        }
        if self.max_active_blocks == 0 || self.max_active_blocks > self.preambles {
            return bad("need 1 <= max_active_blocks <= preambles");
        }
        if (self.preambles * self.taps) > self.subcarriers || self.measurements > self.subcarriers || self.measurements == 0 {
            return bad("need u*s <= n and 0 < m <= n");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn pattern(&self) -> BlockSparsityPattern {
        BlockSparsityPattern {
            n_blocks: self.preambles as usize,
            block_length: self.taps as usize,
            active_blocks: self.max_active_blocks as usize,
            within_block_sparsity: self.active_taps as usize,
        }
    }
}

pub struct Ccra {
    params: CcraParams,
    patterns: Vec<Vec<usize>>,
    control: CcraControlChannel,
    ack_delay: u64,
}

impl Ccra {
    pub fn new(params: &CcraParams, ctx: &BuildContext) -> Result<Self, SimError> {
        params.validate()?;
        let mut setup = stream(ctx.seed, Stream::Setup);
        let patterns = (0..params.preambles)
            .map(|_| {
                let mut s = sample(&mut setup, params.slots as usize, params.replicas as usize).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        let control = CcraControlChannel::new(
            params.subcarriers as usize,
            params.measurements as usize,
            (params.preambles * params.taps) as usize,
            params.alpha,
            params.snr_db,
            &mut setup,
        )
        .map_err(|e| SimError::Scheme(alloc::format!("{e}")))?;
        Ok(Ccra { params: params.clone(), patterns, control, ack_delay: ctx.arq.ack_delay_ttis as u64 })
    }

    /// Preambles the control channel reports as active for channel vector `h`.
    fn detect_active(&self, h: &CVector, rng: &mut SimRng) -> Vec<bool> {
        let p = &self.params;
        let y = self.control.observe(h, rng);
        let opts = HihtpOptions { max_iters: p.max_iters as usize, step: 1.0 };
        let est = hihtp_solve(&y, &self.control.matrix, &p.pattern(), opts).expect("dimensions checked at build");
        let s = p.taps as usize;
        let threshold = p.detect_threshold * p.alpha;
        (0..p.preambles as usize)
            .map(|b| (0..s).map(|t| est.estimate[b * s + t].norm_sqr()).sum::<f64>() > threshold)
            .collect()
    }
}

impl AccessScheme for Ccra {
    fn name(&self) -> &'static str {
        "ccra"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        if starting.is_empty() {
            return;
        }
        let p = &self.params;
        let s = p.taps as usize;
        let mut h = CVector::zeros((p.preambles * p.taps) as usize);
        let mut chosen = Vec::with_capacity(starting.len());
        for _ in starting {
            let pre = rng.random_range(0..p.preambles) as usize;
            for t in sample(rng, s, p.active_taps as usize) {
                h[pre * s + t] += complex_normal(rng);
            }
            chosen.push(pre);
        }
        let active = self.detect_active(&h, rng);
        let graph = FrameGraph::new(p.slots as usize, chosen.iter().map(|&c| self.patterns[c].clone()).collect());
        let visible: Vec<bool> = chosen.iter().map(|&c| active[c]).collect();
        let resolved = peel(&graph, &visible);
        for (i, &device) in starting.iter().enumerate() {
            out.push(if resolved[i] {
                Outcome::Success { device, tx_tti: now }
            } else {
                Outcome::Failure { device, feedback_tti: now + self.ack_delay }
            });
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.params.slots
    }
}
