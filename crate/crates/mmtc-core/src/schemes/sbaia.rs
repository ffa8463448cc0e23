//! Signature-based access: devices send Bloom-filter signatures over a frame
//! of PRACH occasions; the base station grants every identity whose
//! signature is covered by the observed preamble activity.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::signature::{build_signature, Signature};
use super::{AccessScheme, BuildContext, CapacityLedger, Outcome};
use crate::capture::DetectionModel;
use crate::error::SimError;
use crate::resource::{PlanRef, PreamblePlan, ResourcePlan, SignatureFramePlan};
use crate::rng::SimRng;
use crate::sim::DeviceId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SbaiaParams {
    pub resources: PlanRef<ResourcePlan>,
    pub preambles: PlanRef<PreamblePlan>,
    pub detection: DetectionModel,
    /// Registered identities the base station tests.
    pub universe: u32,
    /// Fixed frame; dimensioned from the arrival rate when absent.
    pub frame: Option<SignatureFramePlan>,
    pub max_hashes: u32,
    /// Detect a signature in the subframe of its last preamble rather than
    /// at the end of the frame.
    pub early_detection: bool,
}

impl Default for SbaiaParams {
    fn default() -> Self {
        SbaiaParams {
            resources: PlanRef::Preset("sbaia-216".into()),
            preambles: PlanRef::Preset("sbaia-216".into()),
            detection: DetectionModel::default(),
            universe: 2048,
            frame: None,
            max_hashes: 32,
            early_detection: true,
        }
    }
}

impl SbaiaParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.resources.resolve()?;
        let p = self.preambles.resolve()?;
        self.detection.validate()?;
        if self.universe == 0 || self.max_hashes == 0 {
            return Err(SimError::Scheme("universe and max_hashes must be positive".into()));
        }
        if let Some(f) = &self.frame {
            f.validate()?;
            if f.preambles_per_prach != p.n_preambles {
                return Err(SimError::Scheme("frame preambles_per_prach differs from the preamble pool".into()));
            }
        }
        Ok(())
    }
}

/// Frame for a known mean arrival rate.
///
/// With `lambda * L` devices per frame and `k` uniform hashes over `L * M`
/// positions, a position is active with probability `1 - exp(-k lambda / M)`
/// and an idle identity passes with that probability to the power `k`. This
/// is smallest at `k = M ln 2 / lambda`, where it equals `2^-k`. One preamble
/// per PRACH on average (`L = k`) then gives the shortest frame reaching
/// that optimum, so the frame shrinks as the load grows.
pub fn dimension_frame(lambda: f64, preambles_per_prach: u32, max_hashes: u32) -> SignatureFramePlan {
    let k = if lambda > 0.0 {
        libm::round(preambles_per_prach as f64 * core::f64::consts::LN_2 / lambda).clamp(1.0, max_hashes as f64) as u32
    } else {
        max_hashes
    };
    SignatureFramePlan { n_subframes: k, preambles_per_prach, hashes_per_signature: k }
}

pub struct Sbaia {
    plan: SignatureFramePlan,
    universe: Vec<Signature>,
    detection: DetectionModel,
    data_prbs: u32,
    early: bool,
    ack_delay: u64,
    free_ids: Vec<u32>,
    held: Vec<(DeviceId, u32)>,
    ledger: CapacityLedger,
    frame_members: Vec<(DeviceId, u32)>,
}

impl Sbaia {
    pub fn new(params: &SbaiaParams, ctx: &BuildContext) -> Result<Self, SimError> {
        let r = params.resources.resolve()?;
        let p = params.preambles.resolve()?;
        let plan = params
            .frame
            .unwrap_or_else(|| dimension_frame(ctx.traffic.arrival_rate, p.n_preambles, params.max_hashes));
        plan.validate()?;
        let universe = (0..params.universe as u64).map(|i| build_signature(&i.to_le_bytes(), &plan)).collect();
        Ok(Sbaia {
            plan,
            universe,
            detection: params.detection,
            data_prbs: r.data_prbs,
            early: params.early_detection,
            ack_delay: ctx.arq.ack_delay_ttis as u64,
            free_ids: (0..params.universe).rev().collect(),
            held: Vec::new(),
            ledger: CapacityLedger::default(),
            frame_members: Vec::new(),
        })
    }

    pub fn frame_plan(&self) -> SignatureFramePlan {
        self.plan
    }

    fn run_frame(&mut self, frame_start: u64, rng: &mut SimRng, out: &mut Vec<Outcome>) {
        let members = core::mem::take(&mut self.frame_members);
        let active: Vec<usize> = members.iter().map(|m| m.1 as usize).collect();
        let res = super::signature::scheme_signature_frame(&active, &self.universe, &self.plan, &self.detection, rng);
        let last = self.plan.n_subframes as u64 - 1;
        let frame_end = frame_start + last;
        let mut owner = alloc::vec![None; self.universe.len()];
        for &(d, id) in &members {
            owner[id as usize] = Some(d);
        }
        let mut granted: Vec<(u64, usize)> = res
            .decoded
            .iter()
            .map(|&id| {
                let sub = if self.early { self.universe[id].last_subframe() as u64 } else { last };
                (frame_start + sub, id)
            })
            .collect();
        granted.sort_unstable();
        let mut served = alloc::vec![false; self.universe.len()];
        for (detect_tti, id) in granted {
            let (tx, _) = self.ledger.book(detect_tti + self.ack_delay + 1, self.data_prbs);
            if let Some(device) = owner[id] {
                served[id] = true;
                out.push(Outcome::Success { device, tx_tti: tx });
            }
        }
        for &(device, id) in &members {
            if !served[id as usize] {
                out.push(Outcome::Failure { device, feedback_tti: frame_end + self.ack_delay });
            }
            self.free_ids.push(id);
        }
    }
}

impl AccessScheme for Sbaia {
    fn name(&self) -> &'static str {
        "sbaia"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        self.ledger.prune(now);
        for &device in starting {
            match self.free_ids.pop() {
                Some(id) => self.held.push((device, id)),
                None => out.push(Outcome::Failure { device, feedback_tti: now + self.ack_delay }),
            }
        }
        let l = self.plan.n_subframes as u64;
        if now % l == 0 {
            // Membership is fixed at the frame start, so the whole frame can
            // be drawn now; every outcome lands at or after its detection.
            self.frame_members = core::mem::take(&mut self.held);
            self.run_frame(now, rng, out);
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.data_prbs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_shrinks_with_load() {
        let mut prev = u32::MAX;
        for lambda in [2.0, 5.0, 10.0, 20.0, 40.0] {
            let f = dimension_frame(lambda, 216, 32);
            assert!(f.n_subframes <= prev);
            prev = f.n_subframes;
        }
        assert_eq!(dimension_frame(10.0, 216, 32).n_subframes, 15);
    }
}
