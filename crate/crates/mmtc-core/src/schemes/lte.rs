//! LTE-style multi-stage random access, reduced to its timing constants:
//! preamble, random access response, contention resolution, then data.

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, CapacityLedger, Outcome};
use crate::capture::DetectionModel;
use crate::error::SimError;
use crate::resource::{PlanRef, PreamblePlan, ResourcePlan};
use crate::rng::SimRng;
use crate::sim::DeviceId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LteParams {
    pub resources: PlanRef<ResourcePlan>,
    pub preambles: PlanRef<PreamblePlan>,
    pub detection: DetectionModel,
    /// Preamble to random access response (a missing response is a failure).
    pub rar_delay_ttis: u32,
    /// Preamble to completed connection setup (contention resolution).
    pub setup_delay_ttis: u32,
}

impl Default for LteParams {
    fn default() -> Self {
        LteParams {
            resources: PlanRef::Preset("lte-54".into()),
            preambles: PlanRef::Preset("lte-54".into()),
            detection: DetectionModel::default(),
            rar_delay_ttis: 10,
            setup_delay_ttis: 40,
        }
    }
}

impl LteParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.resources.resolve()?;
        let p = self.preambles.resolve()?;
        if p.n_preambles == 0 {
            return Err(SimError::Scheme("empty preamble pool".into()));
        }
        self.detection.validate()?;
        if self.rar_delay_ttis == 0 || self.setup_delay_ttis < self.rar_delay_ttis {
            return Err(SimError::Scheme("need 0 < rar_delay_ttis <= setup_delay_ttis".into()));
        }
        Ok(())
    }
}

pub struct LteMultistage {
    n_preambles: u32,
    data_prbs: u32,
    detection: DetectionModel,
    rar: u64,
    setup: u64,
    ledger: CapacityLedger,
}

impl LteMultistage {
    pub fn new(params: &LteParams, ctx: &BuildContext) -> Result<Self, SimError> {
        let r = params.resources.resolve()?;
        let p = params.preambles.resolve()?;
        let ack = ctx.arq.ack_delay_ttis;
        if params.rar_delay_ttis < ack {
            return Err(SimError::Scheme("random access response cannot precede the ACK delay".into()));
        }
        Ok(LteMultistage {
            n_preambles: p.n_preambles,
            data_prbs: r.data_prbs,
            detection: params.detection,
            rar: params.rar_delay_ttis as u64,
            setup: params.setup_delay_ttis as u64,
            ledger: CapacityLedger::default(),
        })
    }
}

impl AccessScheme for LteMultistage {
    fn name(&self) -> &'static str {
        "lte-multistage"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        self.ledger.prune(now);
        let mut senders: Vec<Vec<DeviceId>> = alloc::vec![Vec::new(); self.n_preambles as usize];
        for &device in starting {
            senders[rng.random_range(0..self.n_preambles) as usize].push(device);
        }
        for devices in senders.iter().filter(|d| !d.is_empty()) {
            if !self.detection.detect(devices.len(), rng) {
                for &device in devices {
                    out.push(Outcome::Failure { device, feedback_tti: now + self.rar });
                }
            } else if devices.len() > 1 {
                for &device in devices {
                    out.push(Outcome::Failure { device, feedback_tti: now + self.setup });
                }
            } else {
                let (tx, _) = self.ledger.book(now + self.setup + 1, self.data_prbs);
                out.push(Outcome::Success { device: devices[0], tx_tti: tx });
            }
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.data_prbs
    }
}
