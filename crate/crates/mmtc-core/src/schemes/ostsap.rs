//! One-stage and two-stage access with preamble-based activity detection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, CapacityLedger, Outcome};
use crate::capture::{CaptureModel, DetectionModel};
use crate::error::{PlanError, SimError};
use crate::resource::{PlanRef, PreamblePlan, ResourcePlan};
use crate::rng::SimRng;
use crate::sim::DeviceId;
use rand::Rng;

fn resolve_plans(
    resources: &PlanRef<ResourcePlan>,
    preambles: &PlanRef<PreamblePlan>,
) -> Result<(ResourcePlan, PreamblePlan), SimError> {
    let r = resources.resolve()?;
    let p = preambles.resolve()?;
    if p.over_provisioning.is_none() {
        return Err(PlanError::Invalid("preamble plan needs a fixed mapping (over_provisioning)".into()).into());
    }
    p.validate(r.data_prbs)?;
    Ok((r, p))
}

fn ostsap_resources() -> PlanRef<ResourcePlan> {
    PlanRef::Preset("ostsap-54".into())
}

fn ostsap_preambles() -> PlanRef<PreamblePlan> {
    PlanRef::Preset("ostsap-216".into())
}

fn sud() -> CaptureModel {
    CaptureModel::Sud
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneStageParams {
    #[serde(default = "ostsap_resources")]
    pub resources: PlanRef<ResourcePlan>,
    #[serde(default = "ostsap_preambles")]
    pub preambles: PlanRef<PreamblePlan>,
    #[serde(default = "sud")]
    pub capture: CaptureModel,
}

impl Default for OneStageParams {
    fn default() -> Self {
        OneStageParams { resources: ostsap_resources(), preambles: ostsap_preambles(), capture: sud() }
    }
}

impl OneStageParams {
    pub fn validate(&self) -> Result<(), SimError> {
        resolve_plans(&self.resources, &self.preambles)?;
        self.capture.validate()
    }
}

/// Preamble and data in the same TTI; the preamble fixes the data resource.
pub struct OneStage {
    preambles: PreamblePlan,
    data_prbs: u32,
    capture: CaptureModel,
    ack_delay: u64,
}

impl OneStage {
    pub fn new(params: &OneStageParams, ctx: &BuildContext) -> Result<Self, SimError> {
        let (r, p) = resolve_plans(&params.resources, &params.preambles)?;
        Ok(OneStage {
            preambles: p,
            data_prbs: r.data_prbs,
            capture: params.capture.clone(),
            ack_delay: ctx.arq.ack_delay_ttis as u64,
        })
    }
}

impl AccessScheme for OneStage {
    fn name(&self) -> &'static str {
        "one-stage"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        let mut per_resource: Vec<Vec<(DeviceId, u32)>> = alloc::vec![Vec::new(); self.data_prbs as usize];
        for &device in starting {
            let p = rng.random_range(0..self.preambles.n_preambles);
            let r = self.preambles.data_resource(p).expect("preamble drawn in range");
            per_resource[r as usize].push((device, p));
        }
        for packets in &per_resource {
            resolve_resource(&self.capture, packets, now, self.ack_delay, rng, out);
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.data_prbs * self.capture_capacity()
    }
}

impl OneStage {
    fn capture_capacity(&self) -> u32 {
        match &self.capture {
            CaptureModel::Mud { k } => *k,
            CaptureModel::Table { p } => p.len().max(1) as u32,
            CaptureModel::Sud => 1,
        }
    }
}

/// Applies the capture model to the packets sharing one resource. Packets are
/// `(device, request key)`; equal keys mean the same preamble.
fn resolve_resource(
    capture: &CaptureModel,
    packets: &[(DeviceId, u32)],
    now: u64,
    ack_delay: u64,
    rng: &mut SimRng,
    out: &mut Vec<Outcome>,
) {
    if packets.is_empty() {
        return;
    }
    let mut keys: Vec<u32> = packets.iter().map(|p| p.1).collect();
    keys.sort_unstable();
    let distinct = keys.windows(2).all(|w| w[0] != w[1]);
    let decoded = capture.resolve(packets.len(), distinct, rng);
    for (i, &(device, _)) in packets.iter().enumerate() {
        out.push(if decoded.contains(&i) {
            Outcome::Success { device, tx_tti: now }
        } else {
            Outcome::Failure { device, feedback_tti: now + ack_delay }
        });
    }
}

/// Downlink feedback after preamble detection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feedback {
    /// One bit per preamble; the fixed mapping decides the resource, the
    /// lowest detected preamble(s) of each block win.
    Bitmap,
    /// Detected requests are spread round-robin over the data resources;
    /// under MUD a resource is shared only once every resource is taken.
    #[default]
    ResourceIndex,
    /// As `ResourceIndex`, and surplus requests move to later TTIs.
    ResourceIndexQueue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoStageParams {
    #[serde(default = "ostsap_resources")]
    pub resources: PlanRef<ResourcePlan>,
    #[serde(default = "ostsap_preambles")]
    pub preambles: PlanRef<PreamblePlan>,
    #[serde(default = "sud")]
    pub capture: CaptureModel,
    #[serde(default)]
    pub feedback: Feedback,
    #[serde(default = "ideal")]
    pub detection: DetectionModel,
}

fn ideal() -> DetectionModel {
    DetectionModel::IDEAL
}

impl Default for TwoStageParams {
    fn default() -> Self {
        TwoStageParams {
            resources: ostsap_resources(),
            preambles: ostsap_preambles(),
            capture: sud(),
            feedback: Feedback::default(),
            detection: ideal(),
        }
    }
}

impl TwoStageParams {
    pub fn validate(&self) -> Result<(), SimError> {
        resolve_plans(&self.resources, &self.preambles)?;
        self.capture.validate()?;
        self.detection.validate()
    }
}

/// Service request, grant at `+ack_delay`, data one TTI later.
pub struct TwoStage {
    preambles: PreamblePlan,
    data_prbs: u32,
    capture: CaptureModel,
    feedback: Feedback,
    detection: DetectionModel,
    ack_delay: u64,
    /// data TTI -> resource -> packets `(device, request key)`.
    scheduled: BTreeMap<u64, BTreeMap<u32, Vec<(DeviceId, u32)>>>,
    ledger: CapacityLedger,
    request_counter: u32,
}

impl TwoStage {
    pub fn new(params: &TwoStageParams, ctx: &BuildContext) -> Result<Self, SimError> {
        let (r, p) = resolve_plans(&params.resources, &params.preambles)?;
        Ok(TwoStage {
            preambles: p,
            data_prbs: r.data_prbs,
            capture: params.capture.clone(),
            feedback: params.feedback,
            detection: params.detection,
            ack_delay: ctx.arq.ack_delay_ttis as u64,
            scheduled: BTreeMap::new(),
            ledger: CapacityLedger::default(),
            request_counter: 0,
        })
    }

    fn per_resource(&self) -> u32 {
        self.capture.grants_per_resource()
    }

    /// Largest number of grants placed on one data resource in any TTI
    /// still scheduled.
    pub fn max_grants_per_resource(&self) -> usize {
        self.scheduled
            .values()
            .flat_map(|m| m.values())
            .map(|packets| {
                let mut keys: Vec<u32> = packets.iter().map(|p| p.1).collect();
                keys.sort_unstable();
                keys.dedup();
                keys.len()
            })
            .max()
            .unwrap_or(0)
    }
}

impl AccessScheme for TwoStage {
    fn name(&self) -> &'static str {
        "two-stage"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        if let Some(resources) = self.scheduled.remove(&now) {
            for packets in resources.values() {
                resolve_resource(&self.capture, packets, now, self.ack_delay, rng, out);
            }
        }
        self.ledger.prune(now);

        let s = self.preambles.n_preambles as usize;
        let mut senders: Vec<Vec<DeviceId>> = alloc::vec![Vec::new(); s];
        for &device in starting {
            senders[rng.random_range(0..s)].push(device);
        }
        let detected: Vec<usize> = if self.detection == DetectionModel::IDEAL {
            (0..s).filter(|&p| !senders[p].is_empty()).collect()
        } else {
            (0..s).filter(|&p| self.detection.detect(senders[p].len(), rng)).collect()
        };

        let data_tti = now + self.ack_delay + 1;
        let cap = self.per_resource();
        let mut granted = alloc::vec![false; s];
        let mut grants: Vec<(usize, u64, u32)> = Vec::new();
        match self.feedback {
            Feedback::Bitmap => {
                let mut taken = alloc::vec![0u32; self.data_prbs as usize];
                for &p in &detected {
                    let r = self.preambles.data_resource(p as u32).expect("in range");
                    if taken[r as usize] < cap {
                        taken[r as usize] += 1;
                        grants.push((p, data_tti, r));
                    }
                }
            }
            // Round-robin over resources: requests share one only when they
            // outnumber the resources.
            Feedback::ResourceIndex => {
                for (k, &p) in detected.iter().enumerate().take((self.data_prbs * cap) as usize) {
                    grants.push((p, data_tti, k as u32 % self.data_prbs));
                }
            }
            Feedback::ResourceIndexQueue => {
                for &p in &detected {
                    let (t, idx) = self.ledger.book(data_tti, self.data_prbs * cap);
                    grants.push((p, t, idx % self.data_prbs));
                }
            }
        }
        for (p, t, r) in grants {
            granted[p] = true;
            let key = self.request_counter;
            self.request_counter = self.request_counter.wrapping_add(1);
            let slot = self.scheduled.entry(t).or_default().entry(r).or_default();
            slot.extend(senders[p].iter().map(|&d| (d, key)));
        }
        for (p, devices) in senders.iter().enumerate() {
            if !granted[p] {
                for &device in devices {
                    out.push(Outcome::Failure { device, feedback_tti: now + self.ack_delay });
                }
            }
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.data_prbs * self.per_resource()
    }
}
