//! Uniform contention over independent opportunities: slotted ALOHA over the
//! data PRBs, and time-alignment-free access over PRBs times spatial layers.

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, Outcome};
use crate::error::SimError;
use crate::resource::{PlanRef, ResourcePlan};
use crate::rng::SimRng;
use crate::sim::DeviceId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlottedAlohaParams {
    #[serde(default = "sa_plan")]
    pub resources: PlanRef<ResourcePlan>,
}

fn sa_plan() -> PlanRef<ResourcePlan> {
    PlanRef::Preset("sa-50".into())
}

impl Default for SlottedAlohaParams {
    fn default() -> Self {
        SlottedAlohaParams { resources: sa_plan() }
    }
}

/// 50 PRBs with 4 ideally orthogonal DMRS layers by default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotaftParams {
    #[serde(default = "notaft_plan")]
    pub resources: PlanRef<ResourcePlan>,
}

fn notaft_plan() -> PlanRef<ResourcePlan> {
    PlanRef::Preset("notaft-4layer".into())
}

impl Default for NotaftParams {
    fn default() -> Self {
        NotaftParams { resources: notaft_plan() }
    }
}

impl SlottedAlohaParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.resources.resolve()?;
        Ok(())
    }
}

impl NotaftParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.resources.resolve()?;
        Ok(())
    }
}

/// Picks an opportunity in `0..opportunities` per attempter; returns which
/// attempters are alone on theirs.
pub fn contend_uniform<R: Rng + ?Sized>(n: usize, opportunities: u32, rng: &mut R) -> Vec<bool> {
    let picks: Vec<u32> = (0..n).map(|_| rng.random_range(0..opportunities)).collect();
    let mut load = alloc::vec![0u32; opportunities as usize];
    for &p in &picks {
        load[p as usize] += 1;
    }
    picks.iter().map(|&p| load[p as usize] == 1).collect()
}

pub struct Contention {
    name: &'static str,
    opportunities: u32,
    ack_delay: u64,
}

impl Contention {
    pub fn new(name: &'static str, resources: &PlanRef<ResourcePlan>, ctx: &BuildContext) -> Result<Self, SimError> {
        let plan = resources.resolve()?;
        Ok(Contention { name, opportunities: plan.opportunities_per_tti(), ack_delay: ctx.arq.ack_delay_ttis as u64 })
    }
}

impl AccessScheme for Contention {
    fn name(&self) -> &'static str {
        self.name
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        let alone = contend_uniform(starting.len(), self.opportunities, rng);
        for (&device, ok) in starting.iter().zip(alone) {
            out.push(if ok {
                Outcome::Success { device, tx_tti: now }
            } else {
                Outcome::Failure { device, feedback_tti: now + self.ack_delay }
            });
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        self.opportunities
    }
}
