//! Per-TTI radio resource budget: PRB split, preamble pools, signature and
//! slotted frames.

use alloc::string::String;
use serde::{Deserialize, Serialize};

use crate::error::PlanError;

/// PRB partition of one TTI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcePlan {
    pub total_prbs: u32,
    pub control_prbs: u32,
    pub data_prbs: u32,
    #[serde(default = "one")]
    pub spatial_layers: u32,
}

fn one() -> u32 {
    1
}

impl ResourcePlan {
    pub const fn new(total_prbs: u32, control_prbs: u32, data_prbs: u32, spatial_layers: u32) -> Self {
        ResourcePlan { total_prbs, control_prbs, data_prbs, spatial_layers }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.control_prbs + self.data_prbs != self.total_prbs {
            return Err(PlanError::Partition {
                control: self.control_prbs,
                data: self.data_prbs,
                total: self.total_prbs,
            });
        }
        if self.spatial_layers == 0 {
            return Err(PlanError::Invalid("spatial_layers must be at least 1".into()));
        }
        if self.data_prbs == 0 {
            return Err(PlanError::Invalid("plan has no data resources".into()));
        }
        Ok(())
    }

    /// Contention opportunities per TTI (`M_D` times spatial layers).
    pub fn opportunities_per_tti(&self) -> u32 {
        self.data_prbs * self.spatial_layers
    }

    /// Looks up a named plan.
    ///
    /// The OSTSAP plans count 54 abstract data resources and do not charge the
    /// preamble pool against them, so `S = N * 54` holds for every pool size.
    pub fn preset(name: &str) -> Result<Self, PlanError> {
        Ok(match name {
            "sa-50" => ResourcePlan::new(50, 0, 50, 1),
            "notaft-4layer" => ResourcePlan::new(50, 0, 50, 4),
            "ostsap-54" => ResourcePlan::new(54, 0, 54, 1),
            "lte-54" => ResourcePlan::new(50, prach_prbs(54), 50 - prach_prbs(54), 1),
            "sbaia-216" => ResourcePlan::new(50, prach_prbs(216), 50 - prach_prbs(216), 1),
            other => return Err(PlanError::UnknownPreset(String::from(other))),
        })
    }

    pub const PRESETS: &'static [&'static str] =
        &["sa-50", "notaft-4layer", "ostsap-54", "lte-54", "sbaia-216"];
}

/// PRBs needed to carry a pool of `n_preambles` per PRACH.
///
/// Linear through the two known points (54 -> 6, 216 -> 12), rounded up.
pub fn prach_prbs(n_preambles: u32) -> u32 {
    // 6 + (S - 54) / 27, written to stay in integers.
    (4 * 27 + n_preambles).div_ceil(27)
}

/// Preamble pool. `over_provisioning` is set when the fixed block mapping
/// from preambles to data resources is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreamblePlan {
    pub n_preambles: u32,
    #[serde(default)]
    pub over_provisioning: Option<u32>,
    pub prbs_per_preamble_pool: u32,
}

impl PreamblePlan {
    pub fn mapped(n_preambles: u32, over_provisioning: u32) -> Self {
        PreamblePlan {
            n_preambles,
            over_provisioning: Some(over_provisioning),
            prbs_per_preamble_pool: prach_prbs(n_preambles),
        }
    }

    pub fn unmapped(n_preambles: u32) -> Self {
        PreamblePlan { n_preambles, over_provisioning: None, prbs_per_preamble_pool: prach_prbs(n_preambles) }
    }

    pub fn preset(name: &str) -> Result<Self, PlanError> {
        Ok(match name {
            "ostsap-54" => PreamblePlan::mapped(54, 1),
            "ostsap-108" => PreamblePlan::mapped(108, 2),
            "ostsap-216" => PreamblePlan::mapped(216, 4),
            "lte-54" => PreamblePlan::unmapped(54),
            "sbaia-216" => PreamblePlan::unmapped(216),
            other => return Err(PlanError::UnknownPreset(String::from(other))),
        })
    }

    pub const PRESETS: &'static [&'static str] =
        &["ostsap-54", "ostsap-108", "ostsap-216", "lte-54", "sbaia-216"];

    /// Checks the pool against the data resources it maps onto.
    pub fn validate(&self, data_prbs: u32) -> Result<(), PlanError> {
        if self.n_preambles == 0 {
            return Err(PlanError::Invalid("preamble pool is empty".into()));
        }
        if let Some(n) = self.over_provisioning {
            if n == 0 || n.checked_mul(data_prbs) != Some(self.n_preambles) {
                return Err(PlanError::Mapping { s: self.n_preambles, n, data_prbs });
            }
        }
        Ok(())
    }

    /// Block mapping: preambles `[r*N, (r+1)*N)` point to data resource `r`.
    pub fn data_resource(&self, preamble: u32) -> Result<u32, PlanError> {
        let n = self
            .over_provisioning
            .ok_or_else(|| PlanError::Invalid("preamble plan has no fixed mapping".into()))?;
        if preamble >= self.n_preambles {
            return Err(PlanError::PreambleOutOfRange { index: preamble, n_preambles: self.n_preambles });
        }
        Ok(preamble / n)
    }
}

/// Signature frame: `L` PRACH subframes of `M` preambles, `k` hashes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureFramePlan {
    pub n_subframes: u32,
    pub preambles_per_prach: u32,
    pub hashes_per_signature: u32,
}

impl SignatureFramePlan {
    pub fn positions(&self) -> usize {
        self.n_subframes as usize * self.preambles_per_prach as usize
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.n_subframes == 0 || self.preambles_per_prach == 0 {
            return Err(PlanError::Invalid("signature frame has no positions".into()));
        }
        if self.hashes_per_signature == 0 || self.hashes_per_signature as usize > self.positions() {
            return Err(PlanError::Invalid("hashes_per_signature must be in 1..=L*M".into()));
        }
        Ok(())
    }
}

/// Slotted frame with a fixed replica count per device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramePlan {
    pub slots_per_frame: u32,
    pub replicas: u32,
}

impl FramePlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.replicas == 0 || self.replicas > self.slots_per_frame {
            return Err(PlanError::Replicas { replicas: self.replicas, slots: self.slots_per_frame });
        }
        Ok(())
    }
}

/// Either a preset name or an inline plan in a config file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlanRef<T> {
    Preset(String),
    Inline(T),
}

impl PlanRef<ResourcePlan> {
    pub fn resolve(&self) -> Result<ResourcePlan, PlanError> {
        let plan = match self {
            PlanRef::Preset(name) => ResourcePlan::preset(name)?,
            PlanRef::Inline(plan) => *plan,
        };
        plan.validate()?;
        Ok(plan)
    }
}

impl PlanRef<PreamblePlan> {
    pub fn resolve(&self) -> Result<PreamblePlan, PlanError> {
        match self {
            PlanRef::Preset(name) => PreamblePlan::preset(name),
            PlanRef::Inline(plan) => Ok(*plan),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opportunities() {
        assert_eq!(ResourcePlan::preset("notaft-4layer").unwrap().opportunities_per_tti(), 200);
        assert_eq!(ResourcePlan::preset("sa-50").unwrap().opportunities_per_tti(), 50);
        assert_eq!(ResourcePlan::preset("sbaia-216").unwrap().opportunities_per_tti(), 38);
    }

    #[test]
    fn prach_cost_points() {
        assert_eq!(prach_prbs(54), 6);
        assert_eq!(prach_prbs(108), 8);
        assert_eq!(prach_prbs(216), 12);
    }

    #[test]
    fn block_mapping() {
        let p = PreamblePlan::preset("ostsap-108").unwrap();
        assert_eq!(p.data_resource(0).unwrap(), 0);
        assert_eq!(p.data_resource(1).unwrap(), 0);
        assert_eq!(p.data_resource(2).unwrap(), 1);
        assert!(p.data_resource(108).is_err());
        let id = PreamblePlan::preset("ostsap-54").unwrap();
        for i in 0..54 {
            assert_eq!(id.data_resource(i).unwrap(), i);
        }
    }

    #[test]
    fn every_preset_validates() {
        for name in ResourcePlan::PRESETS {
            ResourcePlan::preset(name).unwrap().validate().unwrap();
        }
        let ostsap = ResourcePlan::preset("ostsap-54").unwrap();
        for name in ["ostsap-54", "ostsap-108", "ostsap-216"] {
            PreamblePlan::preset(name).unwrap().validate(ostsap.data_prbs).unwrap();
        }
    }

    #[test]
    fn partition_violation() {
        let bad = ResourcePlan::new(50, 10, 30, 1);
        assert!(matches!(bad.validate(), Err(PlanError::Partition { .. })));
    }

    #[test]
    fn replicas_bounded_by_slots() {
        assert!(FramePlan { slots_per_frame: 10, replicas: 2 }.validate().is_ok());
        assert!(FramePlan { slots_per_frame: 2, replicas: 3 }.validate().is_err());
    }
}
