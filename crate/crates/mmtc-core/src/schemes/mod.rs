//! Access schemes. Each turns the devices starting an attempt in a TTI into
//! per-device outcomes, possibly buffering them into frames or grants first.

mod ccra;
mod contention;
mod craplnc;
mod csmud;
mod lte;
mod ostsap;
pub mod peeling;
mod sbaia;
mod scf;
pub mod signature;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

pub use ccra::{Ccra, CcraParams};
pub use contention::{contend_uniform, Contention, NotaftParams, SlottedAlohaParams};
pub use craplnc::{resolve_frame, Craplnc, CraplncParams, FrameResolution, SlotDraw};
pub use csmud::{Csmud, CsmudParams};
pub use lte::{LteMultistage, LteParams};
pub use ostsap::{Feedback, OneStage, OneStageParams, TwoStage, TwoStageParams};
pub use sbaia::{dimension_frame, Sbaia, SbaiaParams};
pub use scf::{Scf, ScfFrameReport, ScfParams};

use crate::capture::SnrDecodeTable;
use crate::error::SimError;
use crate::rng::SimRng;
use crate::sim::{ArqConfig, DeviceId, TrafficConfig};

/// Result of one device attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Data received in `tx_tti`; the device completes at `tx_tti + 1`.
    Success { device: DeviceId, tx_tti: u64 },
    /// NACK or missing grant, noticed by the device in `feedback_tti`.
    Failure { device: DeviceId, feedback_tti: u64 },
}

/// Common interface driven by the simulation engine.
pub trait AccessScheme: Send {
    fn name(&self) -> &'static str;

    /// `starting` lists the devices beginning an attempt in TTI `now`. Every
    /// such device must eventually get exactly one outcome, in this call or
    /// a later one.
    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>);

    /// Upper bound on successful transmissions per TTI.
    fn capacity_per_tti(&self) -> u32;
}

/// Scenario facts available when a scheme is built.
#[derive(Clone, Copy, Debug)]
pub struct BuildContext {
    pub traffic: TrafficConfig,
    pub arq: ArqConfig,
    pub seed: u64,
}

/// Scheme selection plus its parameter block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeConfig {
    SlottedAloha(SlottedAlohaParams),
    Notaft(NotaftParams),
    OneStage(OneStageParams),
    TwoStage(TwoStageParams),
    LteMultistage(LteParams),
    Sbaia(SbaiaParams),
    Csmud(CsmudParams),
    Craplnc(CraplncParams),
    Ccra(CcraParams),
    Scf(ScfParams),
}

impl SchemeConfig {
    pub const NAMES: &'static [&'static str] = &[
        "slotted-aloha",
        "notaft",
        "one-stage",
        "two-stage",
        "lte-multistage",
        "sbaia",
        "csmud",
        "craplnc",
        "ccra",
        "scf",
    ];

    /// Default parameter block for a registered scheme name.
    pub fn default_for(name: &str) -> Result<Self, SimError> {
        Ok(match name {
            "slotted-aloha" => SchemeConfig::SlottedAloha(SlottedAlohaParams::default()),
            "notaft" => SchemeConfig::Notaft(NotaftParams::default()),
            "one-stage" => SchemeConfig::OneStage(OneStageParams::default()),
            "two-stage" => SchemeConfig::TwoStage(TwoStageParams::default()),
            "lte-multistage" => SchemeConfig::LteMultistage(LteParams::default()),
            "sbaia" => SchemeConfig::Sbaia(SbaiaParams::default()),
            "csmud" => SchemeConfig::Csmud(CsmudParams::default()),
            "craplnc" => SchemeConfig::Craplnc(CraplncParams::default()),
            "ccra" => SchemeConfig::Ccra(CcraParams::default()),
            "scf" => SchemeConfig::Scf(ScfParams::default()),
            other => return Err(SimError::UnknownScheme(String::from(other))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeConfig::SlottedAloha(_) => "slotted-aloha",
            SchemeConfig::Notaft(_) => "notaft",
            SchemeConfig::OneStage(_) => "one-stage",
            SchemeConfig::TwoStage(_) => "two-stage",
            SchemeConfig::LteMultistage(_) => "lte-multistage",
            SchemeConfig::Sbaia(_) => "sbaia",
            SchemeConfig::Csmud(_) => "csmud",
            SchemeConfig::Craplnc(_) => "craplnc",
            SchemeConfig::Ccra(_) => "ccra",
            SchemeConfig::Scf(_) => "scf",
        }
    }

    /// Checks every plan and parameter without building tables.
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            SchemeConfig::SlottedAloha(p) => p.validate(),
            SchemeConfig::Notaft(p) => p.validate(),
            SchemeConfig::OneStage(p) => p.validate(),
            SchemeConfig::TwoStage(p) => p.validate(),
            SchemeConfig::LteMultistage(p) => p.validate(),
            SchemeConfig::Sbaia(p) => p.validate(),
            SchemeConfig::Csmud(p) => p.validate(),
            SchemeConfig::Craplnc(p) => p.validate(),
            SchemeConfig::Ccra(p) => p.validate(),
            SchemeConfig::Scf(p) => p.validate(),
        }
    }
}

/// Instantiates the configured scheme.
pub fn build(config: &SchemeConfig, ctx: &BuildContext) -> Result<Box<dyn AccessScheme>, SimError> {
    config.validate()?;
    Ok(match config {
        SchemeConfig::SlottedAloha(p) => Box::new(Contention::new("slotted-aloha", &p.resources, ctx)?),
        SchemeConfig::Notaft(p) => Box::new(Contention::new("notaft", &p.resources, ctx)?),
        SchemeConfig::OneStage(p) => Box::new(OneStage::new(p, ctx)?),
        SchemeConfig::TwoStage(p) => Box::new(TwoStage::new(p, ctx)?),
        SchemeConfig::LteMultistage(p) => Box::new(LteMultistage::new(p, ctx)?),
        SchemeConfig::Sbaia(p) => Box::new(Sbaia::new(p, ctx)?),
        SchemeConfig::Csmud(p) => Box::new(Csmud::new(p, ctx)?),
        SchemeConfig::Craplnc(p) => Box::new(Craplnc::new(p, ctx)?),
        SchemeConfig::Ccra(p) => Box::new(Ccra::new(p, ctx)?),
        SchemeConfig::Scf(p) => Box::new(Scf::new(p, ctx)?),
    })
}

/// Decode table given by built-in name or inline `(snr_db, n, p)` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableRef {
    Builtin(String),
    Rows(Vec<(f64, u32, f64)>),
}

impl TableRef {
    pub fn resolve(&self) -> Result<SnrDecodeTable, SimError> {
        match self {
            TableRef::Builtin(name) => SnrDecodeTable::builtin(name),
            TableRef::Rows(rows) => SnrDecodeTable::from_rows(rows),
        }
    }
}

/// Per-TTI capacity ledger for grant-based schemes.
///
/// Tracks one contiguous run of fully booked TTIs so that deep queues are
/// skipped in one step.
#[derive(Clone, Debug, Default)]
pub(crate) struct CapacityLedger {
    used: alloc::collections::BTreeMap<u64, u32>,
    full: core::ops::Range<u64>,
}

impl CapacityLedger {
    /// First TTI at or after `from` with spare capacity; books one unit and
    /// returns the TTI with the unit's index within it.
    pub fn book(&mut self, from: u64, capacity: u32) -> (u64, u32) {
        let mut t = from;
        if self.full.contains(&t) {
            t = self.full.end;
        }
        loop {
            let used = self.used.entry(t).or_insert(0);
            if *used < capacity {
                let index = *used;
                *used += 1;
                if *used == capacity {
                    if t == self.full.end && !self.full.is_empty() {
                        self.full.end += 1;
                    } else if self.full.is_empty() {
                        self.full = t..t + 1;
                    } else if t + 1 == self.full.start {
                        self.full.start = t;
                    }
                    while self.used.get(&self.full.end).is_some_and(|&u| u >= capacity) {
                        self.full.end += 1;
                    }
                }
                return (t, index);
            }
            t += 1;
        }
    }

    /// Forgets TTIs before `now`.
    pub fn prune(&mut self, now: u64) {
        self.used = self.used.split_off(&now);
        if self.full.end <= now {
            self.full = 0..0;
        } else if self.full.start < now {
            self.full.start = now;
        }
    }
}
