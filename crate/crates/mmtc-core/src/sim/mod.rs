//! Slotted simulation engine.

mod config;
mod engine;
mod metrics;
mod trace;

pub use config::{ArqConfig, TrafficConfig, TTI_MS};
pub use metrics::{latencies_ms, summarize, TraceMetrics};
pub use engine::{apply_backoff, generate_arrivals, run_scenario, run_with_scheme, Backoff, ScenarioConfig};
pub use trace::{Device, DeviceId, DeviceState, SimTrace, TtiRecord};

/// Monotone TTI counter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimClock {
    tti: u64,
}

impl SimClock {
    pub fn now(&self) -> u64 {
        self.tti
    }

    pub fn now_ms(&self) -> f64 {
        self.tti as f64 * TTI_MS
    }

    pub fn step(&mut self) {
        self.tti += 1;
    }
}
