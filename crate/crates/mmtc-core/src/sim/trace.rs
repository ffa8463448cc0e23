use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Opaque device handle, unique within one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeviceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeviceState {
    Idle,
    Backlogged,
    AwaitingFeedback,
    Succeeded,
    Dropped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Device {
    pub id: DeviceId,
    pub state: DeviceState,
    /// T1: first TTI the device may transmit in.
    pub arrival_tti: u64,
    /// T2: end of the TTI carrying the successful transmission.
    pub completion_tti: Option<u64>,
    pub attempts_used: u32,
}

impl Device {
    pub fn new(id: DeviceId, arrival_tti: u64) -> Self {
        Device { id, state: DeviceState::Backlogged, arrival_tti, completion_tti: None, attempts_used: 0 }
    }

    /// `T2 - T1` in TTIs, for succeeded devices.
    pub fn latency_ttis(&self) -> Option<u64> {
        self.completion_tti.map(|c| c - self.arrival_tti)
    }

    pub fn is_pending(&self) -> bool {
        matches!(self.state, DeviceState::Idle | DeviceState::Backlogged | DeviceState::AwaitingFeedback)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtiRecord {
    pub arrivals: u32,
    /// Devices handed to the scheme this TTI.
    pub attempts: u32,
    /// Successful transmissions carried in this TTI.
    pub successes: u32,
    /// NACKs (or missing grants) delivered in this TTI.
    pub failures: u32,
}

/// Full record of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub ttis: Vec<TtiRecord>,
    pub devices: Vec<Device>,
    pub waiting_offset_ms: f64,
}

impl SimTrace {
    pub fn n_ttis(&self) -> usize {
        self.ttis.len()
    }

    pub fn total_arrivals(&self) -> u64 {
        self.devices.len() as u64
    }

    pub fn total_successes(&self) -> u64 {
        self.ttis.iter().map(|r| r.successes as u64).sum()
    }

    pub fn total_drops(&self) -> u64 {
        self.devices.iter().filter(|d| d.state == DeviceState::Dropped).count() as u64
    }

    pub fn total_pending(&self) -> u64 {
        self.devices.iter().filter(|d| d.is_pending()).count() as u64
    }
}
