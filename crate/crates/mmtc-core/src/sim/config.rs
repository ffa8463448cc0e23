use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Duration of one TTI in milliseconds.
pub const TTI_MS: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrafficConfig {
    /// Mean new devices per TTI.
    pub arrival_rate: f64,
    pub packet_size_bytes: u32,
    /// Mean offset between wake-up and the next TTI boundary, added to every
    /// reported latency.
    pub mean_waiting_time_ms: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig { arrival_rate: 0.0, packet_size_bytes: 8, mean_waiting_time_ms: 0.5 }
    }
}

impl TrafficConfig {
    pub fn with_rate(arrival_rate: f64) -> Self {
        TrafficConfig { arrival_rate, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !self.arrival_rate.is_finite() || self.arrival_rate < 0.0 {
            return Err(SimError::NegativeRate(self.arrival_rate));
        }
        if self.packet_size_bytes == 0 {
            return Err(SimError::Scheme("packet size must be positive".into()));
        }
        if !(self.mean_waiting_time_ms >= 0.0) {
            return Err(SimError::Scheme("waiting time must be non-negative".into()));
        }
        Ok(())
    }
}

/// ACK/NACK timing and retransmission policy.
///
/// A transmission in TTI `i` is answered at `i + ack_delay_ttis`; after a
/// NACK the device waits a uniform draw from
/// `backoff_min..=backoff_max` TTIs past the earliest retry slot
/// `i + ack_delay_ttis + 1`. The `max_retransmissions`-th NACK is final, so a
/// device transmits at most `max(max_retransmissions, 1)` times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArqConfig {
    pub ack_delay_ttis: u32,
    pub backoff_min: u32,
    pub backoff_max: u32,
    pub max_retransmissions: u32,
}

impl Default for ArqConfig {
    fn default() -> Self {
        ArqConfig { ack_delay_ttis: 3, backoff_min: 0, backoff_max: 10, max_retransmissions: 4 }
    }
}

impl ArqConfig {
    /// One transmission, no retries.
    pub fn fresh_arrivals() -> Self {
        ArqConfig { max_retransmissions: 1, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.ack_delay_ttis < 1 {
            return Err(SimError::Arq("ack_delay_ttis must be at least 1".into()));
        }
        if self.backoff_max < self.backoff_min {
            return Err(SimError::Arq(format!(
                "backoff window [{}, {}] is empty",
                self.backoff_min, self.backoff_max
            )));
        }
        Ok(())
    }

    /// Transmissions allowed per device.
    pub fn max_transmissions(&self) -> u32 {
        self.max_retransmissions.max(1)
    }
}
