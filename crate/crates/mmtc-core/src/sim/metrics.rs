use alloc::vec::Vec;

use super::config::TTI_MS;
use super::trace::{DeviceState, SimTrace};

/// Point estimates from one trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceMetrics {
    /// Successful transmissions per TTI.
    pub throughput: f64,
    /// Mean latency in ms over succeeded devices, `NaN` if none.
    pub latency_mean_ms: f64,
    pub drop_rate: f64,
    pub pending: u64,
}

/// Latency in ms of every succeeded device as `(completion_tti, ms)`, in
/// device order. Latency is `(T2 - T1)` TTIs plus the waiting offset.
pub fn latencies_ms(trace: &SimTrace) -> Vec<(u64, f64)> {
    trace
        .devices
        .iter()
        .filter(|d| d.state == DeviceState::Succeeded)
        .filter_map(|d| Some((d.completion_tti?, d.latency_ttis()? as f64 * TTI_MS + trace.waiting_offset_ms)))
        .collect()
}

/// Throughput over `ttis[warmup..]`; latency and drops over all devices.
pub fn summarize(trace: &SimTrace, warmup: usize) -> TraceMetrics {
    let window = &trace.ttis[warmup.min(trace.ttis.len())..];
    let served: u64 = window.iter().map(|r| r.successes as u64).sum();
    let throughput = if window.is_empty() { 0.0 } else { served as f64 / window.len() as f64 };
    let lat = latencies_ms(trace);
    let latency_mean_ms =
        if lat.is_empty() { f64::NAN } else { lat.iter().map(|&(_, l)| l).sum::<f64>() / lat.len() as f64 };
    let finished = trace.devices.iter().filter(|d| !d.is_pending()).count();
    let drops = trace.total_drops();
    TraceMetrics {
        throughput,
        latency_mean_ms,
        drop_rate: if finished == 0 { 0.0 } else { drops as f64 / finished as f64 },
        pending: trace.total_pending(),
    }
}
