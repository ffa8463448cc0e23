//! KPIs: throughput and latency per sweep point, with batch-means intervals.

use std::io::{Read, Write};

use anyhow::{bail, Result};
use mmtc_core::sim::{DeviceState, SimTrace, TTI_MS};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "lambda",
    "seed_count",
    "throughput_mean",
    "throughput_ci",
    "latency_mean_ms",
    "latency_p50_ms",
    "latency_p95_ms",
    "latency_ci",
    "drop_rate",
    "pending",
];

/// One CSV row. Latency fields are `NaN` when nothing succeeded; CI fields
/// are 95% half-widths and `NaN` with fewer than two batches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpiRow {
    pub scheme: String,
    pub lambda: f64,
    pub seed_count: u32,
    pub throughput_mean: f64,
    pub throughput_ci: f64,
    pub latency_mean_ms: f64,
    pub latency_p50_ms: f64,
    pub latency_p95_ms: f64,
    pub latency_ci: f64,
    pub drop_rate: f64,
    pub pending: u64,
}

impl KpiRow {
    pub fn latency_mean_ttis(&self) -> f64 {
        self.latency_mean_ms / TTI_MS
    }
}

/// Successes per simulated TTI.
pub fn compute_throughput(trace: &SimTrace) -> Result<f64> {
    if trace.n_ttis() == 0 {
        bail!("empty trace");
    }
    Ok(trace.total_successes() as f64 / trace.n_ttis() as f64)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LatencySummary {
    pub count: usize,
    pub mean_ttis: f64,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
}

impl LatencySummary {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// `T2 - T1` plus the waiting offset over succeeded devices. Dropped and
/// pending devices are left out; no successes gives an empty summary.
pub fn compute_latency(trace: &SimTrace) -> LatencySummary {
    let ttis: Vec<u64> = trace.devices.iter().filter_map(|d| d.latency_ttis()).collect();
    let mut ms: Vec<f64> = ttis.iter().map(|&t| t as f64 * TTI_MS + trace.waiting_offset_ms).collect();
    if ms.is_empty() {
        return LatencySummary::default();
    }
    ms.sort_by(f64::total_cmp);
    let n = ms.len() as f64;
    LatencySummary {
        count: ms.len(),
        mean_ttis: ttis.iter().sum::<u64>() as f64 / n,
        mean_ms: ms.iter().sum::<f64>() / n,
        p50_ms: percentile(&ms, 0.5),
        p95_ms: percentile(&ms, 0.95),
    }
}

/// Nearest-rank percentile of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// 95% Student-t half-width of the mean of `samples`.
pub fn t_half_width(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("degrees of freedom are positive").inverse_cdf(0.975);
    t * (var / n as f64).sqrt()
}

/// Per-seed reduction of one trace, small enough to keep for every point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeedStats {
    /// Successes per TTI in each batch.
    pub batch_throughput: Vec<f64>,
    /// Mean latency in ms of devices arriving in each batch, if any succeeded.
    pub batch_latency: Vec<Option<f64>>,
    /// Latency in ms of every succeeded device arriving after the warm-up.
    pub latencies_ms: Vec<f64>,
    pub drops: u64,
    /// Devices past the warm-up that succeeded or were dropped.
    pub finished: u64,
    pub pending: u64,
}

/// Splits `ttis[warmup..]` into `n_batches` near-equal batches.
pub fn seed_stats(trace: &SimTrace, warmup: u64, n_batches: usize) -> SeedStats {
    let n = trace.n_ttis() as u64;
    let warmup = warmup.min(n);
    let len = n - warmup;
    let n_batches = n_batches.max(1).min(len.max(1) as usize);
    let bounds: Vec<u64> = (0..=n_batches as u64).map(|i| warmup + len * i / n_batches as u64).collect();
    let batch_of = |t: u64| bounds[1..].partition_point(|&b| b <= t).min(n_batches - 1);

    let mut batch_throughput = Vec::with_capacity(n_batches);
    for w in bounds.windows(2) {
        let served: u64 = trace.ttis[w[0] as usize..w[1] as usize].iter().map(|r| r.successes as u64).sum();
        let span = (w[1] - w[0]).max(1);
        batch_throughput.push(served as f64 / span as f64);
    }
    let mut sums = vec![(0.0, 0u64); n_batches];
    let mut stats = SeedStats { batch_throughput, ..Default::default() };
    for d in trace.devices.iter().filter(|d| d.arrival_tti >= warmup) {
        match d.state {
            DeviceState::Succeeded => {
                let ms = d.latency_ttis().expect("succeeded devices have a completion") as f64 * TTI_MS
                    + trace.waiting_offset_ms;
                let b = batch_of(d.arrival_tti);
                sums[b].0 += ms;
                sums[b].1 += 1;
                stats.latencies_ms.push(ms);
                stats.finished += 1;
            }
            DeviceState::Dropped => {
                stats.drops += 1;
                stats.finished += 1;
            }
            _ => {}
        }
    }
    stats.pending = trace.total_pending();
    stats.batch_latency = sums.iter().map(|&(s, c)| (c > 0).then(|| s / c as f64)).collect();
    stats
}

/// Batches per seed so that all seeds together give at least `min_batches`.
pub fn batches_per_seed(min_batches: u32, seeds: u32) -> usize {
    min_batches.div_ceil(seeds.max(1)).max(1) as usize
}

/// Pools the seeds of one sweep point.
pub fn aggregate(scheme: &str, lambda: f64, seeds: &[SeedStats]) -> KpiRow {
    let thr: Vec<f64> = seeds.iter().flat_map(|s| s.batch_throughput.iter().copied()).collect();
    let lat_batches: Vec<f64> = seeds.iter().flat_map(|s| s.batch_latency.iter().flatten().copied()).collect();
    let mut lat: Vec<f64> = seeds.iter().flat_map(|s| s.latencies_ms.iter().copied()).collect();
    lat.sort_by(f64::total_cmp);
    let drops: u64 = seeds.iter().map(|s| s.drops).sum();
    let finished: u64 = seeds.iter().map(|s| s.finished).sum();
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    KpiRow {
        scheme: scheme.to_string(),
        lambda,
        seed_count: seeds.len() as u32,
        throughput_mean: mean(&thr),
        throughput_ci: t_half_width(&thr),
        latency_mean_ms: mean(&lat),
        latency_p50_ms: percentile(&lat, 0.5),
        latency_p95_ms: percentile(&lat, 0.95),
        latency_ci: if lat.is_empty() { f64::NAN } else { t_half_width(&lat_batches) },
        drop_rate: if finished == 0 { 0.0 } else { drops as f64 / finished as f64 },
        pending: seeds.iter().map(|s| s.pending).sum(),
    }
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        String::new()
    }
}

fn parse(x: &str) -> Result<f64> {
    if x.is_empty() {
        Ok(f64::NAN)
    } else {
        Ok(x.parse()?)
    }
}

pub fn write_csv<W: Write>(rows: &[KpiRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            format!("{}", r.lambda),
            r.seed_count.to_string(),
            fmt(r.throughput_mean),
            fmt(r.throughput_ci),
            fmt(r.latency_mean_ms),
            fmt(r.latency_p50_ms),
            fmt(r.latency_p95_ms),
            fmt(r.latency_ci),
            fmt(r.drop_rate),
            r.pending.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<KpiRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        bail!("unexpected header {header:?}");
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(KpiRow {
            scheme: rec[0].to_string(),
            lambda: rec[1].parse()?,
            seed_count: rec[2].parse()?,
            throughput_mean: parse(&rec[3])?,
            throughput_ci: parse(&rec[4])?,
            latency_mean_ms: parse(&rec[5])?,
            latency_p50_ms: parse(&rec[6])?,
            latency_p95_ms: parse(&rec[7])?,
            latency_ci: parse(&rec[8])?,
            drop_rate: parse(&rec[9])?,
            pending: rec[10].parse()?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.95), 4.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert!(percentile(&[], 0.5).is_nan());
    }

    #[test]
    fn half_width_two_samples() {
        // Sample variance 2, standard error 1, t(0.975, 1) = 12.7062.
        let h = t_half_width(&[1.0, 3.0]);
        assert!((h - 12.706_204_736).abs() < 1e-6, "{h}");
        assert!(t_half_width(&[1.0]).is_nan());
    }

    #[test]
    fn batch_split() {
        assert_eq!(batches_per_seed(20, 20), 1);
        assert_eq!(batches_per_seed(20, 3), 7);
        assert_eq!(batches_per_seed(20, 40), 1);
    }
}
