//! Runs every (variant, lambda, seed) point of an experiment.

use anyhow::{anyhow, Result};
use mmtc_core::sim::run_scenario;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::{aggregate, batches_per_seed, seed_stats, KpiRow, SeedStats};

/// Simulates one point and reduces its trace.
pub fn run_point(cfg: &ExperimentConfig, variant: usize, lambda: f64, seed: u64) -> Result<SeedStats> {
    let scenario = cfg.scenario(variant, lambda, seed);
    let trace = run_scenario(&scenario).map_err(|e| anyhow!("variant `{}`: {e}", cfg.variants[variant].label))?;
    Ok(seed_stats(&trace, cfg.warmup_ttis, batches_per_seed(cfg.batches, cfg.seeds)))
}

/// One row per (variant, lambda), variants in file order and lambdas in grid
/// order. `jobs` worker threads; `None` uses all cores. The result does not
/// depend on `jobs`.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<KpiRow>> {
    cfg.validate()?;
    let n_seeds = cfg.seeds as u64;
    let points: Vec<(usize, usize, u64)> = (0..cfg.variants.len())
        .flat_map(|v| (0..cfg.lambdas.len()).flat_map(move |l| (0..n_seeds).map(move |s| (v, l, s))))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build()?;
    let stats: Vec<SeedStats> = pool.install(|| {
        points
            .par_iter()
            .map(|&(v, l, s)| run_point(cfg, v, cfg.lambdas[l], cfg.seed_base + s))
            .collect::<Result<Vec<_>>>()
    })?;
    let per_point = cfg.seeds as usize;
    Ok(stats
        .chunks(per_point)
        .enumerate()
        .map(|(i, chunk)| {
            let (v, l) = (i / cfg.lambdas.len(), i % cfg.lambdas.len());
            aggregate(&cfg.variants[v].label, cfg.lambdas[l], chunk)
        })
        .collect())
}
