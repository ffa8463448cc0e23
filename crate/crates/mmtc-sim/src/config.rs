//! Experiment files: a lambda grid, seeds and one or more scheme variants.

use std::path::Path;

use anyhow::{bail, Context, Result};
use mmtc_core::capture::SnrDecodeTable;
use mmtc_core::schemes::{SchemeConfig, TableRef};
use mmtc_core::sim::{ArqConfig, ScenarioConfig, TrafficConfig};
use serde::{Deserialize, Serialize};

use crate::formats::read_decode_table;
use crate::overrides::apply_override;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Mean arrivals per TTI, one sweep point each.
    pub lambdas: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: u32,
    /// Seed of the first run; run `i` uses `seed_base + i`.
    #[serde(default = "default_seed_base")]
    pub seed_base: u64,
    #[serde(default = "default_horizon")]
    pub horizon_ttis: u64,
    /// Leading TTIs left out of the statistics.
    #[serde(default = "default_warmup")]
    pub warmup_ttis: u64,
    /// Minimum number of batches for the batch-means intervals.
    #[serde(default = "default_batches")]
    pub batches: u32,
    #[serde(default)]
    pub traffic: TrafficConfig,
    #[serde(default)]
    pub arq: ArqConfig,
    #[serde(rename = "variant")]
    pub variants: Vec<Variant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    /// Written to the `scheme` column.
    pub label: String,
    pub scheme: SchemeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arq: Option<ArqConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficConfig>,
}

fn default_seeds() -> u32 {
    20
}

fn default_seed_base() -> u64 {
    1
}

fn default_horizon() -> u64 {
    10_000
}

fn default_warmup() -> u64 {
    100
}

fn default_batches() -> u32 {
    20
}

impl ExperimentConfig {
    /// Parses TOML text and applies `key=value` overrides.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"));
        }
        let mut table: toml::Table = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
        for o in overrides {
            apply_override(&mut table, o).with_context(|| format!("override `{o}`"))?;
        }
        let merged = toml::to_string(&table)?;
        toml::from_str(&merged).map_err(|e| anyhow::anyhow!("after overrides: {e}"))
    }

    /// Reads a file; decode tables given as `*.csv` paths are loaded relative
    /// to the file's directory.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text, overrides).with_context(|| format!("in {}", path.display()))?;
        cfg.load_tables(path.parent().unwrap_or(Path::new(".")))?;
        Ok(cfg)
    }

    /// Replaces decode-table file references with their rows.
    pub fn load_tables(&mut self, base: &Path) -> Result<()> {
        for v in &mut self.variants {
            let table = match &mut v.scheme {
                SchemeConfig::Craplnc(p) => &mut p.decode_table,
                SchemeConfig::Scf(p) => &mut p.decode_table,
                _ => continue,
            };
            if let TableRef::Builtin(name) = table {
                if !SnrDecodeTable::BUILTINS.contains(&name.as_str()) && name.ends_with(".csv") {
                    let path = base.join(&*name);
                    let file = std::fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
                    let t = read_decode_table(file).with_context(|| format!("in {}", path.display()))?;
                    *table = TableRef::Rows(t.rows());
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs always serialize")
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed_base + i).collect()
    }

    /// One simulation point.
    pub fn scenario(&self, variant: usize, lambda: f64, seed: u64) -> ScenarioConfig {
        let v = &self.variants[variant];
        let mut traffic = v.traffic.unwrap_or(self.traffic);
        traffic.arrival_rate = lambda;
        ScenarioConfig {
            scheme: v.scheme.clone(),
            traffic,
            arq: v.arq.unwrap_or(self.arq),
            horizon_ttis: self.horizon_ttis,
            seed,
        }
    }

    /// Every problem found, without running anything.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lambdas.is_empty() {
            out.push("lambdas: sweep grid is empty".to_string());
        }
        for &l in &self.lambdas {
            if !l.is_finite() || l < 0.0 {
                out.push(format!("lambdas: {l} is not a non-negative rate"));
            }
        }
        if self.seeds == 0 {
            out.push("seeds: need at least one seed".to_string());
        }
        if self.horizon_ttis <= self.warmup_ttis {
            out.push(format!("horizon_ttis {} must exceed warmup_ttis {}", self.horizon_ttis, self.warmup_ttis));
        }
        if self.batches == 0 {
            out.push("batches: need at least one batch".to_string());
        }
        if self.variants.is_empty() {
            out.push("no [[variant]] given".to_string());
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].iter().any(|w| w.label == v.label) {
                out.push(format!("variant `{}`: duplicate label", v.label));
            }
            if v.label.contains([',', '"', '\n']) {
                out.push(format!("variant `{}`: label may not contain commas, quotes or newlines", v.label));
            }
            let probe = self.scenario(i, self.lambdas.first().copied().unwrap_or(0.0).max(0.0), self.seed_base);
            if let Err(e) = probe.validate() {
                out.push(format!("variant `{}` ({}): {e}", v.label, v.scheme.name()));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            bail!("{}", d.join("\n"))
        }
    }
}
