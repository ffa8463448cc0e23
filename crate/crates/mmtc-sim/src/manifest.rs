//! Run manifests: `key = value` lines recording everything needed to
//! reproduce a CSV.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    /// `resolved` is the TOML actually run; `source` names where it came from.
    pub fn new(cfg: &ExperimentConfig, source: &str, overrides: &[String], resolved: &str, csv_name: &str, csv: &[u8]) -> Self {
        let seeds: Vec<String> = cfg.seed_list().iter().map(u64::to_string).collect();
        let lambdas: Vec<String> = cfg.lambdas.iter().map(|l| format!("{l}")).collect();
        let labels: Vec<&str> = cfg.variants.iter().map(|v| v.label.as_str()).collect();
        let entries = [
            ("name", cfg.name.clone()),
            ("source", source.to_string()),
            ("overrides", overrides.join(" ")),
            ("config_sha256", sha256_hex(resolved.as_bytes())),
            ("seeds", seeds.join(",")),
            ("lambdas", lambdas.join(",")),
            ("variants", labels.join(" | ")),
            ("horizon_ttis", cfg.horizon_ttis.to_string()),
            ("warmup_ttis", cfg.warmup_ttis.to_string()),
            ("batches", cfg.batches.to_string()),
            ("mmtc_sim_version", env!("CARGO_PKG_VERSION").to_string()),
            ("mmtc_core_version", mmtc_core::VERSION.to_string()),
            ("csv", csv_name.to_string()),
            ("csv_sha256", sha256_hex(csv)),
        ];
        Manifest { entries: entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once(" = ").map(|(k, v)| (k.trim().to_string(), v.to_string())))
            .collect();
        Manifest { entries }
    }
}
