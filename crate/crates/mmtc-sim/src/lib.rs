//! Sweep runner, file formats and command-line front end for `mmtc-core`.
//!
//! An experiment file lists a lambda grid, seeds and scheme variants; a run
//! writes one KPI CSV row per (variant, lambda), a manifest and the resolved
//! configuration.

pub mod config;
pub mod formats;
pub mod manifest;
pub mod overrides;
pub mod presets;
pub mod report;
pub mod sweep;

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

pub use config::{ExperimentConfig, Variant};
pub use manifest::Manifest;
pub use report::{KpiRow, CSV_HEADER};
pub use sweep::run_sweep;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MMTC_SIM_OUT";

/// Output directory: explicit flag, then the environment, then `results`.
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results")),
    }
}

/// Loads `target` as a file, or as a bundled preset when no such file exists.
/// Returns the config, a description of its source and the source text.
pub fn load_experiment(target: &str, overrides: &[String]) -> Result<(ExperimentConfig, String, String)> {
    let path = Path::new(target);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let cfg = ExperimentConfig::load(path, overrides)?;
        return Ok((cfg, path.display().to_string(), text));
    }
    let name = target.strip_prefix("preset:").unwrap_or(target);
    match presets::preset(name) {
        Some(text) => {
            let cfg = ExperimentConfig::parse(text, overrides)?;
            Ok((cfg, format!("preset:{name}"), text.to_string()))
        }
        None => bail!("`{target}` is neither a file nor a preset (see list-presets)"),
    }
}

/// Files written by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub resolved: PathBuf,
    pub rows: Vec<KpiRow>,
}

/// Runs a loaded experiment and writes `<name>.csv`, `<name>.manifest` and
/// `<name>.resolved.toml` into `out`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    source: &str,
    overrides: &[String],
    out: &Path,
    jobs: Option<usize>,
) -> Result<RunOutput> {
    let rows = run_sweep(cfg, jobs)?;
    std::fs::create_dir_all(out)?;
    let mut csv = Vec::new();
    report::write_csv(&rows, &mut csv)?;
    let resolved = cfg.to_toml();
    let csv_name = format!("{}.csv", cfg.name);
    let manifest = Manifest::new(cfg, source, overrides, &resolved, &csv_name, &csv);
    let paths = RunOutput {
        csv: out.join(&csv_name),
        manifest: out.join(format!("{}.manifest", cfg.name)),
        resolved: out.join(format!("{}.resolved.toml", cfg.name)),
        rows,
    };
    std::fs::write(&paths.csv, &csv)?;
    std::fs::write(&paths.manifest, manifest.render())?;
    std::fs::write(&paths.resolved, resolved)?;
    Ok(paths)
}
