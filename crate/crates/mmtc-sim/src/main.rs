use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mmtc_sim::{load_experiment, output_dir, presets, run_experiment, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "mmtc-sim", version, about = "Slotted simulator for massive machine-type random access")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or bundled preset.
    Run {
        config: String,
        /// `key=value` with a dotted key, e.g. `variant.*.scheme.snr_db=20`.
        #[arg(long = "override", value_name = "K=V")]
        overrides: Vec<String>,
        /// Replace the lambda grid, comma separated.
        #[arg(long, value_name = "L[,L...]")]
        lambda: Option<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_name = "DIR", help = format!("Output directory [default: ${OUT_DIR_ENV} or ./results]"))]
        out: Option<PathBuf>,
    },
    /// Check an experiment without running it.
    Validate {
        config: String,
        #[arg(long = "override", value_name = "K=V")]
        overrides: Vec<String>,
    },
    /// List bundled presets.
    ListPresets,
    /// Print a bundled preset.
    ShowPreset { name: String },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run { config, mut overrides, lambda, jobs, out } => {
            if let Some(l) = lambda {
                overrides.push(format!("lambdas=[{l}]"));
            }
            let (cfg, source, _) = load_experiment(&config, &overrides)?;
            let dir = output_dir(out.as_deref());
            let res = run_experiment(&cfg, &source, &overrides, &dir, jobs)?;
            println!("wrote {} ({} rows)", res.csv.display(), res.rows.len());
            println!("wrote {}", res.manifest.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config, overrides } => {
            let (cfg, source, _) = load_experiment(&config, &overrides)?;
            let diags = cfg.diagnostics();
            if diags.is_empty() {
                println!("{source}: ok");
                Ok(ExitCode::SUCCESS)
            } else {
                for d in &diags {
                    eprintln!("{source}: {d}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::ListPresets => {
            for (name, text) in presets::PRESETS {
                let desc = text
                    .lines()
                    .find_map(|l| l.strip_prefix("description = "))
                    .map(|d| d.trim_matches('"'))
                    .unwrap_or("");
                println!("{name:<22} {desc}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ShowPreset { name } => match presets::preset(&name) {
            Some(t) => {
                print!("{t}");
                Ok(ExitCode::SUCCESS)
            }
            None => anyhow::bail!("no preset `{name}`"),
        },
    }
}
