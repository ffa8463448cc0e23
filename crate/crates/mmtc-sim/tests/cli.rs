use std::path::Path;
use std::process::{Command, Output};

use mmtc_sim::manifest::sha256_hex;
use mmtc_sim::report::read_csv;
use mmtc_sim::{presets, Manifest, CSV_HEADER, OUT_DIR_ENV};

fn sim(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mmtc-sim"));
    cmd.args(args).env_remove(OUT_DIR_ENV);
    if let Some(d) = env_out {
        cmd.env(OUT_DIR_ENV, d);
    }
    cmd.output().unwrap()
}

const SMALL: &[&str] = &["--override", "seeds=2", "--override", "horizon_ttis=300", "--override", "warmup_ttis=50", "--lambda", "5,20"];

fn run_small(out: &Path, jobs: &str) -> Output {
    let mut args = vec!["run", "sa-anchor", "--jobs", jobs, "--out", out.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    sim(&args, None)
}

#[test]
fn list_presets_names_every_preset() {
    let out = sim(&["list-presets"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in presets::names() {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn validate_accepts_presets_and_rejects_bad_files() {
    for name in presets::names() {
        let out = sim(&["validate", name], None);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = sim(&["validate", "sa-anchor", "--override", "seeds=0"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeds"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"bad\"\nlambdas = []\n[[variant]]\nlabel = \"x\"\nscheme = { name = \"slotted-aloha\" }\n").unwrap();
    let out = sim(&["validate", bad.to_str().unwrap()], None);
    assert!(!out.status.success());
    assert!(!sim(&["validate", "no-such-preset"], None).status.success());
}

#[test]
fn run_writes_csv_manifest_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_small(dir.path(), "2");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read(dir.path().join("sa-anchor.csv")).unwrap();
    assert_eq!(String::from_utf8_lossy(&csv).lines().next().unwrap(), CSV_HEADER.join(","));
    let rows = read_csv(&csv[..]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.scheme == "slotted-aloha" && r.seed_count == 2));
    assert_eq!(rows.iter().map(|r| r.lambda).collect::<Vec<_>>(), [5.0, 20.0]);

    let m = Manifest::parse(&std::fs::read_to_string(dir.path().join("sa-anchor.manifest")).unwrap());
    assert_eq!(m.get("name"), Some("sa-anchor"));
    assert_eq!(m.get("source"), Some("preset:sa-anchor"));
    assert_eq!(m.get("lambdas"), Some("5,20"));
    assert_eq!(m.get("horizon_ttis"), Some("300"));
    assert_eq!(m.get("seeds").unwrap().split(',').count(), 2);
    assert_eq!(m.get("csv_sha256"), Some(sha256_hex(&csv).as_str()));
    let resolved = std::fs::read_to_string(dir.path().join("sa-anchor.resolved.toml")).unwrap();
    assert_eq!(m.get("config_sha256"), Some(sha256_hex(resolved.as_bytes()).as_str()));

    // The resolved config reproduces the run byte for byte.
    let again = tempfile::tempdir().unwrap();
    let replay = dir.path().join("sa-anchor.resolved.toml");
    let out = sim(&["run", replay.to_str().unwrap(), "--jobs", "1", "--out", again.path().to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(again.path().join("sa-anchor.csv")).unwrap(), csv);
}

#[test]
fn output_is_independent_of_job_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_small(a.path(), "1").status.success());
    assert!(run_small(b.path(), "4").status.success());
    for f in ["sa-anchor.csv", "sa-anchor.manifest"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "sa-anchor", "--jobs", "1"];
    args.extend_from_slice(SMALL);
    let out = sim(&args, Some(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("sa-anchor.csv").exists());

    // An explicit flag wins over the environment.
    let flag = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "sa-anchor", "--jobs", "1", "--out", flag.path().to_str().unwrap()];
    args.extend_from_slice(SMALL);
    let env = tempfile::tempdir().unwrap();
    assert!(sim(&args, Some(env.path())).status.success());
    assert!(flag.path().join("sa-anchor.csv").exists());
    assert!(!env.path().join("sa-anchor.csv").exists());
}

#[test]
fn bad_override_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = sim(&["run", "sa-anchor", "--override", "no_equals_sign", "--out", dir.path().to_str().unwrap()], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
