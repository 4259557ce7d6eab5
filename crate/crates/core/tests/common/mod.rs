#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

pub fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn pu_tds_hist_path() -> PathBuf {
    manifest_dir().join("data/pu_tds.hist")
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(name)
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &[u8]) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != actual {
        return Err(format!("golden mismatch for {name}"));
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tracesample"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn tracesample")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "tracesample {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// The five randomized CLI invocations pinned by golden files, keyed by
/// golden name. Paths are relative to the manifest directory.
pub fn golden_invocations() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        (
            "sample_random_n500_seed0.csv",
            vec!["sample", "--histogram", "data/pu_tds.hist", "--family", "random", "--n", "500"],
        ),
        (
            "sample_underover_k100_seed0.csv",
            vec!["sample", "--histogram", "data/pu_tds.hist", "--family", "underover", "--k", "100"],
        ),
        (
            "compare_random_seed0.md",
            vec![
                "compare",
                "--histogram",
                "data/pu_tds.hist",
                "--matrix",
                "tests/fixtures/random_sizes.matrix",
            ],
        ),
        (
            "oracle_random_seed0.csv",
            vec![
                "oracle",
                "--histogram",
                "data/pu_tds.hist",
                "--n",
                "500,1000,2000,3000,5000,10000,15000,20000",
            ],
        ),
        (
            "analyze_pu_tds.md",
            vec!["analyze", "--histogram", "data/pu_tds.hist"],
        ),
    ]
}

pub fn run_in_manifest(args: &[&str]) -> Output {
    bin()
        .current_dir(manifest_dir())
        .args(args)
        .output()
        .expect("spawn tracesample")
}
