//! Shared helpers for the binary-level tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_angle-gauge");

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    // relative fixture paths keep error messages machine-independent
    Command::new(BIN)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// (golden file, args) for every fixture and command.
pub fn golden_cases() -> Vec<(String, Vec<&'static str>)> {
    let fixtures = [
        ("d21", "tests/fixtures/d21.csv"),
        ("id", "tests/fixtures/id.csv"),
        ("shear", "tests/fixtures/shear.json"),
    ];
    let mut cases = Vec::new();
    for (stem, path) in fixtures {
        cases.push((
            format!("{stem}.analyze.json"),
            vec![
                "analyze",
                "--matrix",
                path,
                "--c",
                "0",
                "--c",
                "0.5",
                "--c",
                "-0.3",
                "--samples",
                "2000",
                "--seed",
                "3",
            ],
        ));
        cases.push((
            format!("{stem}.witness.json"),
            vec!["witness", "--matrix", path, "--c", "0", "--c", "-0.5"],
        ));
        cases.push((
            format!("{stem}.verify.json"),
            vec![
                "verify",
                "--matrix",
                path,
                "--c",
                "0",
                "--c",
                "0.5",
                "--samples",
                "2000",
                "--seed",
                "7",
            ],
        ));
    }
    cases
}
