//! Golden scenarios shared by the CLI tests and the acceptance runner.
//!
//! Set `GFK_BLESS=1` to rewrite the expected files from the current binary.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn input(name: &str) -> PathBuf {
    golden_dir().join("inputs").join(name)
}

pub fn gfk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfk"))
        .args(args)
        .env_remove("GFK_MAX_QUBITS")
        .output()
        .expect("gfk binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub struct Scenario {
    pub name: &'static str,
    pub input: &'static str,
    pub args: &'static [&'static str],
}

/// Fission with the split vertex carrying neighbor 1 (Bell pair), and
/// carrying neighbors 3 and 5 (three-qubit GHZ).
pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "bell_split",
        input: "bell_split.json",
        args: &["--target", "2", "--kept", "1", "--seed", "7"],
    },
    Scenario {
        name: "ghz_split",
        input: "ghz_split.json",
        args: &["--target", "2", "--kept", "3,5", "--seed", "7"],
    },
];

/// Runs a scenario and returns `(file name, contents)` for every artifact:
/// the fission report and DOT pair written by `--out`, plus the stdout of
/// `audit` and of `fission --format dot`.
pub fn render(s: &Scenario, scratch: &Path) -> Result<Vec<(String, String)>, String> {
    let path = input(s.input);
    let path = path.to_str().expect("utf-8 path");
    let prefix = scratch.join(s.name);
    let prefix = prefix.to_str().expect("utf-8 path");

    let mut args = vec!["fission", path];
    args.extend_from_slice(s.args);
    args.extend_from_slice(&["--verify", "--format", "both", "--out", prefix]);
    let out = gfk(&args);
    if !out.status.success() {
        return Err(format!(
            "{}: fission failed: {}",
            s.name,
            String::from_utf8_lossy(&out.stderr)
        ));
    }

    let mut files = Vec::new();
    for suffix in [".json", ".before.dot", ".after.dot"] {
        let file = format!("{}{suffix}", s.name);
        let text = fs::read_to_string(scratch.join(&file)).map_err(|e| format!("{file}: {e}"))?;
        files.push((file, text));
    }

    let mut audit = vec!["audit", path];
    audit.extend_from_slice(s.args);
    let out = gfk(&audit);
    if !out.status.success() {
        return Err(format!(
            "{}: audit failed: {}",
            s.name,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    files.push((format!("{}.audit.json", s.name), stdout(&out)));
    Ok(files)
}

/// Compares every scenario with its golden files, byte for byte.
pub fn check_goldens() -> Result<usize, String> {
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bless = std::env::var_os("GFK_BLESS").is_some();
    let mut compared = 0;
    for s in SCENARIOS {
        for (file, actual) in render(s, scratch.path())? {
            let path = golden_dir().join(&file);
            if bless {
                fs::write(&path, &actual).map_err(|e| format!("{file}: {e}"))?;
            }
            let expected = fs::read_to_string(&path).map_err(|e| format!("{file}: {e}"))?;
            if expected != actual {
                return Err(format!("{file}: output differs from the golden copy"));
            }
            compared += 1;
        }
    }
    Ok(compared)
}
