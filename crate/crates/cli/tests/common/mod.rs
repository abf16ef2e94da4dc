//! Helpers for driving the `spindiff` binary.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use spindiff_cli::Table;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn spindiff(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_spindiff"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Runs `spindiff --config <dir>/run.toml --out <dir>/out <args…>` with the
/// given config text.
pub fn run_with_config(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut all = vec!["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    all.extend_from_slice(args);
    spindiff(&all)
}

pub fn out_file(dir: &Path, name: &str) -> PathBuf {
    dir.join("out").join(name)
}

/// Default dot on a compact grid with a 50 ms step: cheap enough for
/// end-to-end runs over two minutes of dark time.
pub const COMPACT: &str = "\
[geometry]
radius_nm = 10.0
height_nm = 5.0

[solver]
extent_factor = 5.0
dt_s = 0.05
";

/// Reads `path`, then checks that writing the table back gives the same
/// bytes and parsing that gives identical values.
pub fn round_trips(path: &Path) -> Result<Table, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let table = Table::read(path).map_err(|e| e.to_string())?;
    let rewritten = table.to_csv_string();
    if rewritten != text {
        return Err(format!("{} does not rewrite byte-identically", path.display()));
    }
    let again = Table::parse(&rewritten, path).map_err(|e| e.to_string())?;
    for (a, b) in table.rows.iter().flatten().zip(again.rows.iter().flatten()) {
        let same = (a.is_nan() && b.is_nan()) || a == b || ((a - b) / a).abs() <= 1e-12;
        if !same {
            return Err(format!("{} value {a} read back as {b}", path.display()));
        }
    }
    Ok(table)
}

/// `value` after the first line of `text` starting with `key =`.
pub fn printed(text: &str, key: &str) -> Option<f64> {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim_start().strip_prefix('=')))
        .and_then(|v| v.trim().parse().ok())
}
