#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;
use spingate::ComplexMatrix;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spingate"))
        .args(args)
        .output()
        .expect("spawn spingate")
}

pub fn run_file(command: &str, file: &str, extra: &[&str]) -> Output {
    let path = data(file);
    let mut args = vec![command, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

pub fn complex_of(v: &Value) -> Complex64 {
    let pair = v.as_array().expect("[re, im]");
    Complex64::new(pair[0].as_f64().unwrap(), pair[1].as_f64().unwrap())
}

pub fn matrix_of(v: &Value) -> ComplexMatrix {
    let rows: Vec<Vec<Complex64>> = v
        .as_array()
        .expect("matrix rows")
        .iter()
        .map(|row| {
            row.as_array()
                .expect("row")
                .iter()
                .map(complex_of)
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&rows).expect("square matrix")
}

/// `path:line:column:` diagnostic on stderr.
pub fn has_position(stderr: &[u8]) -> bool {
    let text = String::from_utf8_lossy(stderr);
    text.lines().any(|line| {
        let mut parts = line.split(".ham:").nth(1).unwrap_or("").splitn(3, ':');
        let line_no = parts.next().and_then(|s| s.parse::<usize>().ok());
        let col_no = parts.next().and_then(|s| s.parse::<usize>().ok());
        matches!((line_no, col_no), (Some(l), Some(c)) if l >= 1 && c >= 1)
    })
}

pub const MALFORMED: [&str; 8] = [
    "bad_duplicate_site.ham",
    "bad_unknown_site.ham",
    "bad_missing_factors.ham",
    "bad_header_after_terms.ham",
    "bad_syntax.ham",
    "bad_division_by_zero.ham",
    "bad_factor.ham",
    "bad_character.ham",
];
