//! Golden-suite runner.
//!
//! A suite directory holds `NAME.case.json` files of the form
//! `{"command": "...", "input": "relative/path.json", "flags": [...], "exit_code": 0}`
//! next to `NAME.expected.json`, the canonical report of that case. Cases run
//! with the default ħ window unless their flags say otherwise.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{input_hash, Report};
use crate::schema::{parse, relative};
use crate::{at, CliError, Settings};

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct CaseSpec {
    command: String,
    #[serde(default)]
    input: Option<String>,
    #[serde(default)]
    flags: Vec<String>,
    #[serde(default)]
    exit_code: Option<i32>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct LineDiff {
    pub line: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub name: String,
    /// `pass`, `mismatch`, `missing_expected`, `bad_case` or `blessed`.
    pub status: String,
    pub exit_code: Option<i32>,
    pub expected_exit_code: Option<i32>,
    pub diff: Option<LineDiff>,
    pub message: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub cases: Vec<CaseOutcome>,
    pub passed: usize,
    pub warnings: Vec<String>,
    /// Hash over every case and expected file, in case order.
    pub suite_sha256: String,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.status == "pass" || c.status == "blessed")
    }
}

fn first_difference(expected: &str, actual: &str) -> LineDiff {
    let (e, a): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    let n = e.len().max(a.len());
    for i in 0..n {
        let (x, y) = (e.get(i).copied().unwrap_or(""), a.get(i).copied().unwrap_or(""));
        if x != y || i >= e.len() || i >= a.len() {
            return LineDiff { line: i + 1, expected: x.to_string(), actual: y.to_string() };
        }
    }
    LineDiff { line: n + 1, expected: String::new(), actual: String::new() }
}

fn case_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(stem) = name.strip_suffix(".case.json") {
            out.push((stem.to_string(), p.clone()));
        }
    }
    out.sort();
    Ok(out)
}

fn run_case(name: &str, case_path: &Path, bless: bool) -> (CaseOutcome, Vec<u8>) {
    let expected_path = case_path.with_file_name(format!("{name}.expected.json"));
    let mut outcome = CaseOutcome {
        name: name.to_string(),
        status: "pass".into(),
        exit_code: None,
        expected_exit_code: None,
        diff: None,
        message: None,
    };
    let bytes = match std::fs::read(case_path) {
        Ok(b) => b,
        Err(e) => {
            outcome.status = "bad_case".into();
            outcome.message = Some(e.to_string());
            return (outcome, Vec::new());
        }
    };
    let spec: CaseSpec = match parse(&bytes) {
        Ok(s) => s,
        Err(e) => {
            outcome.status = "bad_case".into();
            outcome.message = Some(e.to_string());
            return (outcome, bytes);
        }
    };
    let mut args = vec![spec.command.clone()];
    if let Some(i) = &spec.input {
        args.push(relative(case_path, i).display().to_string());
    }
    args.extend(spec.flags.iter().cloned());
    args.push("--pretty".into());
    let out = crate::run(&args, None);
    outcome.exit_code = Some(out.code);
    outcome.expected_exit_code = spec.exit_code;
    let mut hashed = bytes;
    if bless {
        if let Err(e) = std::fs::write(&expected_path, &out.stdout) {
            outcome.status = "bad_case".into();
            outcome.message = Some(e.to_string());
        } else {
            outcome.status = "blessed".into();
        }
        return (outcome, hashed);
    }
    match std::fs::read(&expected_path) {
        Ok(expected) => {
            hashed.extend_from_slice(&expected);
            let expected = String::from_utf8_lossy(&expected);
            if expected != out.stdout {
                outcome.status = "mismatch".into();
                outcome.diff = Some(first_difference(&expected, &out.stdout));
            } else if spec.exit_code.is_some_and(|c| c != out.code) {
                outcome.status = "mismatch".into();
                outcome.message = Some(format!("exit code {} instead of {}", out.code, spec.exit_code.unwrap_or(0)));
            }
        }
        Err(_) => {
            outcome.status = "missing_expected".into();
        }
    }
    (outcome, hashed)
}

/// Runs every case of `dir` on `threads` workers (all cores if None).
pub fn verify_suite(dir: &Path, threads: Option<usize>, bless: bool) -> Result<SuiteReport, CliError> {
    let cases = case_files(dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = at("threads", builder.build())?;
    let results: Vec<(CaseOutcome, Vec<u8>)> =
        pool.install(|| cases.par_iter().map(|(name, p)| run_case(name, p, bless)).collect());
    let mut warnings = Vec::new();
    if cases.is_empty() {
        warnings.push(format!("no cases found in {}", dir.display()));
    }
    let parts: Vec<&[u8]> = results.iter().map(|r| r.1.as_slice()).collect();
    let suite_sha256 = input_hash(&parts);
    let cases: Vec<CaseOutcome> = results.into_iter().map(|r| r.0).collect();
    let passed = cases.iter().filter(|c| c.status == "pass").count();
    Ok(SuiteReport { cases, passed, warnings, suite_sha256 })
}

pub(crate) fn verify_all(dir: &Path, threads: Option<usize>, bless: bool, s: &Settings) -> Result<Report, CliError> {
    let r = verify_suite(dir, threads, bless)?;
    let pass = r.pass();
    let hash = r.suite_sha256.clone();
    // the thread count is deliberately left out so reports agree across pools
    let mut report = Report::new("verify-all", s).with_input(hash);
    report.set_setting("bless", json!(bless));
    Ok(report.with_result(pass, json!(r)))
}
