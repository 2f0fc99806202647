use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, Settings, DEFAULT_CUTOFF, DEFAULT_MAX_B_DEGREE};

/// One command's report. Keys serialize in sorted order, so identical inputs
/// give identical bytes.
#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    settings: Map<String, Value>,
    input_sha256: Option<String>,
    pass: bool,
    result: Value,
    error: Option<Value>,
}

/// Canonical rendering: two-space indentation, sorted keys, trailing newline.
pub fn canonical_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("report serializes");
    out.push(b'\n');
    out
}

fn base_settings(s: &Settings) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("window".into(), json!([s.window.lo, s.window.hi]));
    m.insert("seed".into(), json!(s.seed));
    m.insert("samples".into(), json!(s.samples));
    m.insert("cutoff".into(), json!(s.cutoff.unwrap_or(DEFAULT_CUTOFF)));
    m.insert("max_b_degree".into(), json!(s.max_b_degree.unwrap_or(DEFAULT_MAX_B_DEGREE)));
    m
}

/// Hex SHA-256 over the concatenated input documents.
pub fn input_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn new(command: &str, settings: &Settings) -> Self {
        Report {
            command: command.to_string(),
            settings: base_settings(settings),
            input_sha256: None,
            pass: true,
            result: Value::Null,
            error: None,
        }
    }

    pub fn error(command: &str, settings: &Settings, e: &CliError) -> Self {
        let mut r = Report::new(command, settings);
        r.pass = false;
        r.error = Some(json!({"kind": e.kind(), "path": e.path(), "message": e.to_string()}));
        r
    }

    pub fn with_result(mut self, pass: bool, result: Value) -> Self {
        self.pass = pass;
        self.result = result;
        self
    }

    pub fn with_input(mut self, hash: String) -> Self {
        self.input_sha256 = Some(hash);
        self
    }

    pub fn set_setting(&mut self, key: &str, v: Value) {
        self.settings.insert(key.to_string(), v);
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    pub fn result(&self) -> &Value {
        &self.result
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("tool".into(), json!({"name": "bvkit", "version": env!("CARGO_PKG_VERSION")}));
        m.insert("settings".into(), Value::Object(self.settings.clone()));
        m.insert("input_sha256".into(), json!(self.input_sha256));
        m.insert("pass".into(), json!(self.pass));
        match &self.error {
            Some(e) => {
                m.insert("error".into(), e.clone());
            }
            None => {
                m.insert("result".into(), self.result.clone());
            }
        }
        Value::Object(m)
    }

    pub fn summary(&self) -> String {
        match &self.error {
            Some(e) => format!("{}: error: {}", self.command, e["message"].as_str().unwrap_or("")),
            None => format!("{}: {}", self.command, if self.pass { "pass" } else { "FAIL" }),
        }
    }
}
