// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Sweep results and their CSV form.
//!
//! ```text
//! # tool: tlrsim 0.1.0
//! # experiment: detector
//! # config_sha256: 5f0c…
//! # seed: 1
//! # authoritative: true
//! # timestamp: 2026-01-01T00:00:00Z
//! # config: {"tlr":{…},…}
//! gamma_over_kappa,efficiency,one_minus_eff,converged,t_final_s
//! 1.00000000e1,9.08256172e-1,…
//! ```
//!
//! Numbers use lowercase scientific notation with nine significant
//! digits. The timestamp line is the only line that changes between
//! identical runs.

use std::fmt::Write as _;

use crate::config::RunConfig;

pub const TIMESTAMP_PREFIX: &str = "# timestamp: ";

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Value {
    fn render(&self, out: &mut String) {
        match self {
            Value::Float(x) => out.push_str(&format_float(*x)),
            Value::Int(n) => write!(out, "{n}").expect("string write"),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Text(s) => out.push_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// `{:.8e}` with non-finite values spelled `nan`, `inf`, `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.8e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub columns: Vec<String>,
    /// Rows in grid order, first axis slowest.
    pub rows: Vec<Vec<Value>>,
    pub seed: u64,
    pub authoritative: bool,
    /// Emitted as `# warning:` lines.
    pub warnings: Vec<String>,
    /// Set when the sweep completed but its result counts as a failure.
    pub failure: Option<String>,
}

impl SweepResult {
    pub fn new(experiment: &str, columns: &[&str], seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
            seed,
            authoritative: true,
            warnings: Vec::new(),
            failure: None,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Float values of one column.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|r| match r[k] {
                Value::Float(x) => x,
                Value::Int(n) => n as f64,
                _ => f64::NAN,
            })
            .collect()
    }

    pub fn to_csv(&self, config: &RunConfig, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        writeln!(out, "# tool: tlrsim {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# experiment: {}", self.experiment).unwrap();
        writeln!(out, "# config_sha256: {}", config.sha256()).unwrap();
        writeln!(out, "# seed: {}", self.seed).unwrap();
        writeln!(out, "# authoritative: {}", self.authoritative).unwrap();
        for w in &self.warnings {
            writeln!(out, "# warning: {w}").unwrap();
        }
        if let Some(ts) = timestamp {
            writeln!(out, "{TIMESTAMP_PREFIX}{ts}").unwrap();
        }
        writeln!(out, "# config: {}", config.to_json()).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                v.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// Current UTC time as ISO-8601 with second resolution.
pub fn utc_timestamp() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// The text with its timestamp line removed.
pub fn strip_timestamp(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// The effective configuration embedded in a CSV header.
pub fn embedded_config(csv: &str) -> Option<&str> {
    csv.lines().find_map(|l| l.strip_prefix("# config: "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(1000.0), "1.00000000e3");
        assert_eq!(format_float(-0.00123456789), "-1.23456789e-3");
        assert_eq!(format_float(0.0), "0.00000000e0");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut r = SweepResult::new("demo", &["x", "n", "ok"], 7);
        r.push(vec![0.5.into(), 3u64.into(), true.into()]);
        let cfg = RunConfig::default();
        let text = r.to_csv(&cfg, Some("2026-01-01T00:00:00Z"));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            format!("# tool: tlrsim {}", env!("CARGO_PKG_VERSION"))
        );
        assert_eq!(lines[1], "# experiment: demo");
        assert!(lines[2].starts_with("# config_sha256: "));
        assert_eq!(lines[3], "# seed: 7");
        assert_eq!(lines[5], "# timestamp: 2026-01-01T00:00:00Z");
        assert_eq!(lines[7], "x,n,ok");
        assert_eq!(lines[8], "5.00000000e-1,3,true");
        assert_eq!(strip_timestamp(&text), r.to_csv(&cfg, None));
        assert_eq!(embedded_config(&text), Some(cfg.to_json().as_str()));
    }
}
