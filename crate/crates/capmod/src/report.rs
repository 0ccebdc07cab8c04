//! Structured results of studies and verification suites. Reports serialize
//! deterministically: fixed field order, sorted parameter keys, and no
//! wall-clock content (runtime is kept in memory only, so identical inputs
//! produce byte-identical files).

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const REPORT_SCHEMA: &str = "capmod/report/1";

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn approx(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            expected: json!(expected),
            actual: json!(actual),
            tolerance,
            pass: (expected - actual).abs() <= tolerance,
        }
    }

    pub fn at_most(name: impl Into<String>, actual: f64, bound: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            expected: json!(format!("<= {bound}")),
            actual: json!(actual),
            tolerance,
            pass: actual <= bound + tolerance,
        }
    }

    pub fn is_true(name: impl Into<String>, actual: bool) -> Self {
        CheckRecord {
            name: name.into(),
            expected: json!(true),
            actual: json!(actual),
            tolerance: 0.0,
            pass: actual,
        }
    }

    pub fn info(name: impl Into<String>, value: Value) -> Self {
        CheckRecord {
            name: name.into(),
            expected: json!("reported"),
            actual: value,
            tolerance: 0.0,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub scenario: String,
    /// Names the phenomenon the scenario reproduces.
    pub anchor: String,
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(skip)]
    pub runtime: Duration,
}

impl Report {
    pub fn assemble(
        scenario: impl Into<String>,
        anchor: impl Into<String>,
        parameters: BTreeMap<String, Value>,
        checks: Vec<CheckRecord>,
        runtime: Duration,
    ) -> Report {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            schema: REPORT_SCHEMA,
            scenario: scenario.into(),
            anchor: anchor.into(),
            parameters,
            checks,
            pass,
            runtime,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,expected,actual,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&c.name),
                csv_field(&c.expected.to_string()),
                csv_field(&c.actual.to_string()),
                c.tolerance,
                c.pass
            ));
        }
        out
    }

    /// Writes `<base>.json` and `<base>.csv` next to each other.
    pub fn write(&self, base: &std::path::Path) -> Result<()> {
        std::fs::write(base.with_extension("json"), self.to_json())?;
        std::fs::write(base.with_extension("csv"), self.to_csv())?;
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
