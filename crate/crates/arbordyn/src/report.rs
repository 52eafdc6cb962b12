//! Deterministic experiment reports: exact values as "p/q" strings, real
//! values with explicit tolerances, one pass/fail record per assertion.

use crate::rational::{rat_string, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    /// Tolerance the comparison used; "exact" for rational equality.
    pub tolerance: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub inputs: BTreeMap<String, String>,
    pub values: BTreeMap<String, String>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub runtime_ms: u128,
}

/// Builder that timestamps itself on creation and freezes the runtime when
/// finished. Iteration order of maps is alphabetical, so serialized output
/// is byte-stable for fixed inputs.
pub struct ReportBuilder {
    report: ExperimentReport,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(experiment: &str) -> Self {
        ReportBuilder {
            report: ExperimentReport {
                experiment: experiment.to_string(),
                inputs: BTreeMap::new(),
                values: BTreeMap::new(),
                assertions: Vec::new(),
                passed: true,
                runtime_ms: 0,
            },
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.report.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn value_rat(&mut self, key: &str, value: &Rat) -> &mut Self {
        self.report.values.insert(key.to_string(), rat_string(value));
        self
    }

    pub fn value_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.report.values.insert(key.to_string(), format!("{value:.12}"));
        self
    }

    pub fn value_str(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.report.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn check_exact(&mut self, name: &str, passed: bool, detail: impl ToString) -> &mut Self {
        self.check(name, passed, "exact", detail)
    }

    pub fn check_tol(
        &mut self,
        name: &str,
        got: f64,
        want: f64,
        tol: f64,
    ) -> &mut Self {
        let passed = (got - want).abs() <= tol;
        self.check(name, passed, &format!("{tol:e}"), format!("got {got}, want {want}"))
    }

    pub fn check(
        &mut self,
        name: &str,
        passed: bool,
        tolerance: &str,
        detail: impl ToString,
    ) -> &mut Self {
        self.report.passed &= passed;
        self.report.assertions.push(Assertion {
            name: name.to_string(),
            passed,
            tolerance: tolerance.to_string(),
            detail: detail.to_string(),
        });
        self
    }

    pub fn finish(mut self) -> ExperimentReport {
        self.report.runtime_ms = self.started.elapsed().as_millis();
        self.report
    }
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering: one line per assertion, then the verdict.
    pub fn to_table(&self) -> String {
        let mut out = format!("experiment: {}\n", self.experiment);
        for (k, v) in &self.inputs {
            out.push_str(&format!("input  {k} = {v}\n"));
        }
        for (k, v) in &self.values {
            out.push_str(&format!("value  {k} = {v}\n"));
        }
        for a in &self.assertions {
            out.push_str(&format!(
                "{} {} (tol {}) {}\n",
                if a.passed { "PASS" } else { "FAIL" },
                a.name,
                a.tolerance,
                a.detail
            ));
        }
        out.push_str(&format!(
            "{}: {} assertions, {} ms\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.assertions.len(),
            self.runtime_ms
        ));
        out
    }
}
