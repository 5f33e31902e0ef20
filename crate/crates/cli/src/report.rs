//! Experiment reports: named metric rows with targets, tolerances, and
//! mechanically derived verdicts, serialized as JSON or CSV.
//!
//! A verdict is a pure function of `(estimate, target, tolerance, check)`,
//! so stored reports can be re-judged without re-running anything:
//!
//! - `two_sided`: pass iff `|estimate - target| <= tolerance`
//! - `at_least`:  pass iff `estimate >= target - tolerance`
//! - `at_most`:   pass iff `estimate <= target + tolerance`
//! - `info`:      never judged
//!
//! A negative tolerance on a one-sided check tightens it into a strict
//! separation requirement (e.g. "exceeds the target by 3 standard errors").

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Informational => "INFORMATIONAL",
        }
    }
}

/// How a row's estimate is compared against its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    TwoSided,
    AtLeast,
    AtMost,
    Info,
}

impl Check {
    pub fn as_str(&self) -> &'static str {
        match self {
            Check::TwoSided => "two_sided",
            Check::AtLeast => "at_least",
            Check::AtMost => "at_most",
            Check::Info => "info",
        }
    }
}

/// One measured metric with its acceptance band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub metric: String,
    pub estimate: f64,
    pub se: f64,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub check: Check,
    pub verdict: Verdict,
}

impl Row {
    fn judged(
        metric: impl Into<String>,
        estimate: f64,
        se: f64,
        target: f64,
        tolerance: f64,
        check: Check,
    ) -> Self {
        let mut row = Row {
            metric: metric.into(),
            estimate,
            se,
            target: Some(target),
            tolerance: Some(tolerance),
            check,
            verdict: Verdict::Informational,
        };
        row.verdict = row.recompute_verdict();
        row
    }

    pub fn two_sided(
        metric: impl Into<String>,
        estimate: f64,
        se: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        Self::judged(metric, estimate, se, target, tolerance, Check::TwoSided)
    }

    pub fn at_least(
        metric: impl Into<String>,
        estimate: f64,
        se: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        Self::judged(metric, estimate, se, target, tolerance, Check::AtLeast)
    }

    pub fn at_most(
        metric: impl Into<String>,
        estimate: f64,
        se: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        Self::judged(metric, estimate, se, target, tolerance, Check::AtMost)
    }

    pub fn info(metric: impl Into<String>, estimate: f64, se: f64) -> Self {
        Row {
            metric: metric.into(),
            estimate,
            se,
            target: None,
            tolerance: None,
            check: Check::Info,
            verdict: Verdict::Informational,
        }
    }

    /// Re-derives the verdict from the stored fields.
    pub fn recompute_verdict(&self) -> Verdict {
        let (Some(target), Some(tolerance)) = (self.target, self.tolerance) else {
            return Verdict::Informational;
        };
        let pass = match self.check {
            Check::TwoSided => (self.estimate - target).abs() <= tolerance,
            Check::AtLeast => self.estimate >= target - tolerance,
            Check::AtMost => self.estimate <= target + tolerance,
            Check::Info => return Verdict::Informational,
        };
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A named experiment run: parameters, seed, metric rows, wall-clock time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub rows: Vec<Row>,
    pub duration_ms: u64,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            params: BTreeMap::new(),
            seed,
            rows: Vec::new(),
            duration_ms: 0,
        }
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.duration_ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn has_failure(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }

    /// Copy with the volatile wall-clock field zeroed; used for file
    /// output so identical configurations produce identical bytes.
    pub fn deterministic(&self) -> Self {
        let mut copy = self.clone();
        copy.duration_ms = 0;
        copy
    }

    pub fn row(&self, metric: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

/// Pretty-printed JSON array of reports, trailing newline, UTF-8/LF.
pub fn reports_to_json(reports: &[ExperimentReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

fn csv_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Flat CSV: one header line, then one line per row across all reports.
pub fn reports_to_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("experiment,seed,metric,estimate,se,target,tolerance,check,verdict\n");
    for report in reports {
        for row in &report.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                report.experiment,
                report.seed,
                row.metric,
                row.estimate,
                row.se,
                csv_opt(row.target),
                csv_opt(row.tolerance),
                row.check.as_str(),
                row.verdict.as_str(),
            ));
        }
    }
    out
}
