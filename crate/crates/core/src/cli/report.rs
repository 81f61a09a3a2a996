//! Experiment reports and their CSV/JSON artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// One checked quantity: `|value − reference| ≤ tolerance`, or for
/// threshold checks `value ≥ reference` (then `tolerance` is unused and
/// `error` is the shortfall).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub parameter: f64,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Probe {
    /// `|value − reference| ≤ tolerance`.
    pub fn close(name: impl Into<String>, parameter: f64, value: f64, reference: f64, tolerance: f64) -> Self {
        let error = (value - reference).abs();
        Probe {
            name: name.into(),
            parameter,
            value,
            reference,
            error,
            tolerance,
            pass: error <= tolerance,
        }
    }

    /// `value < bound`.
    pub fn below(name: impl Into<String>, parameter: f64, value: f64, bound: f64) -> Self {
        Probe {
            name: name.into(),
            parameter,
            value,
            reference: 0.0,
            error: value.abs(),
            tolerance: bound,
            pass: value.abs() < bound,
        }
    }

    /// `value ≥ threshold`.
    pub fn at_least(name: impl Into<String>, parameter: f64, value: f64, threshold: f64) -> Self {
        Probe {
            name: name.into(),
            parameter,
            value,
            reference: threshold,
            error: (threshold - value).max(0.0),
            tolerance: 0.0,
            pass: value >= threshold,
        }
    }

    /// A yes/no check.
    pub fn flag(name: impl Into<String>, parameter: f64, pass: bool) -> Self {
        Probe {
            name: name.into(),
            parameter,
            value: if pass { 1.0 } else { 0.0 },
            reference: 1.0,
            error: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
        }
    }
}

/// A CSV data file: header plus rows of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: impl Into<String>, header: &[&str]) -> Self {
        Table {
            file: file.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub verdict: Outcome,
    pub probes: Vec<Probe>,
    pub slopes: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Extra JSON artifacts as `(file name, contents)`.
    #[serde(skip)]
    pub documents: Vec<(String, String)>,
    /// Set when the underlying test could not decide either way.
    #[serde(skip)]
    pub undecided: bool,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            verdict: Outcome::Inconclusive,
            probes: Vec::new(),
            slopes: BTreeMap::new(),
            notes: Vec::new(),
            wall_time_s: 0.0,
            tables: Vec::new(),
            documents: Vec::new(),
            undecided: false,
        }
    }

    pub fn probe(&mut self, p: Probe) {
        self.probes.push(p);
    }

    /// Pass iff every probe passed; inconclusive when flagged undecided
    /// and nothing failed outright.
    pub fn finish(&mut self) {
        let all = !self.probes.is_empty() && self.probes.iter().all(|p| p.pass);
        self.verdict = if self.undecided {
            Outcome::Inconclusive
        } else if all {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
    }

    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::error::Error::Parse(e.to_string()))
    }

    /// Write every table as CSV and the summary as `<experiment>.json`
    /// into `dir`, returning the written paths.
    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            let p = dir.join(&t.file);
            fs::write(&p, t.to_csv()?)?;
            out.push(p);
        }
        for (file, text) in &self.documents {
            let p = dir.join(file);
            fs::write(&p, text)?;
            out.push(p);
        }
        let p = dir.join(format!("{}.json", self.experiment));
        fs::write(&p, self.summary_json()?)?;
        out.push(p);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let mut r = ExperimentReport::new("x");
        r.probe(Probe::close("a", 1.0, 1.0, 1.0 + 1e-12, 1e-10));
        r.finish();
        assert_eq!(r.verdict, Outcome::Pass);
        r.probe(Probe::at_least("slope", 0.0, 2.0, 3.0));
        r.finish();
        assert_eq!(r.verdict, Outcome::Fail);
        assert_eq!(r.verdict.exit_code(), 1);
        let mut e = ExperimentReport::new("y");
        e.finish();
        assert_eq!(e.verdict, Outcome::Fail);
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new("a.csv", &["lambda", "value"]);
        t.push([1.5, 2.0]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "lambda,value\n1.5,2\n");
    }
}
