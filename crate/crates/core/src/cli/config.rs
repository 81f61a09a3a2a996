//! Flat `key = value` experiment configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::geometric_grid;

/// Geometric grid written `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::param(format!("grid needs at least 2 points, got {count}")));
        }
        if !(start > 0.0) || !(start < stop) || !stop.is_finite() {
            return Err(Error::param(format!("grid needs 0 < start < stop, got {start}:{stop}")));
        }
        Ok(Grid { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        geometric_grid(self.start, self.stop, self.count)
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid must be start:stop:count, got {s:?}")));
        }
        let num = |p: &str| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad grid bound {p:?}")));
        let count = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad grid count {:?}", parts[2])))?;
        Grid::new(num(parts[0])?, num(parts[1])?, count)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Where CSV and JSON artifacts go; nothing is written when absent.
    pub output: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

fn normalise(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-").to_ascii_lowercase()
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentConfig {
            experiment: experiment.into(),
            ..Default::default()
        }
    }

    /// Parse `key = value` lines; `#` starts a comment. The keys
    /// `experiment` and `output` fill the dedicated fields.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got {raw:?}", no + 1)))?;
            cfg.set(k, v.trim());
        }
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        let key = normalise(key);
        match key.as_str() {
            "experiment" => self.experiment = value.to_string(),
            "output" => self.output = Some(PathBuf::from(value)),
            _ => {
                self.values.insert(key, value.to_string());
            }
        }
    }

    /// Apply `--key value` (or `--key=value`) pairs.
    pub fn apply_flags(&mut self, flags: &[String]) -> Result<()> {
        let mut i = 0;
        while i < flags.len() {
            let f = &flags[i];
            if !f.starts_with("--") {
                return Err(Error::Parse(format!("expected --key, got {f:?}")));
            }
            if let Some((k, v)) = f.split_once('=') {
                self.set(k, v);
                i += 1;
            } else {
                let v = flags
                    .get(i + 1)
                    .ok_or_else(|| Error::Parse(format!("flag {f} needs a value")))?;
                self.set(f, v);
                i += 2;
            }
        }
        Ok(())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("cannot parse {key} = {v:?}"))),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.parsed(key, default)?;
        if !v.is_finite() {
            return Err(Error::param(format!("{key} must be finite")));
        }
        Ok(v)
    }

    /// A strictly positive tolerance.
    pub fn tolerance(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key, default)?;
        if !(v > 0.0) {
            return Err(Error::param(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.parsed(key, default)
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        self.parsed(key, default)
    }

    pub fn grid(&self, key: &str, default: Grid) -> Result<Grid> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse(),
        }
    }

    /// Reject keys outside `known`, which catches misspelt flags.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for k in self.keys() {
            if !known.contains(&k) {
                return Err(Error::param(format!(
                    "experiment {} has no parameter {k:?} (known: {})",
                    self.experiment,
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_file_and_flags() {
        let mut c = ExperimentConfig::parse("experiment = theta-sum\n# comment\neps_grid = 1e-3:1e-1:12\n").unwrap();
        assert_eq!(c.experiment, "theta-sum");
        let g = c.grid("eps-grid", Grid::new(1.0, 2.0, 2).unwrap()).unwrap();
        assert_eq!(g.count, 12);
        c.apply_flags(&["--tol".into(), "1e-9".into(), "--t=0.5".into()]).unwrap();
        assert_eq!(c.tolerance("tol", 1.0).unwrap(), 1e-9);
        assert_eq!(c.f64("t", 0.0).unwrap(), 0.5);
        assert!(c.check_keys(&["eps-grid", "tol"]).is_err());
        assert!(c.check_keys(&["eps-grid", "tol", "t"]).is_ok());
    }

    #[test]
    fn grid_rules() {
        assert!("1:2:1".parse::<Grid>().is_err());
        assert!("2:1:5".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
        let g: Grid = "1e-4:1e-1:4".parse().unwrap();
        assert_eq!(g.points().len(), 4);
    }

    #[test]
    fn bad_values() {
        let mut c = ExperimentConfig::new("x");
        c.set("tol", "-1");
        assert!(c.tolerance("tol", 1.0).is_err());
        assert!(ExperimentConfig::parse("no equals sign").is_err());
    }
}
