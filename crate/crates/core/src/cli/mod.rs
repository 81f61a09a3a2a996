//! Command-line front end: `verify`, `kernel`, `riesz`, `density`, `list`.
//!
//! Exit status: 0 pass, 1 fail (or numerical failure), 2 inconclusive,
//! 64 usage error, 74 I/O error.

pub mod config;
pub mod experiments;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::kernels::{kernel, Case, KernelKind, Method};
use crate::spectral::{density_free_line, density_free_space, staircase_interval};
use crate::summability::{riesz_mean, SpectralMeasure};
use config::{ExperimentConfig, Grid};
use report::Table;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "spectral-cesaro", version, about = "Cesàro-Riesz summability and model Green kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a registered experiment.
    Verify {
        experiment: String,
        /// Flat `key = value` config file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for CSV/JSON artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Experiment parameters as `--key value`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Evaluate one kernel value as a CSV row.
    Kernel {
        kind: KernelKind,
        case: Case,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value = "closed_form")]
        method: Method,
    },
    /// Riesz means of a measure read from CSV (`lambda,weight_re,weight_im`).
    Riesz {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 0)]
        order: usize,
        /// A single value or a geometric grid `start:stop:count`.
        #[arg(long)]
        lambda: String,
    },
    /// Spectral density sweep: free-line, free-space, interval-staircase, weyl.
    Density {
        name: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 1)]
        dimension: usize,
        #[arg(long)]
        lambda: String,
    },
    /// List the registered experiments.
    List,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Parameter(_) | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Run the CLI on `args` (program name first) and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn lambdas(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        Ok(spec.parse::<Grid>()?.points())
    } else {
        let v = spec
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad λ {spec:?}")))?;
        Ok(vec![v])
    }
}

fn write_table(out: &mut dyn Write, t: &Table) -> Result<()> {
    out.write_all(&t.to_csv()?)?;
    Ok(())
}

/// Removes `--name v` or `--name=v` from trailing parameters; the last one wins.
fn take_flag(params: &mut Vec<String>, name: &str) -> Result<Option<String>> {
    let mut found = None;
    let mut i = 0;
    while i < params.len() {
        if params[i] == name {
            if i + 1 >= params.len() {
                return Err(Error::Parse(format!("flag {name} needs a value")));
            }
            found = Some(params.remove(i + 1));
            params.remove(i);
        } else if let Some(v) = params[i].strip_prefix(name).and_then(|r| r.strip_prefix('=')) {
            found = Some(v.to_string());
            params.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Verify {
            experiment,
            config,
            out: dir,
            mut params,
        } => {
            let config = take_flag(&mut params, "--config")?.map(PathBuf::from).or(config);
            let dir = take_flag(&mut params, "--out")?.map(PathBuf::from).or(dir);
            let mut cfg = match config {
                Some(p) => ExperimentConfig::from_path(p)?,
                None => ExperimentConfig::default(),
            };
            cfg.experiment = experiment;
            cfg.apply_flags(&params)?;
            if let Some(d) = dir {
                cfg.output = Some(d);
            }
            let report = experiments::run_experiment(&cfg)?;
            if let Some(d) = &cfg.output {
                report.write_artifacts(d)?;
            }
            writeln!(out, "{}", report.summary_json()?)?;
            writeln!(err, "{}: {}", report.experiment, report.verdict.name())?;
            Ok(report.verdict.exit_code())
        }
        Command::Kernel {
            kind,
            case,
            t,
            x,
            y,
            method,
        } => {
            let e = kernel(kind, case, t, x, y, method)?;
            let mut table = Table::new("kernel.csv", &["t", "x", "y", "re", "im", "method", "truncation"]);
            table.push([
                t.to_string(),
                x.to_string(),
                y.to_string(),
                e.value.re.to_string(),
                e.value.im.to_string(),
                e.method.to_string(),
                e.truncation.to_string(),
            ]);
            write_table(out, &table)?;
            Ok(EXIT_PASS)
        }
        Command::Riesz { measure, order, lambda } => {
            let m = SpectralMeasure::from_csv_path(&measure, None)?;
            let values = lambdas(&lambda)?
                .into_iter()
                .map(|l| riesz_mean(&m, order, l).map(|v| (l, v)))
                .collect::<Result<Vec<_>>>()?;
            let complex = values.iter().any(|(_, v)| v.im != 0.0);
            let mut table = if complex {
                Table::new("riesz.csv", &["lambda", "value", "value_im"])
            } else {
                Table::new("riesz.csv", &["lambda", "value"])
            };
            for (l, v) in values {
                if complex {
                    table.push([l, v.re, v.im]);
                } else {
                    table.push([l, v.re]);
                }
            }
            write_table(out, &table)?;
            Ok(EXIT_PASS)
        }
        Command::Density {
            name,
            x,
            y,
            dimension,
            lambda,
        } => {
            let mut table = Table::new("density.csv", &["lambda", "value"]);
            for l in lambdas(&lambda)? {
                let v = match name.as_str() {
                    "free-line" => density_free_line(x, y, l)?,
                    "free-space" => {
                        if dimension == 0 {
                            return Err(Error::param("dimension must be at least 1"));
                        }
                        let mut px = vec![0.0; dimension];
                        let mut py = vec![0.0; dimension];
                        px[0] = x;
                        py[0] = y;
                        density_free_space(&px, &py, l)?
                    }
                    "interval-staircase" => staircase_interval(x, y, l)?.value,
                    "weyl" => {
                        if l > 0.0 {
                            0.5 / (std::f64::consts::PI * l.sqrt())
                        } else {
                            0.0
                        }
                    }
                    other => {
                        return Err(Error::param(format!(
                            "unknown density {other:?} (free-line, free-space, interval-staircase, weyl)"
                        )))
                    }
                };
                table.push([l, v]);
            }
            write_table(out, &table)?;
            Ok(EXIT_PASS)
        }
        Command::List => {
            for e in experiments::REGISTRY {
                writeln!(out, "{:<22} {}", e.name, e.summary)?;
            }
            Ok(EXIT_PASS)
        }
    }
}
