//! Verification suites, t-sweeps and report emission for the command line
//! and the Python bindings.
//!
//! JSON output is versioned by [`SCHEMA_VERSION`]; the layout is described in
//! `docs/report-schema.md`.

mod dashboard;
mod suites;
mod sweep;

pub use dashboard::{curvature_dashboard, CurvatureDashboard};
pub use suites::{run_verification_suite, SUITES};
pub use sweep::{parse_range, sweep, t_grid, Quantity, SweepConfig, SweepTable};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Whether the residual must stay below or above the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    #[serde(rename = "le")]
    AtMost,
    #[serde(rename = "ge")]
    AtLeast,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub suite: String,
    pub description: String,
    /// Name of the identity the check exercises.
    pub anchor: String,
    /// `None` when the computation itself failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// A name from [`SUITES`] or `all`.
    pub suite: String,
    pub seed: u64,
    /// Tolerance of the jet-exact identities; the other exact checks scale
    /// with it. Numeric-differentiation and Monte Carlo bounds are fixed.
    pub tol: f64,
    pub points: usize,
    pub mc_samples: usize,
    pub stable_output: bool,
    /// Swap in a deliberately broken closed form (negative control).
    #[serde(skip)]
    pub corrupt_closed_form: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suite: "all".into(),
            seed: 0,
            tol: 1e-8,
            points: 5,
            mc_samples: 100_000,
            stable_output: false,
            corrupt_closed_form: false,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.suite != "all" && !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::ConfigError(format!(
                "unknown suite '{}' (expected one of: all, {})",
                self.suite,
                SUITES.join(", ")
            )));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::ConfigError("tolerance must be positive".into()));
        }
        if self.points == 0 {
            return Err(Error::ConfigError("need at least one point".into()));
        }
        if self.mc_samples < 2 {
            return Err(Error::ConfigError("need at least two Monte Carlo samples".into()));
        }
        Ok(())
    }

    pub(crate) fn scaled(&self, default: f64) -> f64 {
        default * (self.tol / 1e-8)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: VerifyConfig,
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

impl VerificationReport {
    pub(crate) fn assemble(config: VerifyConfig, mut checks: Vec<CheckResult>, elapsed_ms: f64) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
        let stable = config.stable_output;
        if stable {
            checks.iter_mut().for_each(|c| c.elapsed_ms = None);
        }
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            tool: "gauduchon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            status: if failed > 0 { Status::Fail } else { Status::Pass },
            passed,
            failed,
            skipped,
            checks,
            elapsed_ms: if stable { None } else { Some(elapsed_ms) },
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Fail {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::ConfigError(format!("unknown format '{other}'"))),
        }
    }
}

fn fmt_residual(r: Option<f64>) -> String {
    r.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "error".into())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report).map_err(|e| Error::IoError(e.to_string()))? + "\n",
        Format::Csv => {
            let mut s = String::from("id,suite,status,residual,bound,tolerance,anchor\n");
            for c in &report.checks {
                let bound = if c.bound == Bound::AtMost { "le" } else { "ge" };
                let status = serde_json::to_value(c.status).unwrap();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:e},{}",
                    csv_field(&c.id),
                    csv_field(&c.suite),
                    status.as_str().unwrap_or(""),
                    c.residual.map(|r| format!("{r:e}")).unwrap_or_default(),
                    bound,
                    c.tolerance,
                    csv_field(&c.anchor)
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped => "SKIP",
                };
                let op = if c.bound == Bound::AtMost { "<=" } else { ">=" };
                let _ = write!(s, "{tag} {} residual {} {op} {:.1e}", c.id, fmt_residual(c.residual), c.tolerance);
                if let Some(d) = &c.detail {
                    let _ = write!(s, "  ({d})");
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "{} passed, {} failed, {} skipped: {}",
                report.passed,
                report.failed,
                report.skipped,
                if report.status == Status::Pass { "PASS" } else { "FAIL" }
            );
            s
        }
    })
}

pub fn emit_table(table: &SweepTable, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(table).map_err(|e| Error::IoError(e.to_string()))? + "\n",
        Format::Csv | Format::Text => {
            let sep = if format == Format::Csv { "," } else { "\t" };
            let npts = table.per_point.as_ref().map(|p| p.first().map_or(0, |r| r.len())).unwrap_or(0);
            let mut header = vec!["t".to_string(), table.quantity.clone()];
            header.extend((0..npts).map(|k| format!("p{k}")));
            let mut s = header.join(sep) + "\n";
            for (k, t) in table.t.iter().enumerate() {
                let mut row = vec![format!("{t}"), format!("{:e}", table.values[k])];
                if let Some(pp) = &table.per_point {
                    row.extend(pp[k].iter().map(|v| format!("{v:e}")));
                }
                s.push_str(&row.join(sep));
                s.push('\n');
            }
            s
        }
    })
}
