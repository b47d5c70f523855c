use super::suites::point_seed;
use crate::chern::chern_package;
use crate::error::{Error, Result};
use crate::gauduchon::{curvature_closed_form, hsc_extrema, torsion_norm2};
use crate::jets::{evaluate_jet, ChartPoint, MetricField};
use crate::models::{build_model, sample_points, ModelSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Frobenius norm of tRic1 in the unitary frame.
    Ric1Norm,
    Scal,
    ScalTilde,
    HscMin,
    HscMax,
    /// `|T(tnabla)|^2`.
    TorsionNorm,
}

impl Quantity {
    pub const ALL: [Quantity; 6] =
        [Quantity::Ric1Norm, Quantity::Scal, Quantity::ScalTilde, Quantity::HscMin, Quantity::HscMax, Quantity::TorsionNorm];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ric1Norm => "ric1_norm",
            Quantity::Scal => "scal",
            Quantity::ScalTilde => "scal_tilde",
            Quantity::HscMin => "hsc_min",
            Quantity::HscMax => "hsc_max",
            Quantity::TorsionNorm => "torsion_norm",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| {
            let names: Vec<_> = Quantity::ALL.iter().map(|q| q.name()).collect();
            Error::ConfigError(format!("unknown quantity '{s}' (expected one of: {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub quantity: Quantity,
    pub grid: Vec<f64>,
    pub points: usize,
    pub seed: u64,
    /// Also report the value at every sample point.
    pub breakdown: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub model: String,
    pub quantity: String,
    pub t: Vec<f64>,
    /// Mean over the points; for `hsc_min`/`hsc_max` the extremum over them.
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_point: Option<Vec<Vec<f64>>>,
}

/// Parse `a:b:step`.
pub fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::ConfigError(format!("range '{s}' is not of the form a:b:step")));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::ConfigError(format!("'{p}' in range '{s}' is not a number")));
    Ok((num(parts[0])?, num(parts[1])?, num(parts[2])?))
}

/// Inclusive grid from `a` to `b`; empty when `a > b`.
pub fn t_grid(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(Error::ConfigError("range needs finite ends and a positive step".into()));
    }
    if a > b {
        return Ok(Vec::new());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::ConfigError(format!("range has {count} values, more than 10^6")));
    }
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

fn point_value(field: &MetricField, p: &ChartPoint, q: Quantity, t: f64, seed: u64) -> Result<f64> {
    match q {
        Quantity::HscMin | Quantity::HscMax => {
            let e = hsc_extrema(field, std::slice::from_ref(p), t, 4, seed)?;
            Ok(if q == Quantity::HscMin { e.min } else { e.max })
        }
        Quantity::TorsionNorm => torsion_norm2(t, &evaluate_jet(field, p, 1)?),
        _ => {
            let pkg = chern_package(&evaluate_jet(field, p, 2)?)?;
            let c = curvature_closed_form(t, &pkg)?;
            Ok(match q {
                Quantity::Ric1Norm => c.ricci[0].norm(),
                Quantity::Scal => c.scal,
                _ => c.scal_tilde,
            })
        }
    }
}

pub fn sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.points == 0 {
        return Err(Error::ConfigError("need at least one point".into()));
    }
    let field = build_model(&cfg.model)?;
    let points = sample_points(&cfg.model, cfg.points, point_seed(cfg.seed, &cfg.model.label()));
    let rows: Vec<Vec<f64>> = cfg
        .grid
        .par_iter()
        .map(|&t| points.iter().map(|p| point_value(&field, p, cfg.quantity, t, cfg.seed)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let values = rows
        .iter()
        .map(|r| match cfg.quantity {
            Quantity::HscMin => r.iter().cloned().fold(f64::INFINITY, f64::min),
            Quantity::HscMax => r.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            _ => r.iter().sum::<f64>() / r.len() as f64,
        })
        .collect();
    Ok(SweepTable {
        model: cfg.model.label(),
        quantity: cfg.quantity.name().into(),
        t: cfg.grid.clone(),
        values,
        per_point: cfg.breakdown.then_some(rows),
    })
}
