use crate::chern::{chern_package, ric1_closedness_exact};
use crate::error::{Error, Result};
use crate::gauduchon::{curvature_closed_form, hsc_extrema, torsion_decomposition, torsion_norm2};
use crate::jets::{evaluate_jet, ChartPoint, MetricField};
use crate::tensorcore::{CMat, LabeledTensor, C64};
use serde::Serialize;
use std::fmt::Write as _;

type Rows = Vec<Vec<C64>>;

fn rows(m: &CMat) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn tensor_rows(t: &LabeledTensor) -> Rows {
    rows(&t.to_matrix())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernSummary {
    pub torsion_max: f64,
    pub kahler: bool,
    /// Unitary frame.
    pub ricci: [Rows; 4],
    pub scal: f64,
    pub scal_tilde: f64,
    pub bianchi_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GauduchonSummary {
    pub t: f64,
    /// Unitary frame.
    pub ricci: [Rows; 4],
    pub scal: f64,
    pub scal_tilde: f64,
    pub hsc_min: f64,
    pub hsc_max: f64,
    pub torsion_norm2: f64,
    pub torsion_decomposition_residual: f64,
    pub r20_max: f64,
}

/// Everything the `curvature` command prints for one point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureDashboard {
    pub model: String,
    pub n: usize,
    pub point: Vec<C64>,
    pub order: usize,
    pub metric: Rows,
    pub chern: ChernSummary,
    pub gauduchon: GauduchonSummary,
    /// Only with jets of order 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ric1_closedness: Option<f64>,
}

pub fn curvature_dashboard(field: &MetricField, p: &ChartPoint, t: f64, order: usize) -> Result<CurvatureDashboard> {
    if !(2..=3).contains(&order) {
        return Err(Error::ConfigError(format!("order must be 2 or 3, got {order}")));
    }
    let jet = evaluate_jet(field, p, order)?;
    let pkg = chern_package(&jet)?;
    let c = curvature_closed_form(t, &pkg)?;
    let ext = hsc_extrema(field, std::slice::from_ref(p), t, 4, 0)?;
    let chern = ChernSummary {
        torsion_max: pkg.torsion.max_abs(),
        kahler: pkg.is_kahler(1e-10),
        ricci: std::array::from_fn(|k| tensor_rows(&pkg.in_frame(&pkg.ricci[k]))),
        scal: pkg.scal,
        scal_tilde: pkg.scal_tilde,
        bianchi_residual: pkg.bianchi_residual(),
    };
    let gauduchon = GauduchonSummary {
        t,
        ricci: std::array::from_fn(|k| tensor_rows(&c.ricci[k])),
        scal: c.scal,
        scal_tilde: c.scal_tilde,
        hsc_min: ext.min,
        hsc_max: ext.max,
        torsion_norm2: torsion_norm2(t, &jet)?,
        torsion_decomposition_residual: torsion_decomposition(t, &jet)?.max_residual(),
        r20_max: c.r20.max_abs(),
    };
    Ok(CurvatureDashboard {
        model: field.name(),
        n: pkg.n,
        point: p.z.clone(),
        order,
        metric: rows(pkg.metric.matrix()),
        chern,
        gauduchon,
        ric1_closedness: if order >= 3 { Some(ric1_closedness_exact(&jet)?) } else { None },
    })
}

fn fmt_c(z: C64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn write_matrix(s: &mut String, title: &str, m: &Rows) {
    let _ = writeln!(s, "{title}:");
    for r in m {
        let cells: Vec<String> = r.iter().map(|z| fmt_c(*z)).collect();
        let _ = writeln!(s, "  [{}]", cells.join(", "));
    }
}

impl CurvatureDashboard {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pt: Vec<String> = self.point.iter().map(|z| fmt_c(*z)).collect();
        let _ = writeln!(s, "model {}  n = {}  jet order {}", self.model, self.n, self.order);
        let _ = writeln!(s, "point ({})", pt.join(", "));
        write_matrix(&mut s, "metric g", &self.metric);
        let c = &self.chern;
        let _ = writeln!(s, "\nChern connection");
        let _ = writeln!(s, "  max |T| = {:.3e}  kahler = {}  bianchi residual = {:.3e}", c.torsion_max, c.kahler, c.bianchi_residual);
        let _ = writeln!(s, "  Scal = {:.9}  Scal~ = {:.9}", c.scal, c.scal_tilde);
        for (k, m) in c.ricci.iter().enumerate() {
            write_matrix(&mut s, &format!("  Ric{} (unitary frame)", k + 1), m);
        }
        let g = &self.gauduchon;
        let _ = writeln!(s, "\nGauduchon connection t = {}", g.t);
        let _ = writeln!(s, "  Scal = {:.9}  Scal~ = {:.9}", g.scal, g.scal_tilde);
        let _ = writeln!(s, "  HSC in [{:.9}, {:.9}] (sampled)", g.hsc_min, g.hsc_max);
        let _ = writeln!(s, "  |T|^2 = {:.9}  decomposition residual = {:.3e}", g.torsion_norm2, g.torsion_decomposition_residual);
        let _ = writeln!(s, "  max |R20| = {:.3e}", g.r20_max);
        for (k, m) in g.ricci.iter().enumerate() {
            write_matrix(&mut s, &format!("  Ric{} (unitary frame)", k + 1), m);
        }
        if let Some(d) = self.ric1_closedness {
            let _ = writeln!(s, "\nd(Ric1) defect = {d:.3e}");
        }
        s
    }
}
