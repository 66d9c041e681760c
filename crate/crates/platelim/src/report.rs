//! Run artifacts: displacement CSV files and JSON reports.
//!
//! The CSV schema is one node per row, row-major (`x` fastest), with the
//! exact header `x,y,u1,u2,v` and every value printed as `{:.16e}` — 17
//! significant digits, so a write/read cycle restores each `f64` bit for
//! bit and identical runs produce identical bytes.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Regime;
use crate::gamma::ConvergenceTable;
use crate::grid::{DisplacementField, Grid2D};
use crate::minimize::{CurvatureStats, MinimizeResult, SweepReport};
use crate::relaxation::EffectiveForms;

/// Exact header of a displacement CSV file.
pub const FIELDS_HEADER: &str = "x,y,u1,u2,v";

/// Render displacement fields to CSV text.
pub fn fields_csv_string(grid: &Grid2D, fields: &DisplacementField) -> String {
    let mut out = String::with_capacity(96 * grid.node_count());
    out.push_str(FIELDS_HEADER);
    out.push('\n');
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let n = grid.node(i, j);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                grid.node_x(i),
                grid.node_y(j),
                fields.u1[n],
                fields.u2[n],
                fields.v[n]
            ));
        }
    }
    out
}

pub fn write_fields_csv(
    path: impl AsRef<Path>,
    grid: &Grid2D,
    fields: &DisplacementField,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, fields_csv_string(grid, fields)).map_err(|e| Error::io(path, e))
}

/// Parse displacement CSV text against the expected grid. The header and
/// the node coordinates must match; anything else is a `fields` error.
pub fn parse_fields_csv(text: &str, grid: &Grid2D) -> Result<DisplacementField> {
    let mut lines = text.lines();
    match lines.next().map(str::trim_end) {
        Some(FIELDS_HEADER) => {}
        other => {
            return Err(Error::Fields(format!(
                "expected header `{FIELDS_HEADER}`, found {other:?}"
            )))
        }
    }
    let mut fields = DisplacementField::zeros(grid);
    let mut row = 0usize;
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if row >= grid.node_count() {
            return Err(Error::Fields(format!(
                "too many rows: grid has {} nodes",
                grid.node_count()
            )));
        }
        let mut cols = [0.0f64; 5];
        let mut parts = line.split(',');
        for c in cols.iter_mut() {
            let tok = parts
                .next()
                .ok_or_else(|| Error::Fields(format!("row {row}: expected 5 columns")))?;
            *c = tok
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Fields(format!("row {row}: bad number `{tok}`: {e}")))?;
            if !c.is_finite() {
                return Err(Error::Fields(format!("row {row}: non-finite value `{tok}`")));
            }
        }
        if parts.next().is_some() {
            return Err(Error::Fields(format!("row {row}: expected 5 columns")));
        }
        let (i, j) = (row % grid.nx(), row / grid.nx());
        let (gx, gy) = (grid.node_x(i), grid.node_y(j));
        if (cols[0] - gx).abs() > 1e-9 * (1.0 + gx.abs())
            || (cols[1] - gy).abs() > 1e-9 * (1.0 + gy.abs())
        {
            return Err(Error::Fields(format!(
                "row {row}: coordinates ({}, {}) do not match the grid node ({gx}, {gy})",
                cols[0], cols[1]
            )));
        }
        let n = grid.node(i, j);
        fields.u1[n] = cols[2];
        fields.u2[n] = cols[3];
        fields.v[n] = cols[4];
        row += 1;
    }
    if row != grid.node_count() {
        return Err(Error::Fields(format!(
            "expected {} rows, found {row}",
            grid.node_count()
        )));
    }
    fields.validate(grid)?;
    Ok(fields)
}

pub fn read_fields_csv(path: impl AsRef<Path>, grid: &Grid2D) -> Result<DisplacementField> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fields_csv(&text, grid)
}

/// Serialize any report to pretty JSON (one trailing newline).
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// report shapes

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvatureJson {
    pub det_residual: f64,
    pub dist_to_identity: f64,
    pub principal_ratio: f64,
}

impl From<CurvatureStats> for CurvatureJson {
    fn from(c: CurvatureStats) -> Self {
        CurvatureJson {
            det_residual: c.det_residual,
            dist_to_identity: c.dist_to_identity,
            principal_ratio: c.principal_ratio,
        }
    }
}

/// Result of one energy evaluation or minimization.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub energy: f64,
    pub regime: String,
    pub theta: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub curvature: CurvatureJson,
}

impl RunReport {
    pub fn from_result(regime: &Regime, r: &MinimizeResult) -> Self {
        RunReport {
            energy: r.energy,
            regime: regime.tag().to_string(),
            theta: regime.theta(),
            iterations: r.iterations,
            converged: r.converged,
            curvature: r.curvature.into(),
        }
    }

    /// A plain evaluation: no iterations ran, the value is exact.
    pub fn from_evaluation(regime: &Regime, energy: f64, curvature: CurvatureStats) -> Self {
        RunReport {
            energy,
            regime: regime.tag().to_string(),
            theta: regime.theta(),
            iterations: 0,
            converged: true,
            curvature: curvature.into(),
        }
    }
}

/// The effective quadratic forms of a homogenized stack.
#[derive(Clone, Debug, Serialize)]
pub struct MomentsReport {
    pub q00: [[f64; 3]; 3],
    pub q01: [[f64; 3]; 3],
    pub q11: [[f64; 3]; 3],
    pub l0: [[f64; 2]; 2],
    pub l1: [[f64; 2]; 2],
    pub c_const: f64,
}

impl From<&EffectiveForms> for MomentsReport {
    fn from(eff: &EffectiveForms) -> Self {
        let sym = |s: &crate::tensor::SymMat2| [[s.xx, s.xy], [s.xy, s.yy]];
        MomentsReport {
            q00: eff.q00,
            q01: eff.q01,
            q11: eff.q11,
            l0: sym(&eff.l0),
            l1: sym(&eff.l1),
            c_const: eff.c_const,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRowJson {
    pub theta: f64,
    pub energy: f64,
    pub start: String,
    pub iterations: usize,
    pub converged: bool,
    pub curvature: CurvatureJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepJson {
    pub rows: Vec<SweepRowJson>,
}

impl From<&SweepReport> for SweepJson {
    fn from(rep: &SweepReport) -> Self {
        SweepJson {
            rows: rep
                .rows
                .iter()
                .map(|r| SweepRowJson {
                    theta: r.theta,
                    energy: r.result.energy,
                    start: r.start.clone(),
                    iterations: r.result.iterations,
                    converged: r.result.converged,
                    curvature: r.result.curvature.into(),
                })
                .collect(),
        }
    }
}

/// CSV table of a theta sweep.
pub fn sweep_table_csv(rep: &SweepReport) -> String {
    let mut out = String::from(
        "theta,energy,start,iterations,converged,det_residual,dist_to_identity,principal_ratio\n",
    );
    for r in &rep.rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{},{},{},{:.16e},{:.16e},{:.16e}\n",
            r.theta,
            r.result.energy,
            r.start,
            r.result.iterations,
            r.result.converged,
            r.result.curvature.det_residual,
            r.result.curvature.dist_to_identity,
            r.result.curvature.principal_ratio
        ));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaRowJson {
    pub h: f64,
    pub energy: f64,
    pub error: f64,
    pub ph_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaJson {
    pub regime: String,
    pub theta: Option<f64>,
    pub preset: String,
    pub limit: f64,
    pub rate: f64,
    pub rows: Vec<GammaRowJson>,
}

impl GammaJson {
    pub fn new(regime: &Regime, preset: &str, table: &ConvergenceTable) -> Self {
        GammaJson {
            regime: regime.tag().to_string(),
            theta: regime.theta(),
            preset: preset.to_string(),
            limit: table.limit,
            rate: table.rate,
            rows: table
                .rows
                .iter()
                .map(|r| GammaRowJson {
                    h: r.h,
                    energy: r.energy,
                    error: r.error,
                    ph_error: r.ph_error,
                })
                .collect(),
        }
    }
}

/// CSV table of a convergence study.
pub fn gamma_table_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("h,energy,error,ph_error\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.h, r.energy, r.error, r.ph_error
        ));
    }
    out
}
