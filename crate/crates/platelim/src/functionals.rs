//! Finite-difference discretization of the three limit plate energies.
//!
//! All three functionals integrate the homogenised quadratic form over the
//! midplane with the membrane/bending arguments built from grid fields:
//!
//! - linearised Kirchhoff: `1/2 int qbar2*( -hess v )`, membrane relaxed out;
//! - von Karman: `1/2 int qbar2( sqrt(theta) (sym_grad u + 1/2 grad v (x) grad v), -hess v )`;
//! - linearised von Karman: `1/2 int qbar2( sym_grad u, -hess v )`.
//!
//! The quadrature is split between the two natural meshes. Membrane strains
//! are cell-centred (bilinear averaging of corner-node differences) and every
//! term that touches them — the membrane quadratic, the membrane/bending
//! coupling, the misfit offsets — is integrated with the midpoint rule over
//! cells. The pure bending quadratic is instead integrated with trapezoidal
//! weights over the *nodes*, using node-centred second differences. Keeping
//! bending on the nodes matters: the cell-averaged Hessian annihilates
//! single-column zigzag modes (`v` alternating in sign along one axis), so a
//! purely cell-based scheme would let the optimizer buy membrane relief with
//! invisible oscillations at large `theta`. Both rules are exact on quadratic
//! fields, so they agree wherever closed-form values exist. The gradient is
//! the exact transpose of the same stencils — the optimizer relies on that
//! adjoint exactness, not just on asymptotic consistency.

use crate::error::{Error, Result};
use crate::grid::{DisplacementField, Grid2D};
use crate::reduce;
use crate::relaxation::EffectiveForms;
use crate::tensor::SymMat2;

/// Scaling regime selecting which limit energy is evaluated.
///
/// `alpha` is carried as metadata for the 3D comparison studies; it does not
/// enter the 2D energies themselves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// Linearised Kirchhoff, `alpha` strictly between 2 and 3.
    Lki { alpha: f64 },
    /// Von Karman with misfit weight `theta > 0` (the `alpha = 3` scaling).
    Vk { theta: f64 },
    /// Linearised von Karman, `alpha > 3`.
    Lvk { alpha: f64 },
}

impl Regime {
    pub fn lki(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0 && alpha < 3.0) {
            return Err(Error::InvalidRegime(format!(
                "linearised Kirchhoff needs alpha in (2, 3), got {alpha}"
            )));
        }
        Ok(Regime::Lki { alpha })
    }

    pub fn vk(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidRegime(format!(
                "von Karman needs theta > 0, got {theta}"
            )));
        }
        Ok(Regime::Vk { theta })
    }

    pub fn lvk(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 3.0) {
            return Err(Error::InvalidRegime(format!(
                "linearised von Karman needs alpha > 3, got {alpha}"
            )));
        }
        Ok(Regime::Lvk { alpha })
    }

    /// Scaling exponent of the 3D comparison: 3 in the von Karman regime.
    pub fn alpha(&self) -> f64 {
        match *self {
            Regime::Lki { alpha } | Regime::Lvk { alpha } => alpha,
            Regime::Vk { .. } => 3.0,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            Regime::Vk { theta } => Some(theta),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Regime::Lki { .. } => "lki",
            Regime::Vk { .. } => "vk",
            Regime::Lvk { .. } => "lvk",
        }
    }
}

/// Evaluation switches shared by `energy` and `energy_gradient`.
#[derive(Clone, Copy, Debug)]
pub struct EnergyOpts {
    /// Fixed pairwise summation order (bit-stable totals).
    pub reproducible: bool,
    /// Sign in front of the Hessian argument of the linearised Kirchhoff
    /// energy: `+1.0` evaluates `qbar2*(-hess v)`, `-1.0` evaluates
    /// `qbar2*(+hess v)`. The two differ only through the odd misfit terms.
    pub lki_sign: f64,
}

impl Default for EnergyOpts {
    fn default() -> Self {
        EnergyOpts { reproducible: false, lki_sign: 1.0 }
    }
}

// ---------------------------------------------------------------------------
// stencils

#[inline]
fn dx_cell(w: &[f64], c: (usize, usize, usize, usize), inv2hx: f64) -> f64 {
    let (n00, n10, n01, n11) = c;
    (w[n10] - w[n00] + w[n11] - w[n01]) * inv2hx
}

#[inline]
fn dy_cell(w: &[f64], c: (usize, usize, usize, usize), inv2hy: f64) -> f64 {
    let (n00, n10, n01, n11) = c;
    (w[n01] - w[n00] + w[n11] - w[n10]) * inv2hy
}

#[inline]
fn scatter_dx(out: &mut [f64], c: (usize, usize, usize, usize), val: f64, inv2hx: f64) {
    let (n00, n10, n01, n11) = c;
    let t = val * inv2hx;
    out[n10] += t;
    out[n11] += t;
    out[n00] -= t;
    out[n01] -= t;
}

#[inline]
fn scatter_dy(out: &mut [f64], c: (usize, usize, usize, usize), val: f64, inv2hy: f64) {
    let (n00, n10, n01, n11) = c;
    let t = val * inv2hy;
    out[n01] += t;
    out[n11] += t;
    out[n00] -= t;
    out[n10] -= t;
}

/// Second-difference stencil along a line of `n` nodes at position `i`:
/// index/coefficient pairs, coefficients in units of `1/h^2`. Interior nodes
/// use the centred stencil, boundary nodes the second-order one-sided one
/// (which is exact on cubics as well); a 3-node line falls back to the single
/// centred stencil for every position.
fn line_second_diff(i: usize, n: usize) -> [(usize, f64); 4] {
    if n == 3 {
        [(0, 1.0), (1, -2.0), (2, 1.0), (0, 0.0)]
    } else if i == 0 {
        [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
    } else if i == n - 1 {
        [(n - 1, 2.0), (n - 2, -5.0), (n - 3, 4.0), (n - 4, -1.0)]
    } else {
        [(i - 1, 1.0), (i, -2.0), (i + 1, 1.0), (i, 0.0)]
    }
}

fn node_second_x(grid: &Grid2D, v: &[f64]) -> Vec<f64> {
    let inv = 1.0 / (grid.hx() * grid.hx());
    let mut out = vec![0.0; grid.node_count()];
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let mut s = 0.0;
            for (k, c) in line_second_diff(i, grid.nx()) {
                s += c * v[grid.node(k, j)];
            }
            out[grid.node(i, j)] = s * inv;
        }
    }
    out
}

fn node_second_y(grid: &Grid2D, v: &[f64]) -> Vec<f64> {
    let inv = 1.0 / (grid.hy() * grid.hy());
    let mut out = vec![0.0; grid.node_count()];
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let mut s = 0.0;
            for (k, c) in line_second_diff(j, grid.ny()) {
                s += c * v[grid.node(i, k)];
            }
            out[grid.node(i, j)] = s * inv;
        }
    }
    out
}

/// Cell-centred symmetric gradient of the in-plane displacement.
///
/// Exact on quadratic fields at cell centres: each partial derivative is the
/// average of the two opposing edge difference quotients.
pub fn sym_grad(grid: &Grid2D, u1: &[f64], u2: &[f64]) -> Vec<SymMat2> {
    let (inv2hx, inv2hy) = (0.5 / grid.hx(), 0.5 / grid.hy());
    let mut out = Vec::with_capacity(grid.cell_count());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let c = grid.cell_corners(ci, cj);
            let dx1 = dx_cell(u1, c, inv2hx);
            let dy1 = dy_cell(u1, c, inv2hy);
            let dx2 = dx_cell(u2, c, inv2hx);
            let dy2 = dy_cell(u2, c, inv2hy);
            out.push(SymMat2 { xx: dx1, yy: dy2, xy: 0.5 * (dy1 + dx2) });
        }
    }
    out
}

/// Cell-centred gradient of a scalar field.
pub fn grad_cells(grid: &Grid2D, w: &[f64]) -> Vec<[f64; 2]> {
    let (inv2hx, inv2hy) = (0.5 / grid.hx(), 0.5 / grid.hy());
    let mut out = Vec::with_capacity(grid.cell_count());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let c = grid.cell_corners(ci, cj);
            out.push([dx_cell(w, c, inv2hx), dy_cell(w, c, inv2hy)]);
        }
    }
    out
}

fn cell_cross(grid: &Grid2D, v: &[f64]) -> Vec<f64> {
    let invxy = 1.0 / (grid.hx() * grid.hy());
    let mut out = Vec::with_capacity(grid.cell_count());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let (n00, n10, n01, n11) = grid.cell_corners(ci, cj);
            out.push((v[n11] - v[n10] - v[n01] + v[n00]) * invxy);
        }
    }
    out
}

/// Cells adjacent to node `(i, j)`: inclusive index ranges into the cell grid.
#[inline]
fn adjacent_cells(i: usize, j: usize, nx: usize, ny: usize) -> (usize, usize, usize, usize) {
    let ci0 = i.saturating_sub(1);
    let ci1 = if i < nx - 1 { i } else { nx - 2 };
    let cj0 = j.saturating_sub(1);
    let cj1 = if j < ny - 1 { j } else { ny - 2 };
    (ci0, ci1, cj0, cj1)
}

/// Cell-centred Hessian of the deflection: averaged node second differences
/// for the diagonal, the corner cross-stencil for the mixed entry. Used for
/// the membrane/bending coupling and for curvature diagnostics.
pub fn hessian(grid: &Grid2D, v: &[f64]) -> Vec<SymMat2> {
    let d11 = node_second_x(grid, v);
    let d22 = node_second_y(grid, v);
    let cross = cell_cross(grid, v);
    let mut out = Vec::with_capacity(grid.cell_count());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let (n00, n10, n01, n11) = grid.cell_corners(ci, cj);
            out.push(SymMat2 {
                xx: 0.25 * (d11[n00] + d11[n10] + d11[n01] + d11[n11]),
                yy: 0.25 * (d22[n00] + d22[n10] + d22[n01] + d22[n11]),
                xy: cross[grid.cell(ci, cj)],
            });
        }
    }
    out
}

/// Node-centred Hessian of the deflection: second differences on the
/// diagonal, adjacent-cell average of the corner cross for the mixed entry
/// (which reduces to the classical centred and one-sided cross stencils).
///
/// The bending energy must be integrated on these values, not on the
/// cell-averaged [`hessian`]: single-direction zigzag modes of `v` cancel
/// exactly in the cell averages, so a cell-based bending term would leave
/// them free to fake membrane relief through `grad v (x) grad v`.
pub fn hessian_nodes(grid: &Grid2D, v: &[f64]) -> Vec<SymMat2> {
    let d11 = node_second_x(grid, v);
    let d22 = node_second_y(grid, v);
    let cross = cell_cross(grid, v);
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = Vec::with_capacity(grid.node_count());
    for j in 0..ny {
        for i in 0..nx {
            let (ci0, ci1, cj0, cj1) = adjacent_cells(i, j, nx, ny);
            let mut s = 0.0;
            let mut k = 0.0;
            for cj in cj0..=cj1 {
                for ci in ci0..=ci1 {
                    s += cross[grid.cell(ci, cj)];
                    k += 1.0;
                }
            }
            let n = grid.node(i, j);
            out.push(SymMat2 { xx: d11[n], yy: d22[n], xy: s / k });
        }
    }
    out
}

/// Trapezoidal quadrature weights over the nodes; they sum to the area.
fn node_weights(grid: &Grid2D) -> Vec<f64> {
    let a = grid.hx() * grid.hy();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = Vec::with_capacity(grid.node_count());
    for j in 0..ny {
        let wy = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
        for i in 0..nx {
            let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            out.push(a * wx * wy);
        }
    }
    out
}

/// Transpose of [`sym_grad`]: scatter per-cell covectors (Frobenius pairing,
/// off-diagonal counted twice) back onto the displacement nodes.
pub fn sym_grad_adjoint(grid: &Grid2D, cov: &[SymMat2], g1: &mut [f64], g2: &mut [f64]) {
    let (inv2hx, inv2hy) = (0.5 / grid.hx(), 0.5 / grid.hy());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let c = grid.cell_corners(ci, cj);
            let s = &cov[grid.cell(ci, cj)];
            scatter_dx(g1, c, s.xx, inv2hx);
            scatter_dy(g1, c, s.xy, inv2hy);
            scatter_dx(g2, c, s.xy, inv2hx);
            scatter_dy(g2, c, s.yy, inv2hy);
        }
    }
}

/// Transpose of [`grad_cells`].
pub fn grad_adjoint(grid: &Grid2D, cov: &[[f64; 2]], g: &mut [f64]) {
    let (inv2hx, inv2hy) = (0.5 / grid.hx(), 0.5 / grid.hy());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let c = grid.cell_corners(ci, cj);
            let w = &cov[grid.cell(ci, cj)];
            scatter_dx(g, c, w[0], inv2hx);
            scatter_dy(g, c, w[1], inv2hy);
        }
    }
}

/// Transpose of [`hessian`] under the Frobenius pairing.
pub fn hessian_adjoint(grid: &Grid2D, cov: &[SymMat2], g: &mut [f64]) {
    let nodes = grid.node_count();
    let mut a11 = vec![0.0; nodes];
    let mut a22 = vec![0.0; nodes];
    let invxy = 1.0 / (grid.hx() * grid.hy());
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let (n00, n10, n01, n11) = grid.cell_corners(ci, cj);
            let s = &cov[grid.cell(ci, cj)];
            for n in [n00, n10, n01, n11] {
                a11[n] += 0.25 * s.xx;
                a22[n] += 0.25 * s.yy;
            }
            let t = 2.0 * s.xy * invxy;
            g[n11] += t;
            g[n00] += t;
            g[n10] -= t;
            g[n01] -= t;
        }
    }
    let invx2 = 1.0 / (grid.hx() * grid.hx());
    let invy2 = 1.0 / (grid.hy() * grid.hy());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let ax = a11[grid.node(i, j)] * invx2;
            for (k, c) in line_second_diff(i, grid.nx()) {
                g[grid.node(k, j)] += c * ax;
            }
            let ay = a22[grid.node(i, j)] * invy2;
            for (k, c) in line_second_diff(j, grid.ny()) {
                g[grid.node(i, k)] += c * ay;
            }
        }
    }
}

/// Transpose of [`hessian_nodes`] under the Frobenius pairing.
pub fn hessian_nodes_adjoint(grid: &Grid2D, cov: &[SymMat2], g: &mut [f64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let invx2 = 1.0 / (grid.hx() * grid.hx());
    let invy2 = 1.0 / (grid.hy() * grid.hy());
    let invxy = 1.0 / (grid.hx() * grid.hy());
    // per-cell weight of the mixed entry collected from the node averages
    let mut w = vec![0.0; grid.cell_count()];
    for j in 0..ny {
        for i in 0..nx {
            let s = &cov[grid.node(i, j)];
            let ax = s.xx * invx2;
            for (k, c) in line_second_diff(i, nx) {
                g[grid.node(k, j)] += c * ax;
            }
            let ay = s.yy * invy2;
            for (k, c) in line_second_diff(j, ny) {
                g[grid.node(i, k)] += c * ay;
            }
            let (ci0, ci1, cj0, cj1) = adjacent_cells(i, j, nx, ny);
            let k = ((ci1 - ci0 + 1) * (cj1 - cj0 + 1)) as f64;
            let t = 2.0 * s.xy / k;
            for cj in cj0..=cj1 {
                for ci in ci0..=ci1 {
                    w[grid.cell(ci, cj)] += t;
                }
            }
        }
    }
    for cj in 0..ny - 1 {
        for ci in 0..nx - 1 {
            let (n00, n10, n01, n11) = grid.cell_corners(ci, cj);
            let t = w[grid.cell(ci, cj)] * invxy;
            g[n11] += t;
            g[n00] += t;
            g[n10] -= t;
            g[n01] -= t;
        }
    }
}

#[inline]
fn half_outer(g: &[f64; 2]) -> SymMat2 {
    SymMat2 { xx: 0.5 * g[0] * g[0], yy: 0.5 * g[1] * g[1], xy: 0.5 * g[0] * g[1] }
}

#[inline]
fn symv(m: &SymMat2, g: &[f64; 2]) -> [f64; 2] {
    [m.xx * g[0] + m.xy * g[1], m.xy * g[0] + m.yy * g[1]]
}

// ---------------------------------------------------------------------------
// energies

/// Discrete limit energy.
///
/// Split quadrature: the bending block runs over the nodes (trapezoidal
/// weights, node-centred Hessian), everything touching the membrane — its
/// quadratic, the membrane/bending coupling, the misfit offsets and the
/// constant — runs over the cells (midpoint rule, cell-centred strains).
/// Both rules are exact on quadratic fields, so closed-form values on
/// polynomial test fields are unaffected by the split.
pub fn energy(
    regime: &Regime,
    eff: &EffectiveForms,
    fields: &DisplacementField,
    grid: &Grid2D,
    opts: &EnergyOpts,
) -> Result<f64> {
    fields.validate(grid)?;
    let hess_n = hessian_nodes(grid, &fields.v);
    let wts = node_weights(grid);
    let per_node: Vec<f64> = match *regime {
        Regime::Lki { .. } => hess_n
            .iter()
            .zip(&wts)
            .map(|(h, w)| w * eff.star_value(&h.scale(-opts.lki_sign)))
            .collect(),
        Regime::Lvk { .. } | Regime::Vk { .. } => hess_n
            .iter()
            .zip(&wts)
            .map(|(h, w)| w * eff.bending_value(&h.scale(-1.0)))
            .collect(),
    };
    let per_cell: Vec<f64> = match *regime {
        Regime::Lki { .. } => Vec::new(),
        Regime::Lvk { .. } => {
            let hess = hessian(grid, &fields.v);
            let strain = sym_grad(grid, &fields.u1, &fields.u2);
            strain
                .iter()
                .zip(&hess)
                .map(|(e, h)| {
                    let f = h.scale(-1.0);
                    eff.qbar2(e, &f) - eff.bending_value(&f)
                })
                .collect()
        }
        Regime::Vk { theta } => {
            let s = theta.sqrt();
            let hess = hessian(grid, &fields.v);
            let strain = sym_grad(grid, &fields.u1, &fields.u2);
            let gv = grad_cells(grid, &fields.v);
            strain
                .iter()
                .zip(&hess)
                .zip(&gv)
                .map(|((e, h), g)| {
                    let membrane = e.add(&half_outer(g)).scale(s);
                    let f = h.scale(-1.0);
                    eff.qbar2(&membrane, &f) - eff.bending_value(&f)
                })
                .collect()
        }
    };
    let cells = grid.cell_area() * reduce::sum_with_mode(&per_cell, opts.reproducible);
    let nodes = reduce::sum_with_mode(&per_node, opts.reproducible);
    Ok(0.5 * (cells + nodes))
}

/// Exact gradient of [`energy`] with respect to every node value.
pub fn energy_gradient(
    regime: &Regime,
    eff: &EffectiveForms,
    fields: &DisplacementField,
    grid: &Grid2D,
    opts: &EnergyOpts,
) -> Result<DisplacementField> {
    fields.validate(grid)?;
    let mut out = DisplacementField::zeros(grid);
    let a = grid.cell_area();
    let hess_n = hessian_nodes(grid, &fields.v);
    let wts = node_weights(grid);
    let cov_n: Vec<SymMat2> = match *regime {
        Regime::Lki { .. } => hess_n
            .iter()
            .zip(&wts)
            .map(|(h, w)| eff.star_grad(&h.scale(-opts.lki_sign)).scale(-opts.lki_sign * w))
            .collect(),
        Regime::Lvk { .. } | Regime::Vk { .. } => hess_n
            .iter()
            .zip(&wts)
            .map(|(h, w)| eff.bending_grad(&h.scale(-1.0)).scale(-w))
            .collect(),
    };
    hessian_nodes_adjoint(grid, &cov_n, &mut out.v);
    match *regime {
        Regime::Lki { .. } => {}
        Regime::Lvk { .. } => {
            let hess = hessian(grid, &fields.v);
            let strain = sym_grad(grid, &fields.u1, &fields.u2);
            let mut cov_e = Vec::with_capacity(hess.len());
            let mut cov_h = Vec::with_capacity(hess.len());
            for (e, h) in strain.iter().zip(&hess) {
                let f = h.scale(-1.0);
                let (ge, gf) = eff.qbar2_grad(e, &f);
                cov_e.push(ge.scale(a));
                cov_h.push(gf.sub(&eff.bending_grad(&f)).scale(-a));
            }
            sym_grad_adjoint(grid, &cov_e, &mut out.u1, &mut out.u2);
            hessian_adjoint(grid, &cov_h, &mut out.v);
        }
        Regime::Vk { theta } => {
            let s = theta.sqrt();
            let hess = hessian(grid, &fields.v);
            let strain = sym_grad(grid, &fields.u1, &fields.u2);
            let gv = grad_cells(grid, &fields.v);
            let mut cov_e = Vec::with_capacity(hess.len());
            let mut cov_h = Vec::with_capacity(hess.len());
            let mut cov_g = Vec::with_capacity(hess.len());
            for ((e, h), g) in strain.iter().zip(&hess).zip(&gv) {
                let membrane = e.add(&half_outer(g)).scale(s);
                let f = h.scale(-1.0);
                let (ge, gf) = eff.qbar2_grad(&membrane, &f);
                // membrane covector reaches v through the gradient stencil:
                // ge : sym(grad v (x) d grad v) = (ge grad v) . d grad v
                let gev = symv(&ge, g);
                cov_e.push(ge.scale(s * a));
                cov_g.push([gev[0] * s * a, gev[1] * s * a]);
                cov_h.push(gf.sub(&eff.bending_grad(&f)).scale(-a));
            }
            sym_grad_adjoint(grid, &cov_e, &mut out.u1, &mut out.u2);
            grad_adjoint(grid, &cov_g, &mut out.v);
            hessian_adjoint(grid, &cov_h, &mut out.v);
        }
    }
    Ok(out)
}

/// Area-weighted L1 residual of the developability constraint:
/// `sum area * |det hess v|` over cells. The linearised Kirchhoff energy is
/// meaningful on fields where this vanishes; it is reported, not enforced.
pub fn lki_constraint_residual(grid: &Grid2D, v: &[f64]) -> f64 {
    let a = grid.cell_area();
    hessian(grid, v).iter().map(|h| a * h.det().abs()).sum()
}
