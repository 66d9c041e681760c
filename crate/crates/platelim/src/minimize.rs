//! Gauge-fixed minimization of the discrete plate energies.
//!
//! All three energies are invariant under infinitesimal rigid motions of the
//! in-plane displacement and under affine shifts of the deflection (for the
//! von Karman energy the deflection tilt must be compensated by a matching
//! in-plane move, which the projection here performs exactly at the discrete
//! level). Minimization therefore works on the quotient: every iterate is
//! projected back onto the slice where the four field means vanish.
//!
//! The von Karman energy is nonconvex; the theta sweep tracks its minimum
//! across the misfit-weight range with warm starts and physically motivated
//! multistarts (parabolic-cap and rolled-cylinder candidates), reproducing
//! the cap-to-cylinder transition. The linearised Kirchhoff energy is only
//! meaningful on developable deflections; its minimizer is searched within
//! the exactly-feasible cylindrical ansatz `v(x) = f(x . n)`, plus an
//! optional soft-penalty mode for exploration.

use crate::error::{Error, Result};
use crate::functionals::{
    self, energy, energy_gradient, grad_cells, hessian, EnergyOpts, Regime,
};
use crate::grid::{DisplacementField, Grid2D};
use crate::relaxation::EffectiveForms;
use crate::tensor::SymMat2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Which of the four discrete mean-zero constraints to enforce.
#[derive(Clone, Copy, Debug)]
pub struct GaugeSpec {
    /// Subtract the node mean of `(u1, u2)`.
    pub fix_u_mean: bool,
    /// Subtract the best-fit infinitesimal rotation from `u`.
    pub fix_u_rotation: bool,
    /// Subtract the node mean of `v`.
    pub fix_v_mean: bool,
    /// Subtract the best-fit tilt (cell-mean gradient) from `v`.
    pub fix_v_tilt: bool,
}

impl Default for GaugeSpec {
    fn default() -> Self {
        GaugeSpec { fix_u_mean: true, fix_u_rotation: true, fix_v_mean: true, fix_v_tilt: true }
    }
}

/// Shape diagnostics of a deflection field, used to tell cylinders from
/// parabolic caps.
#[derive(Clone, Copy, Debug, Default)]
pub struct CurvatureStats {
    /// Area-weighted mean of `|det hess v|`.
    pub det_residual: f64,
    /// `L2` distance of the Hessian field to the identity.
    pub dist_to_identity: f64,
    /// Mean ratio of the smaller to the larger Hessian eigenvalue magnitude;
    /// cells with a vanishing leading eigenvalue are excluded. Near 1 for
    /// caps, near 0 for cylinders.
    pub principal_ratio: f64,
}

/// Outcome of one minimization.
#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub fields: DisplacementField,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub curvature: CurvatureStats,
}

/// Optimizer knobs. `grad_tol` is relative to the starting gradient norm.
#[derive(Clone, Copy, Debug)]
pub struct SolverOpts {
    pub grad_tol: f64,
    pub max_iterations: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Line-search backtracking factor.
    pub backtrack: f64,
    /// Quasi-Newton memory length.
    pub memory: usize,
    /// Amplitude of the seeded perturbation the sweep/CLI drivers add to
    /// starting guesses; `minimize_energy` itself never perturbs its input.
    pub init_jitter: f64,
    pub energy: EnergyOpts,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            grad_tol: 1e-8,
            max_iterations: 10_000,
            armijo: 1e-4,
            backtrack: 0.5,
            memory: 10,
            init_jitter: 0.0,
            energy: EnergyOpts::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// gauge projection

fn node_mean(w: &[f64]) -> f64 {
    w.iter().sum::<f64>() / w.len() as f64
}

fn mean_rotation(grid: &Grid2D, u1: &[f64], u2: &[f64]) -> f64 {
    // cells have equal area, so the plain average is the area-weighted one
    let mut s = 0.0;
    for (e1, e2) in grad_cells(grid, u1).iter().zip(grad_cells(grid, u2)) {
        s += 0.5 * (e2[0] - e1[1]);
    }
    s / grid.cell_count() as f64
}

fn mean_grad(grid: &Grid2D, v: &[f64]) -> [f64; 2] {
    let mut s = [0.0, 0.0];
    for g in grad_cells(grid, v) {
        s[0] += g[0];
        s[1] += g[1];
    }
    let n = grid.cell_count() as f64;
    [s[0] / n, s[1] / n]
}

fn subtract_rigid_and_means(out: &mut DisplacementField, grid: &Grid2D, spec: &GaugeSpec) {
    if spec.fix_u_rotation {
        let w = mean_rotation(grid, &out.u1, &out.u2);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let n = grid.node(i, j);
                out.u1[n] += w * grid.node_y(j);
                out.u2[n] -= w * grid.node_x(i);
            }
        }
    }
    if spec.fix_u_mean {
        let (m1, m2) = (node_mean(&out.u1), node_mean(&out.u2));
        for n in 0..grid.node_count() {
            out.u1[n] -= m1;
            out.u2[n] -= m2;
        }
    }
    if spec.fix_v_mean {
        let m = node_mean(&out.v);
        for e in out.v.iter_mut() {
            *e -= m;
        }
    }
}

/// Remove the gauge freedom: best-fit rigid motion from `u`, best-fit affine
/// function from `v`. Idempotent; leaves `sym_grad` and `hessian` unchanged
/// to round-off.
pub fn gauge_project(
    fields: &DisplacementField,
    grid: &Grid2D,
    spec: &GaugeSpec,
) -> DisplacementField {
    let mut out = fields.clone();
    if spec.fix_v_tilt {
        let a = mean_grad(grid, &out.v);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let n = grid.node(i, j);
                out.v[n] -= a[0] * grid.node_x(i) + a[1] * grid.node_y(j);
            }
        }
    }
    subtract_rigid_and_means(&mut out, grid, spec);
    out
}

/// Gauge projection that keeps the von Karman energy exactly unchanged.
///
/// Removing a tilt `a . x` from `v` changes the membrane term
/// `sym_grad u + 1/2 grad v (x) grad v`; the matching move
/// `u -> u - (v + 1/2 a . x) a` with `a = -mean grad v` restores it exactly,
/// because the strain stencils are linear in the fields and exact on affine
/// functions. The remaining subtractions are energy-neutral for every
/// regime.
pub fn gauge_project_vk(
    fields: &DisplacementField,
    grid: &Grid2D,
    spec: &GaugeSpec,
) -> DisplacementField {
    let mut out = fields.clone();
    if spec.fix_v_tilt {
        let m = mean_grad(grid, &out.v);
        let a = [-m[0], -m[1]];
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let n = grid.node(i, j);
                let ax = a[0] * grid.node_x(i) + a[1] * grid.node_y(j);
                let z = out.v[n] + 0.5 * ax;
                out.u1[n] -= a[0] * z;
                out.u2[n] -= a[1] * z;
                out.v[n] += ax;
            }
        }
    }
    subtract_rigid_and_means(&mut out, grid, spec);
    out
}

// ---------------------------------------------------------------------------
// curvature diagnostics

/// Shape statistics of the deflection's Hessian field.
pub fn curvature_stats(grid: &Grid2D, v: &[f64]) -> CurvatureStats {
    let hs = hessian(grid, v);
    let a = grid.cell_area();
    let total = grid.area();
    let mut det_sum = 0.0;
    let mut dist_sq = 0.0;
    let mut leading = Vec::with_capacity(hs.len());
    for h in &hs {
        det_sum += a * h.det().abs();
        dist_sq += a * h.sub(&SymMat2::identity()).norm_sq();
        let [l1, l2] = h.eigenvalues();
        let (big, small) = if l1.abs() >= l2.abs() {
            (l1.abs(), l2.abs())
        } else {
            (l2.abs(), l1.abs())
        };
        leading.push((big, small));
    }
    let scale = leading.iter().fold(0.0_f64, |m, &(b, _)| m.max(b));
    let mut ratio_sum = 0.0;
    let mut counted = 0usize;
    for &(big, small) in &leading {
        if big > 1e-12 * scale && big > 0.0 {
            ratio_sum += small / big;
            counted += 1;
        }
    }
    CurvatureStats {
        det_residual: det_sum / total,
        dist_to_identity: dist_sq.sqrt(),
        principal_ratio: if counted > 0 { ratio_sum / counted as f64 } else { 0.0 },
    }
}

// ---------------------------------------------------------------------------
// flat-vector helpers

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct LbfgsOutcome {
    x: Vec<f64>,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Limited-memory BFGS with Armijo backtracking on a projected slice.
///
/// `project` must not change the objective value (the gauge projections
/// satisfy this exactly), so the accepted-step decrease carries over to the
/// projected iterate.
fn lbfgs(
    mut eval: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    project: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    opts: &SolverOpts,
    mut on_step: impl FnMut(f64),
) -> Result<LbfgsOutcome> {
    let mut x = project(x0);
    let (mut f, mut g) = eval(&x)?;
    if !f.is_finite() {
        return Err(Error::Diverged("non-finite energy at the starting point".into()));
    }
    let tol = opts.grad_tol * norm(&g);
    let mut mem: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new(); // (s, y, 1/s.y)
    let mut iterations = 0;
    let mut converged = norm(&g) <= tol;

    while !converged && iterations < opts.max_iterations {
        // two-loop recursion for d = -H g
        let mut d: Vec<f64> = g.iter().map(|e| -e).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, inv_sy) in mem.iter().rev() {
            let a = inv_sy * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((_, y, inv_sy)) = mem.last() {
            let gamma = 1.0 / (inv_sy * dot(y, y));
            for di in d.iter_mut() {
                *di *= gamma;
            }
        }
        for ((s, y, inv_sy), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = inv_sy * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            // not a descent direction: fall back to steepest descent
            d = g.iter().map(|e| -e).collect();
            slope = -dot(&g, &g);
            mem.clear();
        }

        // Armijo backtracking, evaluated at the projected trial point (the
        // projection is objective-preserving, so the test is equivalent)
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let trial = project(&trial);
            let (ft, gt) = eval(&trial)?;
            if !ft.is_finite() {
                return Err(Error::Diverged(format!("non-finite energy at step {step:e}")));
            }
            if ft <= f + opts.armijo * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= opts.backtrack;
        }
        let Some((xn, fn_, gn)) = accepted else {
            // the direction is numerically exhausted; report where we stand
            break;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            mem.push((s, y, 1.0 / sy));
            if mem.len() > opts.memory {
                mem.remove(0);
            }
        }
        x = xn;
        f = fn_;
        g = gn;
        iterations += 1;
        on_step(f);
        converged = norm(&g) <= tol;
    }

    Ok(LbfgsOutcome { gradient_norm: norm(&g), x, value: f, iterations, converged })
}

// ---------------------------------------------------------------------------
// public minimizers

fn finish(
    grid: &Grid2D,
    fields: DisplacementField,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
) -> MinimizeResult {
    let curvature = curvature_stats(grid, &fields.v);
    MinimizeResult { fields, energy: value, gradient_norm, iterations, converged, curvature }
}

fn project_for(regime: &Regime, grid: &Grid2D, flat: &[f64]) -> Vec<f64> {
    let f = DisplacementField::from_flat(grid, flat).expect("flat size fixed by caller");
    let spec = GaugeSpec::default();
    let p = match regime {
        Regime::Vk { .. } => gauge_project_vk(&f, grid, &spec),
        _ => gauge_project(&f, grid, &spec),
    };
    p.to_flat()
}

/// Quasi-Newton minimization of the von Karman or linearised von Karman
/// energy from a given start. The linearised Kirchhoff energy is constrained
/// to developable deflections and goes through [`cylinder_minimize_lki`] (or
/// the soft [`minimize_lki_penalty`]) instead.
pub fn minimize_energy(
    regime: &Regime,
    eff: &EffectiveForms,
    grid: &Grid2D,
    init: &DisplacementField,
    opts: &SolverOpts,
) -> Result<MinimizeResult> {
    if matches!(regime, Regime::Lki { .. }) {
        return Err(Error::InvalidRegime(
            "the linearised Kirchhoff energy is minimized over cylinders \
             (cylinder_minimize_lki) or with the det-penalty mode"
                .into(),
        ));
    }
    init.validate(grid)?;
    let eval = |flat: &[f64]| -> Result<(f64, Vec<f64>)> {
        let f = DisplacementField::from_flat(grid, flat)?;
        let e = energy(regime, eff, &f, grid, &opts.energy)?;
        let g = energy_gradient(regime, eff, &f, grid, &opts.energy)?;
        Ok((e, g.to_flat()))
    };
    let out = lbfgs(eval, |flat| project_for(regime, grid, flat), &init.to_flat(), opts, |_| {})?;
    let fields = DisplacementField::from_flat(grid, &out.x)?;
    Ok(finish(grid, fields, out.value, out.gradient_norm, out.iterations, out.converged))
}

/// Direct solution of the linearised von Karman problem.
///
/// The objective is a convex quadratic, so its minimizer solves the linear
/// stationarity system; this runs conjugate gradients with the exact
/// energy-gradient as the matrix-vector product (`A p = grad(p) - grad(0)`).
pub fn solve_lvk(
    eff: &EffectiveForms,
    grid: &Grid2D,
    opts: &SolverOpts,
) -> Result<MinimizeResult> {
    let regime = Regime::lvk(4.0)?;
    let grad_at = |flat: &[f64]| -> Result<Vec<f64>> {
        let f = DisplacementField::from_flat(grid, flat)?;
        Ok(energy_gradient(&regime, eff, &f, grid, &opts.energy)?.to_flat())
    };
    let n = 3 * grid.node_count();
    let b = grad_at(&vec![0.0; n])?; // constant misfit force
    let matvec = |p: &[f64]| -> Result<Vec<f64>> {
        let gp = grad_at(p)?;
        Ok(gp.iter().zip(&b).map(|(a, c)| a - c).collect())
    };

    // CG for A x = -b; the misfit force is orthogonal to the gauge kernel,
    // so the iterates stay in the range of A
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = b.iter().map(|e| -e).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let tol = 1e-12 * rr.sqrt();
    let mut iterations = 0;
    let max_iterations = opts.max_iterations.max(2 * n);
    while rr.sqrt() > tol && iterations < max_iterations {
        let ap = matvec(&p)?;
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // PSD exhausted at round-off level
        }
        let alpha = rr / pap;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, api) in r.iter_mut().zip(&ap) {
            *ri -= alpha * api;
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        iterations += 1;
    }
    let converged = rr.sqrt() <= tol;
    let fields = gauge_project(
        &DisplacementField::from_flat(grid, &x)?,
        grid,
        &GaugeSpec::default(),
    );
    let value = energy(&regime, eff, &fields, grid, &opts.energy)?;
    let gradient_norm = norm(&grad_at(&fields.to_flat())?);
    Ok(finish(grid, fields, value, gradient_norm, iterations, converged))
}

fn penalty_value_grad(
    eff: &EffectiveForms,
    grid: &Grid2D,
    rho: f64,
    sign: f64,
    flat: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let f = DisplacementField::from_flat(grid, flat)?;
    let a = grid.cell_area();
    let hs = hessian(grid, &f.v);
    let mut value = 0.0;
    let mut cov = Vec::with_capacity(hs.len());
    for h in &hs {
        let arg = h.scale(-sign);
        value += 0.5 * a * eff.star_value(&arg) + rho * a * h.det() * h.det();
        let star = eff.star_grad(&arg).scale(-sign * a);
        let det_cov = SymMat2 { xx: h.yy, yy: h.xx, xy: -h.xy }.scale(2.0 * rho * a * h.det());
        cov.push(star.add(&det_cov));
    }
    let mut g = DisplacementField::zeros(grid);
    functionals::hessian_adjoint(grid, &cov, &mut g.v);
    Ok((value, g.to_flat()))
}

/// Exploratory unconstrained substitute for the constrained linearised
/// Kirchhoff problem: adds `rho * sum area (det hess v)^2` to the relaxed
/// bending energy and minimizes over `v`.
pub fn minimize_lki_penalty(
    eff: &EffectiveForms,
    grid: &Grid2D,
    init: &DisplacementField,
    rho: f64,
    opts: &SolverOpts,
) -> Result<MinimizeResult> {
    init.validate(grid)?;
    let sign = opts.energy.lki_sign;
    let project = |flat: &[f64]| -> Vec<f64> {
        let f = DisplacementField::from_flat(grid, flat).expect("size fixed");
        gauge_project(&f, grid, &GaugeSpec::default()).to_flat()
    };
    let out = lbfgs(
        |flat| penalty_value_grad(eff, grid, rho, sign, flat),
        project,
        &init.to_flat(),
        opts,
        |_| {},
    )?;
    let fields = DisplacementField::from_flat(grid, &out.x)?;
    Ok(finish(grid, fields, out.value, out.gradient_norm, out.iterations, out.converged))
}

// ---------------------------------------------------------------------------
// cylindrical linearised Kirchhoff minimizer

/// Energy of the best cylinder for one roll-up direction.
#[derive(Clone, Copy, Debug)]
pub struct DirectionEnergy {
    pub direction: [f64; 2],
    /// Optimal constant profile curvature for this direction.
    pub curvature: f64,
    pub energy: f64,
}

/// Samples of the optimal 1D profile `f` along `s = x . n`.
#[derive(Clone, Debug)]
pub struct CylinderProfile {
    pub s: Vec<f64>,
    pub f: Vec<f64>,
}

/// Best cylindrical minimizer of the linearised Kirchhoff energy.
#[derive(Clone, Debug)]
pub struct CylinderResult {
    /// The winning cylinder as a 2D field (`iterations` counts scanned
    /// directions; `gradient_norm` is 0 — each subproblem is solved exactly).
    pub best: MinimizeResult,
    pub direction: [f64; 2],
    pub curvature: f64,
    pub profile: CylinderProfile,
    pub per_direction: Vec<DirectionEnergy>,
}

/// Minimize the linearised Kirchhoff energy over the cylindrical ansatz
/// `v(x) = f(x . n)`, which satisfies the developability constraint
/// `det hess v = 0` identically.
///
/// For each direction the deflection enters only through `f''`, and `f''`
/// ranges over all profiles freely, so the quadratic minimization decouples
/// across the profile bins and every bin takes the same optimal curvature
/// `f'' = kappa*`. The per-direction energy is evaluated on the binned 1D
/// quadrature (bin weights collect the 2D cell areas, summing to the domain
/// area exactly) and the winner is re-evaluated as a 2D field.
pub fn cylinder_minimize_lki(
    eff: &EffectiveForms,
    grid: &Grid2D,
    profile_nodes: usize,
    directions: &[[f64; 2]],
    opts: &SolverOpts,
) -> Result<CylinderResult> {
    if directions.is_empty() {
        return Err(Error::InvalidRegime("cylinder search needs at least one direction".into()));
    }
    if profile_nodes < 3 {
        return Err(Error::Grid(format!("profile needs at least 3 nodes, got {profile_nodes}")));
    }
    let sign = opts.energy.lki_sign;
    let mut per_direction = Vec::with_capacity(directions.len());
    let mut best: Option<(f64, [f64; 2], f64)> = None;

    for &dir in directions {
        let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        if !(len.is_finite()) || len < 1e-12 {
            return Err(Error::InvalidRegime(format!("degenerate direction {dir:?}")));
        }
        let n = [dir[0] / len, dir[1] / len];
        let nn = SymMat2::sym_outer(n, n);
        // star form restricted to multiples of n (x) n by polarization:
        // value(c) = a c^2 + 2 b c + c0, argument c = -sign * f''
        let plus = eff.star_value(&nn);
        let minus = eff.star_value(&nn.scale(-1.0));
        let c0 = eff.star_value(&SymMat2::zero());
        let a = 0.5 * (plus + minus) - c0;
        let b = 0.25 * (plus - minus);
        if a <= 0.0 {
            return Err(Error::RelaxationSingular);
        }
        let c_star = -b / a;
        let kappa = -sign * c_star;
        let value = 0.5 * grid.area() * (c0 + c_star * (a * c_star + 2.0 * b));
        per_direction.push(DirectionEnergy { direction: n, curvature: kappa, energy: value });
        if best.map_or(true, |(e, _, _)| value < e) {
            best = Some((value, n, kappa));
        }
    }

    let (_, n, kappa) = best.expect("nonempty directions");

    // binned 1D quadrature over s = x . n: every 2D cell lands in exactly one
    // profile bin, so the weights sum to the domain area exactly
    let sw = 0.5 * (grid.lx() * n[0].abs() + grid.ly() * n[1].abs());
    let m = profile_nodes;
    let half = if sw > 0.0 { sw } else { 1.0 };
    let ds = 2.0 * half / (m - 1) as f64;
    let s_nodes: Vec<f64> = (0..m).map(|k| -half + k as f64 * ds).collect();
    let mut weights = vec![0.0; m - 1];
    for cj in 0..grid.ny() - 1 {
        for ci in 0..grid.nx() - 1 {
            let (cx, cy) = grid.cell_center(ci, cj);
            let s = cx * n[0] + cy * n[1];
            let k = (((s + half) / ds).floor() as isize).clamp(0, (m - 2) as isize) as usize;
            weights[k] += grid.cell_area();
        }
    }
    // decoupled per-bin minimization: same optimal curvature everywhere,
    // so the reconstructed profile is the pure quadratic
    let f_nodes: Vec<f64> = s_nodes.iter().map(|&s| 0.5 * kappa * s * s).collect();
    debug_assert!((weights.iter().sum::<f64>() - grid.area()).abs() < 1e-10 * grid.area());

    let fields = DisplacementField::from_fn(grid, |_, _| [0.0; 2], |x, y| {
        let s = x * n[0] + y * n[1];
        0.5 * kappa * s * s
    });
    let regime = Regime::lki(2.5)?; // tag only; alpha does not enter the energy
    let value2d = energy(&regime, eff, &fields, grid, &opts.energy)?;
    let best_result = finish(grid, fields, value2d, 0.0, directions.len(), true);

    Ok(CylinderResult {
        best: best_result,
        direction: n,
        curvature: kappa,
        profile: CylinderProfile { s: s_nodes, f: f_nodes },
        per_direction,
    })
}

// ---------------------------------------------------------------------------
// theta sweep

/// Options of [`theta_sweep`].
#[derive(Clone, Copy, Debug)]
pub struct SweepOpts {
    pub solver: SolverOpts,
    /// Try the parabolic-cap and rolled-cylinder starts at every theta in
    /// addition to the warm start from the previous theta.
    pub multistart: bool,
    /// Seed of the symmetry-breaking jitter (active when
    /// `solver.init_jitter > 0`).
    pub seed: u64,
    /// Cylinder-candidate construction: directions scanned and 1D profile
    /// resolution.
    pub directions: usize,
    pub profile_nodes: usize,
}

impl Default for SweepOpts {
    fn default() -> Self {
        SweepOpts {
            solver: SolverOpts::default(),
            multistart: true,
            seed: 0,
            directions: 16,
            profile_nodes: 129,
        }
    }
}

/// One row of the sweep: the minimizer at a single misfit weight.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub theta: f64,
    /// Which start won: "zero", "warm", "cap", or "cylinder".
    pub start: String,
    pub result: MinimizeResult,
}

/// Minimum-energy curve and curvature trajectories across theta.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

pub(crate) fn jitter_fields(f: &mut DisplacementField, amplitude: f64, rng: &mut ChaCha8Rng) {
    if amplitude <= 0.0 {
        return;
    }
    for e in f.u1.iter_mut().chain(&mut f.u2).chain(&mut f.v) {
        *e += rng.gen_range(-amplitude..amplitude);
    }
}

/// Track the von Karman minimum across an ascending list of misfit weights.
///
/// Each theta is minimized from several starts (warm start from the previous
/// winner with the membrane field rescaled, plus optionally a parabolic-cap
/// start from the linearised problem and a rolled-cylinder start with the
/// membrane slaved to the roll), and the lowest minimum is kept.
pub fn theta_sweep(
    eff: &EffectiveForms,
    grid: &Grid2D,
    thetas: &[f64],
    opts: &SweepOpts,
) -> Result<SweepReport> {
    if thetas.is_empty() {
        return Err(Error::InvalidRegime("sweep needs at least one theta".into()));
    }
    if thetas.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidRegime("sweep thetas must be positive".into()));
    }
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidRegime("sweep thetas must be strictly ascending".into()));
    }

    // branch templates, built once
    let cap = if opts.multistart { Some(solve_lvk(eff, grid, &opts.solver)?) } else { None };
    let cyl = if opts.multistart {
        let dirs: Vec<[f64; 2]> = (0..opts.directions)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / opts.directions as f64;
                [phi.cos(), phi.sin()]
            })
            .collect();
        Some(cylinder_minimize_lki(eff, grid, opts.profile_nodes, &dirs, &opts.solver)?)
    } else {
        None
    };

    let mut rows: Vec<SweepRow> = Vec::with_capacity(thetas.len());
    let mut warm: Option<(f64, DisplacementField)> = None;

    for (ti, &theta) in thetas.iter().enumerate() {
        let regime = Regime::vk(theta)?;
        let mut candidates: Vec<(String, DisplacementField)> = Vec::new();

        match &warm {
            None => candidates.push(("zero".into(), DisplacementField::zeros(grid))),
            Some((theta_prev, fields)) => {
                // the cap branch scales like 1/sqrt(theta) in the membrane
                let scale = (theta_prev / theta).sqrt();
                let mut f = fields.clone();
                for e in f.u1.iter_mut().chain(&mut f.u2) {
                    *e *= scale;
                }
                candidates.push(("warm".into(), f));
            }
        }
        if let Some(capref) = &cap {
            let mut f = capref.fields.clone();
            let inv = 1.0 / theta.sqrt();
            for e in f.u1.iter_mut().chain(&mut f.u2) {
                *e *= inv;
            }
            candidates.push(("cap".into(), f));
        }
        if let Some(cylref) = &cyl {
            // slave the membrane to the roll: sym_grad u = E*/sqrt(theta)
            // - 1/2 grad v (x) grad v, with E* the optimal membrane of the
            // constant bending argument
            let kappa = cylref.curvature;
            let n = cylref.direction;
            let f_arg = SymMat2::sym_outer(n, n).scale(-kappa);
            let (_, e_star) = eff.qbar2_star(&f_arg)?;
            let inv = 1.0 / theta.sqrt();
            let f = DisplacementField::from_fn(
                grid,
                |x, y| {
                    let s = x * n[0] + y * n[1];
                    let cubic = -kappa * kappa * s * s * s / 6.0;
                    [
                        cubic * n[0] + inv * (e_star.xx * x + e_star.xy * y),
                        cubic * n[1] + inv * (e_star.xy * x + e_star.yy * y),
                    ]
                },
                |x, y| {
                    let s = x * n[0] + y * n[1];
                    0.5 * kappa * s * s
                },
            );
            candidates.push(("cylinder".into(), f));
        }

        let mut best: Option<(String, MinimizeResult)> = None;
        for (ci, (label, mut init)) in candidates.into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed ^ (ti as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    ^ (ci as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9),
            );
            jitter_fields(&mut init, opts.solver.init_jitter, &mut rng);
            let run = minimize_energy(&regime, eff, grid, &init, &opts.solver)?;
            if best.as_ref().map_or(true, |(_, b)| run.energy < b.energy) {
                best = Some((label, run));
            }
        }
        let (start, result) = best.expect("at least one candidate");
        warm = Some((theta, result.fields.clone()));
        rows.push(SweepRow { theta, start, result });
    }

    Ok(SweepReport { rows })
}
