//! Plane-stress relaxation and thickness homogenisation.
//!
//! For a coercive 3D form `Q3` and an in-plane matrix `G`, the relaxed form
//! is `Q2(G) = min_c Q3(G_embedded + c (x) e3)`: the out-of-plane strain
//! column adjusts freely. The minimiser `c = L(G)` is linear in `G` and the
//! relaxed form is the Schur complement of the Voigt matrix onto the
//! `(33, 23, 13)` components.
//!
//! Integrating `Q2(t, E + t F + Bp(t))` through the thickness produces one
//! quadratic-plus-affine form in the membrane/bending pair `(E, F)`, stored
//! as moment matrices. Per-layer 2-point Gauss quadrature is exact because
//! each integrand is at most quadratic in `t` within a layer.

use crate::error::{Error, Result};
use crate::laminate::Laminate;
use crate::tensor::{cholesky_solve, jacobi_eigenvalues, ElasticForm, Mat2, SymMat2, Vec3};
use crate::quad;

/// Voigt slots of the out-of-plane strain components, ordered `(c1, c2, c3)`
/// for the column vector `c`: `c1 -> 2*S13`, `c2 -> 2*S23`, `c3 -> S33`.
const OOP_SLOTS: [usize; 3] = [4, 3, 2];
/// Voigt slots of the in-plane components `(11, 22, 12)`.
const PLANE_SLOTS: [usize; 3] = [0, 1, 5];

/// Result of relaxing a 3D form at one in-plane matrix.
#[derive(Clone, Copy, Debug)]
pub struct Relaxed {
    /// `Q2(G)`.
    pub value: f64,
    /// Minimising out-of-plane column `c = L(G)`.
    pub minimizer: Vec3,
}

/// `Q2(G)` together with its minimiser, by direct 3x3 solve.
pub fn relax_q2(q: &ElasticForm, g: &Mat2) -> Result<Relaxed> {
    let pf = PlaneForm::new(q)?;
    let vg = g.sym().voigt2();
    Ok(Relaxed { value: pf.eval_voigt(&vg), minimizer: pf.l_apply(&vg) })
}

/// The linear minimiser map `L(G)` alone.
pub fn l_map(q: &ElasticForm, g: &Mat2) -> Result<Vec3> {
    Ok(relax_q2(q, g)?.minimizer)
}

/// Deviation of `L` from linearity on a concrete triple, for diagnostics:
/// `|L(a G + b H) - a L(G) - b L(H)|_inf`.
pub fn l_map_linearity_defect(q: &ElasticForm, g: &Mat2, h: &Mat2, a: f64, b: f64) -> Result<f64> {
    let combined = l_map(q, &g.scale(a).add(&h.scale(b)))?;
    let parts = crate::tensor::add3(
        &crate::tensor::scale3(&l_map(q, g)?, a),
        &crate::tensor::scale3(&l_map(q, h)?, b),
    );
    let d = crate::tensor::sub3(&combined, &parts);
    Ok(d.iter().fold(0.0_f64, |m, &e| m.max(e.abs())))
}

/// Plane-stress reduction of one 3D form: the relaxed 3x3 Voigt-2D matrix
/// and the matrix of the minimiser map.
#[derive(Clone, Debug)]
pub struct PlaneForm {
    /// Relaxed quadratic form on `(S11, S22, 2*S12)`.
    pub m: [[f64; 3]; 3],
    /// Minimiser map: `c = l * v2(G)` with rows ordered `(c1, c2, c3)`.
    pub l: [[f64; 3]; 3],
}

impl PlaneForm {
    pub fn new(q: &ElasticForm) -> Result<Self> {
        let c = q.voigt();
        // K: out-of-plane block; N: coupling of out-of-plane slots to the
        // in-plane ones (Voigt-2D columns already carry the engineering 2x
        // on the shear slot, so no extra factors appear here).
        let mut k = [[0.0; 3]; 3];
        let mut n = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                k[a][b] = c[OOP_SLOTS[a]][OOP_SLOTS[b]];
                n[a][b] = c[OOP_SLOTS[a]][PLANE_SLOTS[b]];
            }
        }
        // columns of l solve K l_col = -N e_b
        let mut l = [[0.0; 3]; 3];
        for b in 0..3 {
            let rhs = [-n[0][b], -n[1][b], -n[2][b]];
            let col = cholesky_solve(&k, &rhs).ok_or(Error::RelaxationSingular)?;
            for a in 0..3 {
                l[a][b] = col[a];
            }
        }
        // Schur complement m = A + N^T l (l already carries the minus sign)
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = c[PLANE_SLOTS[i]][PLANE_SLOTS[j]];
                for a in 0..3 {
                    s += n[a][i] * l[a][j];
                }
                m[i][j] = s;
            }
        }
        // exact symmetry for downstream Cholesky factorisations
        for i in 0..3 {
            for j in (i + 1)..3 {
                let avg = 0.5 * (m[i][j] + m[j][i]);
                m[i][j] = avg;
                m[j][i] = avg;
            }
        }
        Ok(PlaneForm { m, l })
    }

    pub fn eval_voigt(&self, v: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            let mut row = 0.0;
            for j in 0..3 {
                row += self.m[i][j] * v[j];
            }
            s += v[i] * row;
        }
        s
    }

    pub fn l_apply(&self, v: &[f64; 3]) -> Vec3 {
        let mut c = [0.0; 3];
        for a in 0..3 {
            c[a] = self.l[a][0] * v[0] + self.l[a][1] * v[1] + self.l[a][2] * v[2];
        }
        c
    }
}

// ---------------------------------------------------------------------------
// effective forms

/// Thickness-homogenised quadratic form on membrane/bending pairs.
///
/// `qbar2(E, F) = v(E)' q00 v(E) + 2 v(E)' q01 v(F) + v(F)' q11 v(F)
///               + 2 l0 . E + 2 l1 . F + c_const`
/// where `v` is the engineering Voigt-2D map and the linear terms come from
/// the in-plane misfit blocks.
#[derive(Clone, Debug)]
pub struct EffectiveForms {
    pub q00: [[f64; 3]; 3],
    pub q01: [[f64; 3]; 3],
    pub q11: [[f64; 3]; 3],
    /// Membrane misfit pairing, as a symmetric matrix (Frobenius pairing).
    pub l0: SymMat2,
    /// Bending misfit pairing.
    pub l1: SymMat2,
    /// Constant misfit energy `int Q2(t, Bp(t)) dt`.
    pub c_const: f64,
    /// Relaxed bending form: `qbar2_star(F) = v' star_m v + 2 star_l . v + star_c`.
    star_m: [[f64; 3]; 3],
    star_l: [f64; 3],
    star_c: f64,
    /// Per-layer plane-stress data, kept for pointwise queries.
    plane: Vec<PlaneForm>,
}

/// Assemble the effective forms of a laminate.
pub fn effective_forms(lam: &Laminate) -> Result<EffectiveForms> {
    let mut q00 = [[0.0; 3]; 3];
    let mut q01 = [[0.0; 3]; 3];
    let mut q11 = [[0.0; 3]; 3];
    let mut l0 = [0.0; 3];
    let mut l1 = [0.0; 3];
    let mut c_const = 0.0;
    let mut plane = Vec::with_capacity(lam.layers().len());

    for (j, layer) in lam.layers().iter().enumerate() {
        let pf = PlaneForm::new(&layer.stiffness)?;
        let (a, b) = (lam.breaks()[j], lam.breaks()[j + 1]);
        let (p0, p1) = lam.misfit_plane_affine(j);
        for &(node, weight) in quad::GL2.iter() {
            let (t, w) = quad::map_to(node, weight, a, b);
            let vb = p0.add(&p1.scale(t)).voigt2();
            let mut qvb = [0.0; 3];
            for i in 0..3 {
                for k in 0..3 {
                    qvb[i] += pf.m[i][k] * vb[k];
                }
            }
            for i in 0..3 {
                for k in 0..3 {
                    q00[i][k] += w * pf.m[i][k];
                    q01[i][k] += w * t * pf.m[i][k];
                    q11[i][k] += w * t * t * pf.m[i][k];
                }
                l0[i] += w * qvb[i];
                l1[i] += w * t * qvb[i];
                c_const += w * vb[i] * qvb[i];
            }
        }
        plane.push(pf);
    }

    // relaxed bending form: eliminate E from the stationarity
    // q00 v(E) + q01 v(F) + l0 = 0
    let mut star_m = [[0.0; 3]; 3];
    let mut star_l = [0.0; 3];
    let mut w = [[0.0; 3]; 3]; // w = q00^{-1} q01, column by column
    for b in 0..3 {
        let rhs = [q01[0][b], q01[1][b], q01[2][b]];
        let col = cholesky_solve(&q00, &rhs).ok_or(Error::RelaxationSingular)?;
        for a in 0..3 {
            w[a][b] = col[a];
        }
    }
    let y = cholesky_solve(&q00, &l0).ok_or(Error::RelaxationSingular)?;
    for i in 0..3 {
        for j in 0..3 {
            let mut s = q11[i][j];
            for a in 0..3 {
                s -= q01[a][i] * w[a][j];
            }
            star_m[i][j] = s;
        }
        let mut s = l1[i];
        for a in 0..3 {
            s -= q01[a][i] * y[a];
        }
        star_l[i] = s;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (star_m[i][j] + star_m[j][i]);
            star_m[i][j] = avg;
            star_m[j][i] = avg;
        }
    }
    let star_c = c_const - (0..3).map(|a| l0[a] * y[a]).sum::<f64>();

    Ok(EffectiveForms {
        q00,
        q01,
        q11,
        l0: SymMat2 { xx: l0[0], yy: l0[1], xy: l0[2] },
        l1: SymMat2 { xx: l1[0], yy: l1[1], xy: l1[2] },
        c_const,
        star_m,
        star_l,
        star_c,
        plane,
    })
}

impl EffectiveForms {
    /// Evaluate `qbar2(E, F)`.
    pub fn qbar2(&self, e: &SymMat2, f: &SymMat2) -> f64 {
        let ve = e.voigt2();
        let vf = f.voigt2();
        let mut s = self.c_const;
        for i in 0..3 {
            let mut row0 = 0.0;
            let mut row1 = 0.0;
            let mut cross = 0.0;
            for j in 0..3 {
                row0 += self.q00[i][j] * ve[j];
                row1 += self.q11[i][j] * vf[j];
                cross += self.q01[i][j] * vf[j];
            }
            s += ve[i] * row0 + vf[i] * row1 + 2.0 * ve[i] * cross;
        }
        s += 2.0 * (self.l0.inner(e) + self.l1.inner(f));
        s
    }

    /// Gradient pair of `qbar2` with respect to `(E, F)` under the Frobenius
    /// pairing: returns `(GE, GF)` with `d qbar2 = 2 GE : dE + 2 GF : dF`.
    pub fn qbar2_grad(&self, e: &SymMat2, f: &SymMat2) -> (SymMat2, SymMat2) {
        let ve = e.voigt2();
        let vf = f.voigt2();
        let mut ge = [0.0; 3];
        let mut gf = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                ge[i] += self.q00[i][j] * ve[j] + self.q01[i][j] * vf[j];
                gf[i] += self.q01[j][i] * ve[j] + self.q11[i][j] * vf[j];
            }
        }
        ge[0] += self.l0.xx;
        ge[1] += self.l0.yy;
        ge[2] += self.l0.xy;
        gf[0] += self.l1.xx;
        gf[1] += self.l1.yy;
        gf[2] += self.l1.xy;
        // the voigt2 covector slot pairs with 2*E12, so GE.xy = slot value
        (
            SymMat2 { xx: ge[0], yy: ge[1], xy: ge[2] },
            SymMat2 { xx: gf[0], yy: gf[1], xy: gf[2] },
        )
    }

    /// Bending block of `qbar2` alone: `F : Q11 F + 2 L1 : F`, without the
    /// membrane/coupling terms and without the constant.
    pub fn bending_value(&self, f: &SymMat2) -> f64 {
        let vf = f.voigt2();
        let mut s = 0.0;
        for i in 0..3 {
            let mut row = 0.0;
            for j in 0..3 {
                row += self.q11[i][j] * vf[j];
            }
            s += vf[i] * row;
        }
        s + 2.0 * self.l1.inner(f)
    }

    /// Frobenius covector of [`EffectiveForms::bending_value`]:
    /// `d bend = 2 G : dF`.
    pub fn bending_grad(&self, f: &SymMat2) -> SymMat2 {
        let vf = f.voigt2();
        let mut g = [self.l1.xx, self.l1.yy, self.l1.xy];
        for i in 0..3 {
            for j in 0..3 {
                g[i] += self.q11[i][j] * vf[j];
            }
        }
        SymMat2 { xx: g[0], yy: g[1], xy: g[2] }
    }

    /// Minimise over the membrane argument: `qbar2_star(F) = min_E qbar2(E, F)`,
    /// returning the value and the minimising `E`.
    pub fn qbar2_star(&self, f: &SymMat2) -> Result<(f64, SymMat2)> {
        let vf = f.voigt2();
        let mut rhs = [0.0; 3];
        let l0v = [self.l0.xx, self.l0.yy, self.l0.xy];
        for i in 0..3 {
            rhs[i] = -l0v[i];
            for j in 0..3 {
                rhs[i] -= self.q01[i][j] * vf[j];
            }
        }
        let ve = cholesky_solve(&self.q00, &rhs).ok_or(Error::RelaxationSingular)?;
        let e = SymMat2::from_voigt2(&ve);
        Ok((self.qbar2(&e, f), e))
    }

    /// Fast path for `qbar2_star` values (precomputed Schur data).
    pub fn star_value(&self, f: &SymMat2) -> f64 {
        let vf = f.voigt2();
        let mut s = self.star_c;
        for i in 0..3 {
            let mut row = 0.0;
            for j in 0..3 {
                row += self.star_m[i][j] * vf[j];
            }
            s += vf[i] * row + 2.0 * self.star_l[i] * vf[i];
        }
        s
    }

    /// Frobenius covector of `star_value`: `d star = 2 G : dF`.
    pub fn star_grad(&self, f: &SymMat2) -> SymMat2 {
        let vf = f.voigt2();
        let mut g = [0.0; 3];
        for i in 0..3 {
            g[i] = self.star_l[i];
            for j in 0..3 {
                g[i] += self.star_m[i][j] * vf[j];
            }
        }
        SymMat2 { xx: g[0], yy: g[1], xy: g[2] }
    }

    /// Unconstrained joint minimum over `(E, F)` and its minimisers.
    pub fn joint_min(&self) -> Result<(f64, SymMat2, SymMat2)> {
        let mut a = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = self.q00[i][j];
                a[i][j + 3] = self.q01[i][j];
                a[i + 3][j] = self.q01[j][i];
                a[i + 3][j + 3] = self.q11[i][j];
            }
        }
        let b = [
            -self.l0.xx, -self.l0.yy, -self.l0.xy,
            -self.l1.xx, -self.l1.yy, -self.l1.xy,
        ];
        let x = cholesky_solve(&a, &b).ok_or(Error::RelaxationSingular)?;
        let e = SymMat2::from_voigt2(&[x[0], x[1], x[2]]);
        let f = SymMat2::from_voigt2(&[x[3], x[4], x[5]]);
        Ok((self.qbar2(&e, &f), e, f))
    }

    /// Smallest eigenvalue of the membrane block (engineering Voigt-2D): the
    /// purely quadratic part of `E -> qbar2(E, 0)` dominates `c0 |v(E)|^2`.
    pub fn membrane_coercivity(&self) -> f64 {
        jacobi_eigenvalues(&self.q00)[0]
    }

    /// Smallest eigenvalue of the bending block.
    pub fn bending_coercivity(&self) -> f64 {
        jacobi_eigenvalues(&self.q11)[0]
    }

    /// Pointwise relaxed integrand `Q2(t, G)` for a general (not necessarily
    /// symmetric) in-plane matrix, including the misfit shift:
    /// `Q2(t, sym G + misfit_plane(t))`.
    pub fn pointwise_q2(&self, lam: &Laminate, t: f64, g: &Mat2) -> Result<f64> {
        let j = lam.layer_index(t)?;
        let arg = g.sym().add(&lam.misfit_plane(t)?);
        Ok(self.plane[j].eval_voigt(&arg.voigt2()))
    }
}
