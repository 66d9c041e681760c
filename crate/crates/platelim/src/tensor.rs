//! Small fixed-size tensors and quadratic elastic forms.
//!
//! Strains live in 2x2 / 3x3 matrices. Quadratic forms on symmetric 3x3
//! strains are stored as 6x6 Voigt matrices in the engineering convention:
//! the strain vector is `(S11, S22, S33, 2*S23, 2*S13, 2*S12)`, so that
//! `v(S)^T C v(S)` reproduces the tensor form without extra weights.
//! Non-symmetric arguments are symmetrised first; antisymmetric parts never
//! contribute.

use crate::error::{Error, Result};

/// Plain 3-vector.
pub type Vec3 = [f64; 3];

/// Voigt component ordering: `(11, 22, 33, 23, 13, 12)`.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

// ---------------------------------------------------------------------------
// vector helpers

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

// ---------------------------------------------------------------------------
// 2x2 matrices

/// General (not necessarily symmetric) 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[0.0; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Outer product `a (x) b` of two in-plane vectors.
    pub fn outer(a: [f64; 2], b: [f64; 2]) -> Self {
        Mat2([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
    }

    /// Symmetric part `(G + G^T) / 2`.
    pub fn sym(&self) -> SymMat2 {
        SymMat2 {
            xx: self.0[0][0],
            yy: self.0[1][1],
            xy: 0.5 * (self.0[0][1] + self.0[1][0]),
        }
    }

    /// Scalar antisymmetric part: `(G21 - G12) / 2`.
    pub fn antisym(&self) -> f64 {
        0.5 * (self.0[1][0] - self.0[0][1])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Embed into 3x3 with zero third row and column.
    pub fn embed3(&self) -> Mat3 {
        let g = &self.0;
        Mat3([[g[0][0], g[0][1], 0.0], [g[1][0], g[1][1], 0.0], [0.0, 0.0, 0.0]])
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] += o.0[i][j];
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let mut r = *self;
        for row in r.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        r
    }
}

/// Symmetric 2x2 matrix with the off-diagonal entry stored once.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymMat2 {
    pub fn zero() -> Self {
        SymMat2 { xx: 0.0, yy: 0.0, xy: 0.0 }
    }

    pub fn identity() -> Self {
        SymMat2 { xx: 1.0, yy: 1.0, xy: 0.0 }
    }

    /// Symmetrised outer product `(a (x) b + b (x) a) / 2`.
    pub fn sym_outer(a: [f64; 2], b: [f64; 2]) -> Self {
        SymMat2 {
            xx: a[0] * b[0],
            yy: a[1] * b[1],
            xy: 0.5 * (a[0] * b[1] + a[1] * b[0]),
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Squared Frobenius norm (off-diagonal counted twice).
    pub fn norm_sq(&self) -> f64 {
        self.xx * self.xx + self.yy * self.yy + 2.0 * self.xy * self.xy
    }

    /// Frobenius inner product with another symmetric matrix.
    pub fn inner(&self, o: &SymMat2) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }

    /// Engineering Voigt vector `(S11, S22, 2*S12)`.
    pub fn voigt2(&self) -> [f64; 3] {
        [self.xx, self.yy, 2.0 * self.xy]
    }

    /// Inverse of [`SymMat2::voigt2`].
    pub fn from_voigt2(v: &[f64; 3]) -> Self {
        SymMat2 { xx: v[0], yy: v[1], xy: 0.5 * v[2] }
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2([[self.xx, self.xy], [self.xy, self.yy]])
    }

    /// Embed into 3x3 with zero third row and column.
    pub fn embed3(&self) -> Mat3 {
        Mat3([[self.xx, self.xy, 0.0], [self.xy, self.yy, 0.0], [0.0, 0.0, 0.0]])
    }

    /// Eigenvalues in ascending order (closed form).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.xx + self.yy);
        let r = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        [mean - r, mean + r]
    }

    pub fn add(&self, o: &SymMat2) -> SymMat2 {
        SymMat2 { xx: self.xx + o.xx, yy: self.yy + o.yy, xy: self.xy + o.xy }
    }

    pub fn sub(&self, o: &SymMat2) -> SymMat2 {
        SymMat2 { xx: self.xx - o.xx, yy: self.yy - o.yy, xy: self.xy - o.xy }
    }

    pub fn scale(&self, s: f64) -> SymMat2 {
        SymMat2 { xx: self.xx * s, yy: self.yy * s, xy: self.xy * s }
    }
}

// ---------------------------------------------------------------------------
// 3x3 matrices

/// General 3x3 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Mat3([[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn outer(a: &Vec3, b: &Vec3) -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn sym(&self) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = 0.5 * (self.0[i][j] + self.0[j][i]);
            }
        }
        m
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }

    pub fn matvec(&self, v: &Vec3) -> Vec3 {
        let mut r = [0.0; 3];
        for i in 0..3 {
            r[i] = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        r
    }

    pub fn add(&self, o: &Mat3) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, o: &Mat3) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, &e| m.max(e.abs()))
    }

    /// Delete the third row and column (upper-left 2x2 block).
    pub fn restrict2(&self) -> Mat2 {
        Mat2([[self.0[0][0], self.0[0][1]], [self.0[1][0], self.0[1][1]]])
    }

    /// Rotation by `angle` about a (not necessarily unit) `axis` (Rodrigues).
    pub fn rotation(axis: &Vec3, angle: f64) -> Mat3 {
        let n = norm3(axis);
        if n == 0.0 {
            return Mat3::identity();
        }
        let k = scale3(axis, 1.0 / n);
        let (s, c) = angle.sin_cos();
        let kx = Mat3([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]]);
        Mat3::identity().add(&kx.scale(s)).add(&kx.mul(&kx).scale(1.0 - c))
    }
}

/// Engineering Voigt vector of the symmetric part of `f`.
pub fn voigt_strain(f: &Mat3) -> [f64; 6] {
    let s = f.sym();
    let mut v = [0.0; 6];
    for (k, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
        v[k] = if i == j { s.0[i][j] } else { 2.0 * s.0[i][j] };
    }
    v
}

// ---------------------------------------------------------------------------
// quadratic forms

/// Quadratic form on symmetric 3x3 strains, stored as a 6x6 Voigt matrix.
///
/// Construction validates symmetry and positive semidefiniteness; the
/// smallest eigenvalue is retained so coercivity can be reported exactly as
/// checked. Evaluation symmetrises its argument, so the form vanishes on
/// antisymmetric matrices by construction.
#[derive(Clone, Debug)]
pub struct ElasticForm {
    c: [[f64; 6]; 6],
    min_eig: f64,
}

impl ElasticForm {
    /// Build from a Voigt matrix; rejects asymmetric or indefinite input.
    pub fn new(voigt: [[f64; 6]; 6]) -> Result<Self> {
        let scale = voigt.iter().flatten().fold(0.0_f64, |m, &e| m.max(e.abs()));
        let mut defect = 0.0_f64;
        for i in 0..6 {
            for j in (i + 1)..6 {
                defect = defect.max((voigt[i][j] - voigt[j][i]).abs());
            }
        }
        if defect > 1e-12 * scale.max(1.0) {
            return Err(Error::NotSymmetric { defect });
        }
        // Re-symmetrise to keep downstream algebra exactly symmetric.
        let mut c = voigt;
        for i in 0..6 {
            for j in (i + 1)..6 {
                let m = 0.5 * (c[i][j] + c[j][i]);
                c[i][j] = m;
                c[j][i] = m;
            }
        }
        let eigs = jacobi_eigenvalues(&c);
        let min_eig = eigs[0];
        if min_eig < -1e-12 * scale.max(1.0) {
            return Err(Error::Indefinite { min_eig });
        }
        Ok(ElasticForm { c, min_eig })
    }

    /// Isotropic form `Q(S) = lambda (tr S)^2 + 2 mu |S|^2`.
    pub fn isotropic(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !(lambda >= 0.0) {
            return Err(Error::Indefinite { min_eig: mu.min(lambda) });
        }
        let mut c = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = lambda;
            }
            c[i][i] += 2.0 * mu;
            c[i + 3][i + 3] = mu;
        }
        ElasticForm::new(c)
    }

    pub fn voigt(&self) -> &[[f64; 6]; 6] {
        &self.c
    }

    /// Smallest eigenvalue of the Voigt matrix (the coercivity constant; see
    /// [`ElasticForm::eval`] which dominates `min_eig * |sym F|^2`).
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }

    /// True when the form is positive definite beyond round-off.
    pub fn coercive(&self) -> bool {
        let scale = self.c.iter().flatten().fold(0.0_f64, |m, &e| m.max(e.abs()));
        self.min_eig > 1e-12 * scale.max(1.0)
    }

    /// Evaluate `Q(sym F)`.
    pub fn eval(&self, f: &Mat3) -> f64 {
        let v = voigt_strain(f);
        self.eval_voigt(&v)
    }

    /// Polarised form `Q[sym A, sym B]`.
    pub fn pair(&self, a: &Mat3, b: &Mat3) -> f64 {
        let va = voigt_strain(a);
        let vb = voigt_strain(b);
        let mut s = 0.0;
        for i in 0..6 {
            let mut row = 0.0;
            for j in 0..6 {
                row += self.c[i][j] * vb[j];
            }
            s += va[i] * row;
        }
        s
    }

    pub(crate) fn eval_voigt(&self, v: &[f64; 6]) -> f64 {
        let mut s = 0.0;
        for i in 0..6 {
            let mut row = 0.0;
            for j in 0..6 {
                row += self.c[i][j] * v[j];
            }
            s += v[i] * row;
        }
        s
    }
}

// ---------------------------------------------------------------------------
// small dense solvers

/// Cholesky solve for a small SPD system; `None` when a pivot falls below
/// `1e-13` times the diagonal scale.
pub fn cholesky_solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Option<[f64; N]> {
    let scale = (0..N).fold(0.0_f64, |m, i| m.max(a[i][i].abs())).max(1.0);
    let mut l = [[0.0_f64; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 1e-13 * scale {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // forward substitution L y = b
    let mut y = [0.0_f64; N];
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    // back substitution L^T x = y
    let mut x = [0.0_f64; N];
    for i in (0..N).rev() {
        let mut s = y[i];
        for k in (i + 1)..N {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
///
/// Iterates until the off-diagonal Frobenius norm drops below `1e-12` times
/// the matrix scale (hard cap of 50 sweeps; 6x6 inputs converge in a few).
pub fn jacobi_eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> [f64; N] {
    let mut a = *m;
    let scale = a.iter().flatten().fold(0.0_f64, |acc, &e| acc.max(e.abs())).max(1e-300);
    for _sweep in 0..50 {
        let mut off = 0.0;
        for i in 0..N {
            for j in (i + 1)..N {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-12 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs = [0.0_f64; N];
    for i in 0..N {
        eigs[i] = a[i][i];
    }
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn sym_part_examples() {
        assert_eq!(Mat3::identity().sym(), Mat3::identity());
        let w = Mat3([[0.0, 1.0, -2.0], [-1.0, 0.0, 3.0], [2.0, -3.0, 0.0]]);
        assert_eq!(w.sym(), Mat3::zero());
        let g = Mat2([[0.0, 2.0], [0.0, 0.0]]);
        assert_eq!(g.sym(), SymMat2 { xx: 0.0, yy: 0.0, xy: 1.0 });
    }

    #[test]
    fn embed_and_restrict() {
        let i2 = SymMat2::identity().embed3();
        assert_eq!(i2, Mat3::diag(1.0, 1.0, 0.0));
        assert_eq!(Mat2::zero().embed3(), Mat3::zero());
        let g = Mat2([[1.0, 2.0], [3.0, 4.0]]);
        let e = g.embed3();
        assert_eq!(e.0[0][2], 0.0);
        assert_eq!(e.0[2][1], 0.0);
        assert_eq!(e.restrict2(), g);

        assert_eq!(Mat3::identity().restrict2(), Mat2::identity());
        let e33 = Mat3::outer(&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]);
        assert_eq!(e33.restrict2(), Mat2::zero());
    }

    #[test]
    fn isotropic_form_values() {
        let q = ElasticForm::isotropic(1.0, 1.0).unwrap();
        // lambda (tr I)^2 + 2 mu |I|^2 = 9 + 6
        assert!(approx(q.eval(&Mat3::identity()), 15.0, 1e-15));
        let s = Mat3::diag(1.0, 0.0, 0.0);
        assert!(approx(q.eval(&s), 3.0, 1e-15));
        // shear-only strain, lambda = 0
        let q0 = ElasticForm::isotropic(0.0, 1.0).unwrap();
        let mut sh = Mat3::zero();
        sh.0[0][1] = 0.5;
        sh.0[1][0] = 0.5;
        assert!(approx(q0.eval(&sh), 1.0, 1e-15)); // 2 mu (2 * 0.25)
    }

    #[test]
    fn antisymmetric_input_vanishes() {
        let q = ElasticForm::isotropic(2.0, 0.7).unwrap();
        let w = Mat3([[0.0, 1.5, -0.3], [-1.5, 0.0, 2.0], [0.3, -2.0, 0.0]]);
        assert_eq!(q.eval(&w), 0.0);
    }

    #[test]
    fn pair_matches_eval() {
        let q = ElasticForm::isotropic(1.3, 0.8).unwrap();
        let a = Mat3([[1.0, 0.2, -0.5], [0.2, -0.7, 0.9], [-0.5, 0.9, 0.3]]);
        assert!(approx(q.pair(&a, &a), q.eval(&a), 1e-14));
        // polarisation identity
        let b = Mat3([[0.4, -0.1, 0.6], [-0.1, 1.2, 0.0], [0.6, 0.0, -0.8]]);
        let lhs = q.eval(&a.add(&b)) - q.eval(&a) - q.eval(&b);
        assert!(approx(lhs, 2.0 * q.pair(&a, &b), 1e-13));
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let mut c = ElasticForm::isotropic(1.0, 1.0).unwrap().c;
        c[0][1] += 1e-6;
        assert!(matches!(ElasticForm::new(c), Err(Error::NotSymmetric { .. })));

        let mut neg = [[0.0; 6]; 6];
        neg[0][0] = -1.0;
        assert!(matches!(ElasticForm::new(neg), Err(Error::Indefinite { .. })));

        assert!(ElasticForm::isotropic(1.0, 0.0).is_err());
        assert!(ElasticForm::isotropic(-0.5, 1.0).is_err());
    }

    #[test]
    fn zero_form_is_psd_but_not_coercive() {
        let q = ElasticForm::new([[0.0; 6]; 6]).unwrap();
        assert!(!q.coercive());
        assert_eq!(q.min_eigenvalue(), 0.0);
        assert!(ElasticForm::isotropic(1.0, 1.0).unwrap().coercive());
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // diag(1..6) rotated by a permutation-like similarity stays diag here
        let mut d = [[0.0; 6]; 6];
        for i in 0..6 {
            d[i][i] = (i + 1) as f64;
        }
        let e = jacobi_eigenvalues(&d);
        for i in 0..6 {
            assert!(approx(e[i], (i + 1) as f64, 1e-14));
        }
        // isotropic form has eigenvalues {3 lambda + 2 mu, 2 mu (x2), mu (x3)}
        let q = ElasticForm::isotropic(1.0, 1.0).unwrap();
        let e = jacobi_eigenvalues(q.voigt());
        let expect = [1.0, 1.0, 1.0, 2.0, 2.0, 5.0];
        for i in 0..6 {
            assert!(approx(e[i], expect[i], 1e-12), "eig {i}: {} vs {}", e[i], expect[i]);
        }
    }

    #[test]
    fn cholesky_solves_spd() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]];
        let x = [1.0, -2.0, 0.7];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i][j] * x[j];
            }
        }
        let got = cholesky_solve(&a, &b).unwrap();
        for i in 0..3 {
            assert!(approx(got[i], x[i], 1e-13));
        }
        let singular = [[1.0, 1.0], [1.0, 1.0]];
        assert!(cholesky_solve(&singular, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = Mat3::rotation(&[1.0, 2.0, -0.5], 0.9);
        let rtr = r.transpose().mul(&r);
        assert!(rtr.sub(&Mat3::identity()).max_abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn voigt_round_trip(xx in -5.0..5.0f64, yy in -5.0..5.0f64, zz in -5.0..5.0f64,
                            yz in -5.0..5.0f64, xz in -5.0..5.0f64, xy in -5.0..5.0f64) {
            let s = Mat3([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]);
            let v = voigt_strain(&s);
            // invert: halve the engineering shears
            let back = Mat3([[v[0], v[5] / 2.0, v[4] / 2.0],
                             [v[5] / 2.0, v[1], v[3] / 2.0],
                             [v[4] / 2.0, v[3] / 2.0, v[2]]]);
            prop_assert!(back.sub(&s).max_abs() == 0.0);
        }

        #[test]
        fn adding_antisymmetric_part_never_changes_form(
            xx in -2.0..2.0f64, yy in -2.0..2.0f64, zz in -2.0..2.0f64,
            yz in -2.0..2.0f64, xz in -2.0..2.0f64, xy in -2.0..2.0f64,
            w1 in -3.0..3.0f64, w2 in -3.0..3.0f64, w3 in -3.0..3.0f64) {
            let q = ElasticForm::isotropic(1.2, 0.6).unwrap();
            let s = Mat3([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]);
            let w = Mat3([[0.0, w1, w2], [-w1, 0.0, w3], [-w2, -w3, 0.0]]);
            let a = q.eval(&s);
            let b = q.eval(&s.add(&w));
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn coercivity_bound_is_literal(
            xx in -2.0..2.0f64, yy in -2.0..2.0f64, zz in -2.0..2.0f64,
            yz in -2.0..2.0f64, xz in -2.0..2.0f64, xy in -2.0..2.0f64) {
            // engineering weighting: |v(S)|^2 >= |S|^2, so the smallest Voigt
            // eigenvalue is a valid constant for the tensor norm as well
            let q = ElasticForm::isotropic(0.9, 1.4).unwrap();
            let s = Mat3([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]]);
            let norm_sq: f64 = s.0.iter().flatten().map(|e| e * e).sum();
            prop_assert!(q.eval(&s) >= q.min_eigenvalue() * norm_sq - 1e-12);
        }
    }
}
