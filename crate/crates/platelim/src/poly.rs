//! Dense bivariate polynomials of total degree at most four.
//!
//! The three-dimensional recovery deformations need every in-plane
//! derivative of the target fields in closed form; restricting the targets
//! to low-degree polynomials keeps those derivatives exact and cheap.

use crate::error::{Error, Result};

/// Largest admissible total degree.
pub const MAX_DEGREE: usize = 4;

/// Polynomial `sum c[i][j] x^i y^j` with `i + j <= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2 {
    c: [[f64; MAX_DEGREE + 1]; MAX_DEGREE + 1],
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { c: [[0.0; MAX_DEGREE + 1]; MAX_DEGREE + 1] }
    }

    pub fn constant(a: f64) -> Self {
        let mut p = Poly2::zero();
        p.c[0][0] = a;
        p
    }

    /// Build from sparse `(i, j, coefficient)` terms.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Result<Self> {
        let mut p = Poly2::zero();
        for &(i, j, a) in terms {
            if i + j > MAX_DEGREE {
                return Err(Error::Config(format!(
                    "polynomial term x^{i} y^{j} exceeds total degree {MAX_DEGREE}"
                )));
            }
            if !a.is_finite() {
                return Err(Error::Config(format!("non-finite coefficient for x^{i} y^{j}")));
            }
            p.c[i][j] += a;
        }
        Ok(p)
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|row| row.iter().all(|&a| a == 0.0))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x, inner Horner in y
        let mut acc = 0.0;
        for i in (0..=MAX_DEGREE).rev() {
            let mut row = 0.0;
            for j in (0..=MAX_DEGREE).rev() {
                row = row * y + self.c[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn dx(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for i in 1..=MAX_DEGREE {
            for j in 0..=MAX_DEGREE - i {
                p.c[i - 1][j] = i as f64 * self.c[i][j];
            }
        }
        p
    }

    pub fn dy(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for i in 0..=MAX_DEGREE {
            for j in 1..=MAX_DEGREE - i {
                p.c[i][j - 1] = j as f64 * self.c[i][j];
            }
        }
        p
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for i in 0..=MAX_DEGREE {
            for j in 0..=MAX_DEGREE {
                p.c[i][j] += o.c[i][j];
            }
        }
        p
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut p = self.clone();
        for row in p.c.iter_mut() {
            for a in row.iter_mut() {
                *a *= s;
            }
        }
        p
    }

    /// Total degree of the highest nonzero term (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for i in 0..=MAX_DEGREE {
            for j in 0..=MAX_DEGREE - i {
                if self.c[i][j] != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_and_differentiates_a_quartic() {
        // p = 2 + x y - 3 x^2 y^2 + y^4
        let p = Poly2::from_terms(&[(0, 0, 2.0), (1, 1, 1.0), (2, 2, -3.0), (0, 4, 1.0)]).unwrap();
        let (x, y) = (0.7f64, -1.3f64);
        let want = 2.0 + x * y - 3.0 * x * x * y * y + y.powi(4);
        assert!((p.eval(x, y) - want).abs() < 1e-14);
        let want_dx = y - 6.0 * x * y * y;
        assert!((p.dx().eval(x, y) - want_dx).abs() < 1e-14);
        let want_dy = x - 6.0 * x * x * y + 4.0 * y.powi(3);
        assert!((p.dy().eval(x, y) - want_dy).abs() < 1e-14);
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn derivatives_commute() {
        let p = Poly2::from_terms(&[(2, 2, 1.5), (3, 1, -0.4), (1, 2, 0.9)]).unwrap();
        let a = p.dx().dy();
        let b = p.dy().dx();
        for i in 0..=MAX_DEGREE {
            for j in 0..=MAX_DEGREE {
                assert!((a.coeff(i, j) - b.coeff(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_terms() {
        assert!(Poly2::from_terms(&[(3, 2, 1.0)]).is_err());
        assert!(Poly2::from_terms(&[(0, 0, f64::NAN)]).is_err());
    }

    #[test]
    fn algebra_helpers() {
        let p = Poly2::from_terms(&[(1, 0, 2.0)]).unwrap();
        let q = Poly2::from_terms(&[(0, 1, 3.0)]).unwrap();
        let r = p.add(&q).scale(0.5);
        assert!((r.eval(1.0, 1.0) - 2.5).abs() < 1e-15);
        assert!(Poly2::zero().is_zero());
        assert_eq!(Poly2::constant(1.0).degree(), 0);
        assert!(!Poly2::constant(1.0).is_zero());
    }
}
