//! Through-thickness material data.
//!
//! A plate of unit (rescaled) thickness occupies `t in [-1/2, 1/2]` and is
//! made of finitely many layers. Each layer carries a constant stiffness
//! form `Q3` and an affine misfit map `t -> B0 + t B1` describing the
//! pre-strain it would relax into. Layers are addressed by half-open slabs
//! `[t_j, t_{j+1})`, the topmost being closed.

use crate::error::{Error, Result};
use crate::tensor::{ElasticForm, Mat3, SymMat2, Vec3};

/// One material layer: thickness fraction, stiffness, affine misfit.
#[derive(Clone, Debug)]
pub struct Layer {
    pub fraction: f64,
    pub stiffness: ElasticForm,
    /// Constant misfit coefficient `B0`.
    pub misfit_const: Mat3,
    /// Linear misfit coefficient `B1`; the layer misfit is `B0 + t B1` in the
    /// global thickness coordinate.
    pub misfit_slope: Mat3,
}

impl Layer {
    /// Isotropic layer with misfit `B(t) = b0 + t b1`.
    pub fn isotropic(fraction: f64, lambda: f64, mu: f64, b0: Mat3, b1: Mat3) -> Result<Self> {
        Ok(Layer {
            fraction,
            stiffness: ElasticForm::isotropic(lambda, mu)?,
            misfit_const: b0,
            misfit_slope: b1,
        })
    }
}

/// A stack of layers partitioning the rescaled thickness `[-1/2, 1/2]`.
#[derive(Clone, Debug)]
pub struct Laminate {
    layers: Vec<Layer>,
    breaks: Vec<f64>,
}

impl Laminate {
    /// Validate fractions (positive, summing to 1) and layer coercivity, and
    /// lay the layers bottom-up from `t = -1/2`.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::BadPartition { sum: 0.0, layers: 0 });
        }
        let sum: f64 = layers.iter().map(|l| l.fraction).sum();
        if (sum - 1.0).abs() > 1e-12 || layers.iter().any(|l| !(l.fraction > 0.0)) {
            return Err(Error::BadPartition { sum, layers: layers.len() });
        }
        for (index, layer) in layers.iter().enumerate() {
            if !layer.stiffness.coercive() {
                return Err(Error::NonCoerciveLayer {
                    index,
                    min_eig: layer.stiffness.min_eigenvalue(),
                });
            }
        }
        let mut breaks = Vec::with_capacity(layers.len() + 1);
        let mut t = -0.5;
        breaks.push(t);
        for layer in &layers {
            t += layer.fraction;
            breaks.push(t);
        }
        // snap the top surface, guarding against accumulated round-off
        let n = breaks.len();
        breaks[n - 1] = 0.5;
        Ok(Laminate { layers, breaks })
    }

    /// Homogeneous single-layer plate.
    pub fn homogeneous(stiffness: ElasticForm, b0: Mat3, b1: Mat3) -> Result<Self> {
        Laminate::new(vec![Layer { fraction: 1.0, stiffness, misfit_const: b0, misfit_slope: b1 }])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Slab boundaries `-1/2 = t_0 < t_1 < ... < t_n = 1/2`.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Index of the layer containing `t` (half-open slabs, top layer closed).
    pub fn layer_index(&self, t: f64) -> Result<usize> {
        if !(-0.5..=0.5).contains(&t) {
            return Err(Error::OutOfThickness { t });
        }
        for j in 0..self.layers.len() {
            if t < self.breaks[j + 1] {
                return Ok(j);
            }
        }
        Ok(self.layers.len() - 1) // t == 1/2
    }

    /// Stiffness and misfit at thickness `t`.
    pub fn sample_at(&self, t: f64) -> Result<(&ElasticForm, Mat3)> {
        let j = self.layer_index(t)?;
        let layer = &self.layers[j];
        Ok((&layer.stiffness, layer.misfit_const.add(&layer.misfit_slope.scale(t))))
    }

    /// Misfit `B(t)` alone.
    pub fn misfit(&self, t: f64) -> Result<Mat3> {
        Ok(self.sample_at(t)?.1)
    }

    /// Symmetrised in-plane misfit block at `t` (the 2x2 restriction of
    /// `sym B(t)`).
    pub fn misfit_plane(&self, t: f64) -> Result<SymMat2> {
        Ok(self.misfit(t)?.sym().restrict2().sym())
    }

    /// Out-of-plane misfit column paired against the symmetrised strain:
    /// `(B13 + B31, B23 + B32, B33)`. Off-diagonal entries appear doubled
    /// because they sit in two symmetric slots of `sym B`.
    pub fn misfit_oop(&self, t: f64) -> Result<Vec3> {
        let b = self.misfit(t)?.0;
        Ok([b[0][2] + b[2][0], b[1][2] + b[2][1], b[2][2]])
    }

    /// Per-layer affine coefficients of [`Laminate::misfit_oop`], used by
    /// closed-form thickness integrals: returns `(c0, c1)` with
    /// `misfit_oop(t) = c0 + t c1` inside layer `j`.
    pub fn misfit_oop_affine(&self, j: usize) -> (Vec3, Vec3) {
        let oop = |b: &Mat3| [b.0[0][2] + b.0[2][0], b.0[1][2] + b.0[2][1], b.0[2][2]];
        (oop(&self.layers[j].misfit_const), oop(&self.layers[j].misfit_slope))
    }

    /// Per-layer affine coefficients of the in-plane misfit block:
    /// `misfit_plane(t) = P0 + t P1` inside layer `j`.
    pub fn misfit_plane_affine(&self, j: usize) -> (SymMat2, SymMat2) {
        let plane = |b: &Mat3| b.sym().restrict2().sym();
        (plane(&self.layers[j].misfit_const), plane(&self.layers[j].misfit_slope))
    }
}
