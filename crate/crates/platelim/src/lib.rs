//! Limit models of thin prestrained multilayer plates.
//!
//! A flat three-dimensional body of thickness `h` made of elastic layers
//! with internal misfit (thermal expansion mismatch, swelling, growth)
//! relaxes, as `h` shrinks, toward one of a family of two-dimensional plate
//! models selected by how strong the misfit is relative to the thickness.
//! This crate implements that family end to end:
//!
//! * [`laminate`] / [`relaxation`] — describe the layer stack, relax the
//!   three-dimensional quadratic forms to plane stress, and average them
//!   through the thickness into the effective membrane/bending/coupling
//!   forms `qbar2` and the relaxed bending form `qbar2*`.
//! * [`functionals`] — evaluate the three limit energies on finite-
//!   difference grids: the linearised Kirchhoff bending energy (`lki`), the
//!   von Karman energy with misfit weight `theta` (`vk`), and the
//!   linearised von Karman energy (`lvk`), together with exact analytic
//!   gradients.
//! * [`minimize`] — gauge-projected L-BFGS for the von Karman energy, an
//!   exact conjugate-gradient solve for the linearised problem, a
//!   decoupled exact minimizer over developable cylinders for `lki`, and a
//!   warm-started multistart sweep across `theta`.
//! * [`gamma`] — the verification layer: closed-form recovery deformations
//!   whose genuinely nonlinear scaled three-dimensional energies converge
//!   to the two-dimensional values, plus the displacement projection that
//!   maps three-dimensional deformations back to plate fields.
//! * [`config`] / [`report`] / [`cli`] — a TOML-driven command line with
//!   CSV/JSON artifacts for scripted studies.
//!
//! The runnable examples under `examples/` walk through each capability;
//! `cargo run --example plate_energies` is a good starting point.

pub mod cli;
pub mod config;
pub mod error;
pub mod functionals;
pub mod gamma;
pub mod grid;
pub mod laminate;
pub mod minimize;
pub mod poly;
pub mod quad;
pub mod reduce;
pub mod relaxation;
pub mod report;
pub mod tensor;

pub use config::Config;
pub use error::{Error, Result};
pub use functionals::{energy, energy_gradient, EnergyOpts, Regime};
pub use gamma::{
    build_recovery, convergence_study, ph_project, scaled_energy_3d, w0_svk, ConvergenceTable,
    Deformation3D, QuadSpec, StudyOpts,
};
pub use grid::{DisplacementField, Grid2D};
pub use laminate::{Laminate, Layer};
pub use minimize::{
    curvature_stats, cylinder_minimize_lki, minimize_energy, solve_lvk, theta_sweep,
    CylinderResult, MinimizeResult, SolverOpts, SweepOpts, SweepReport,
};
pub use poly::Poly2;
pub use relaxation::{effective_forms, relax_q2, EffectiveForms};
pub use tensor::{ElasticForm, Mat2, Mat3, SymMat2};
