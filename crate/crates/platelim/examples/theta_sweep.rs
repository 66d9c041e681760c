//! Track the cap-to-roll transition across the misfit weight.
//!
//! Sweeps the von Karman weight `theta` over six decades on a frustrated
//! bilayer. Each row restarts from several candidate shapes (flat, warm
//! start from the previous weight, linearised cap, best cylinder) and keeps
//! the lowest minimum. Watch the diagnostics cross over:
//!
//! * `det residual` (mean |det hess v|, the Gauss curvature the membrane
//!   must pay for) collapses as theta grows;
//! * `dist to I` (distance of `hess v` from the spontaneous curvature)
//!   grows as the plate gives up the cap;
//! * the winning start flips from cap-like to cylinder-like.
//!
//! ```bash
//! cargo run --release --example theta_sweep
//! ```

use platelim::error::Result;
use platelim::grid::Grid2D;
use platelim::laminate::{Laminate, Layer};
use platelim::minimize::{theta_sweep, SweepOpts};
use platelim::relaxation::effective_forms;
use platelim::report::sweep_table_csv;
use platelim::tensor::{ElasticForm, Mat3};

fn main() -> Result<()> {
    let i2 = Mat3::diag(1.0, 1.0, 0.0);
    let stack = Laminate::new(vec![
        Layer {
            fraction: 0.5,
            stiffness: ElasticForm::isotropic(1.0, 1.0)?,
            misfit_const: i2.scale(-0.25),
            misfit_slope: Mat3::zero(),
        },
        Layer {
            fraction: 0.5,
            stiffness: ElasticForm::isotropic(1.0, 1.0)?,
            misfit_const: i2.scale(-0.25),
            misfit_slope: i2.scale(2.0),
        },
    ])?;
    let eff = effective_forms(&stack)?;
    let grid = Grid2D::new(2.0, 2.0, 33, 33)?;
    let thetas = [1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

    let mut opts = SweepOpts { multistart: true, seed: 1, ..Default::default() };
    opts.solver.max_iterations = 3000;
    let report = theta_sweep(&eff, &grid, &thetas, &opts)?;

    println!(
        "{:>10} {:>12} {:>10} {:>14} {:>12} {:>10}",
        "theta", "energy", "start", "det residual", "dist to I", "cap-ness"
    );
    for row in &report.rows {
        println!(
            "{:>10.0e} {:>12.6} {:>10} {:>14.6} {:>12.4} {:>10.4}",
            row.theta,
            row.result.energy,
            row.start,
            row.result.curvature.det_residual,
            row.result.curvature.dist_to_identity,
            row.result.curvature.principal_ratio
        );
    }

    println!();
    println!("as CSV (the sweep-theta subcommand writes the same table):");
    print!("{}", sweep_table_csv(&report));
    Ok(())
}
