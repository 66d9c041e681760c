use platelim::{effective_forms, minimize_energy};
use platelim::{DisplacementField, Grid2D, Laminate, Layer, Mat3, Regime, SolverOpts};

fn main() -> platelim::Result<()> {
    // A bilayer whose top layer wants to be 20% larger in-plane.
    let misfit = Mat3::diag(0.2, 0.2, 0.0);
    let stack = Laminate::new(vec![
        Layer::isotropic(0.5, 1.0, 1.0, Mat3::zero(), Mat3::zero())?,
        Layer::isotropic(0.5, 1.0, 1.0, misfit, Mat3::zero())?,
    ])?;
    let eff = effective_forms(&stack)?;

    // Minimize the von Karman energy at theta = 10 on a 65x65 grid.
    let grid = Grid2D::new(1.0, 1.0, 33, 33)?;
    let init = DisplacementField::zeros(&grid);
    let result = minimize_energy(
        &Regime::Vk { theta: 10.0 },
        &eff,
        &grid,
        &init,
        &SolverOpts { grad_tol: 1e-6, ..Default::default() },
    )?;
    println!(
        "energy {:.8}, converged: {}, iters {}, |g| {:.2e}",
        result.energy, result.converged, result.iterations, result.gradient_norm
    );
    Ok(())
}
