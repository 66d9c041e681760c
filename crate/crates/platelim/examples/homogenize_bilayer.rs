//! Homogenize a pre-strained bilayer through its thickness.
//!
//! Builds a two-layer stack with an in-plane lattice misfit that jumps at the
//! midplane, averages it into the effective quadratic form of the plate, and
//! prints the resulting moment blocks. The cross block `q01` couples membrane
//! strain to bending only when the stack is asymmetric; the misfit vectors
//! `l0`, `l1` encode where the stack wants to sit and how it wants to bend.
//!
//! ```bash
//! cargo run --example homogenize_bilayer
//! ```

use platelim::error::Result;
use platelim::laminate::{Laminate, Layer};
use platelim::relaxation::effective_forms;
use platelim::tensor::{ElasticForm, Mat3, SymMat2};

fn print_block(name: &str, m: &[[f64; 3]; 3]) {
    println!("{name} (Voigt xx, yy, xy):");
    for row in m {
        println!("    [{:>10.6}, {:>10.6}, {:>10.6}]", row[0], row[1], row[2]);
    }
}

fn main() -> Result<()> {
    // a stiff substrate under a softer film that grew 2% too large
    let i2 = Mat3::diag(1.0, 1.0, 0.0);
    let stack = Laminate::new(vec![
        Layer {
            fraction: 0.6,
            stiffness: ElasticForm::isotropic(2.0, 1.5)?,
            misfit_const: Mat3::zero(),
            misfit_slope: Mat3::zero(),
        },
        Layer {
            fraction: 0.4,
            stiffness: ElasticForm::isotropic(1.0, 0.8)?,
            misfit_const: i2.scale(0.02),
            misfit_slope: Mat3::zero(),
        },
    ])?;

    let eff = effective_forms(&stack)?;
    println!("two layers, fractions 0.6 / 0.4, film misfit 0.02 I:");
    print_block("q00 (membrane)", &eff.q00);
    print_block("q01 (membrane-bending coupling)", &eff.q01);
    print_block("q11 (bending)", &eff.q11);
    println!("l0 (membrane misfit)  = [{:.6}, {:.6}; xy {:.6}]", eff.l0.xx, eff.l0.yy, eff.l0.xy);
    println!("l1 (bending misfit)   = [{:.6}, {:.6}; xy {:.6}]", eff.l1.xx, eff.l1.yy, eff.l1.xy);
    println!("constant offset       = {:.6}", eff.c_const);

    // the minimizing pair (E*, F*) of the averaged form: where the free
    // plate wants to sit when nothing constrains it
    let (value, e_star, f_star) = eff.joint_min()?;
    let spontaneous = f_star.scale(-1.0);
    println!();
    println!("unconstrained minimum of qbar2: {value:.6}");
    println!(
        "spontaneous curvature hess v = [{:.6}, {:.6}; xy {:.6}]",
        spontaneous.xx, spontaneous.yy, spontaneous.xy
    );
    println!(
        "membrane offset E*           = [{:.6}, {:.6}; xy {:.6}]",
        e_star.xx, e_star.yy, e_star.xy
    );

    // sanity: a single homogeneous layer has no coupling and q11 = q00/12
    let plain = Laminate::homogeneous(ElasticForm::isotropic(1.0, 1.0)?, Mat3::zero(), Mat3::zero())?;
    let eff0 = effective_forms(&plain)?;
    let coupling: f64 = eff0.q01.iter().flatten().map(|x| x.abs()).sum();
    println!();
    println!("homogeneous stack: |q01| = {coupling:.2e} (decoupled), q11 = q00/12 exactly");
    for i in 0..3 {
        for j in 0..3 {
            assert!((eff0.q11[i][j] - eff0.q00[i][j] / 12.0).abs() < 1e-14);
        }
    }

    // the effective form still evaluates pointwise through the thickness
    let g = SymMat2 { xx: 0.01, yy: -0.02, xy: 0.005 };
    let density = eff.pointwise_q2(&stack, 0.25, &g.to_mat2())?;
    println!("pointwise density at t = 0.25 for a sample strain: {density:.6e}");
    Ok(())
}
