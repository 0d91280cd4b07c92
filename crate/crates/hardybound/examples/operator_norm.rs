//! Estimate the operator norm from below and compare with the constant.
//!
//! Discretizing the operator on a grid of cells turns it into a matrix
//! acting between weighted ℓ_p and ℓ_q; any positive vector then gives a
//! certified lower bound ‖Af‖_q / ‖f‖_p for the discrete norm, and the
//! power-type ascent drives that bound up. The theory says the true norm
//! and the computed constant agree up to factors depending only on
//! (p, q, h) — so the ratio should be moderate and stable under grid
//! refinement, which is exactly what this example checks.
//!
//! Run with: cargo run --example operator_norm

use hardybound::{
    brute_force_norm, lower_bound_norm, Direction, DiscreteOperator, Exponents, Grid, Kernel,
    KernelClass, Placement, Problem, QuadTol, Spacing, Variant, Weight,
};

fn main() -> hardybound::Result<()> {
    let exponents = Exponents::new(2.0, 1.5)?;
    let kernel = Kernel::power_diff(1.0, KernelClass::Plus)?;
    let cutoff = Weight::one().with_support(0.01, 1.0);
    let problem = Problem::new(
        Variant::new(KernelClass::Plus, Direction::Cumulative, Placement::Weights),
        kernel,
        exponents,
    )
    .with_u(cutoff.clone())
    .with_v(cutoff)
    .with_window(0.01, 2.0);

    let tol = QuadTol::default();
    let constant = problem
        .evaluate(&tol)?
        .constant
        .expect("this operator is bounded");
    println!("criterion constant B = {constant:.10}\n");

    println!(
        "{:>6} {:>16} {:>12} {:>10} {:>6}",
        "cells", "norm lower bnd", "ratio to B", "iters", "conv"
    );
    for cells in [50usize, 100, 200, 400] {
        let grid = Grid::new(0.01, 2.0, cells, Spacing::Geometric)?;
        let op = DiscreteOperator::from_problem(&problem, &grid, &tol)?;
        let est = lower_bound_norm(&op, &exponents, 8, 500, 42)?;
        assert!(est.verify(&op, &exponents, 1e-10), "witness must reproduce the bound");
        println!(
            "{:>6} {:>16.10} {:>12.6} {:>10} {:>6}",
            cells,
            est.value,
            est.value / constant,
            est.iterations,
            est.converged
        );
    }

    // On tiny matrices the ascent answer can be cross-checked by brute
    // force: dense sampling plus hill climbing over the simplex.
    println!("\nsmall-matrix cross-check (3×3):");
    let op = DiscreteOperator::new(
        3,
        3,
        vec![1.0, 0.0, 0.0, 0.4, 1.3, 0.0, 0.2, 0.5, 0.9],
        vec![0.5, 1.0, 1.5],
        vec![1.0, 0.75, 0.5],
    )?;
    let est = lower_bound_norm(&op, &exponents, 8, 500, 42)?;
    let brute = brute_force_norm(&op, &exponents, 7)?;
    println!("  ascent      = {:.10}", est.value);
    println!("  brute force = {:.10}", brute);
    println!("  difference  = {:.3e}", (est.value - brute).abs());
    Ok(())
}
