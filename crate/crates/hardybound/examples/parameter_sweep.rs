//! Sweep the boundedness constant across kernels and exponent pairs.
//!
//! Useful both as a sanity scan (the two integral forms must agree
//! everywhere) and to see how the constant responds to the gap between
//! p and q. The same sweep is available from the command line as
//! `hardybound sweep --config ... --format csv`.
//!
//! Run with: cargo run --example parameter_sweep

use hardybound::{
    Direction, Exponents, Kernel, KernelClass, Placement, Problem, QuadTol, Variant, Weight,
};

fn main() -> hardybound::Result<()> {
    let kernels = [
        Kernel::constant(KernelClass::Plus).at_least_order_one(),
        Kernel::log_ratio(KernelClass::Plus),
        Kernel::power_diff(0.5, KernelClass::Plus)?,
        Kernel::power_diff(1.0, KernelClass::Plus)?,
    ];
    let pairs = [(2.0, 4.0 / 3.0), (2.0, 1.5), (3.0, 2.0), (4.0, 1.2)];
    let cutoff = Weight::one().with_support(1e-4, 1.0);
    let tol = QuadTol::default();

    println!(
        "{:>16} {:>6} {:>8} {:>14} {:>14} {:>10}",
        "kernel", "p", "q", "constant", "dual form", "agree"
    );
    for kernel in &kernels {
        for &(p, q) in &pairs {
            let problem = Problem::new(
                Variant::new(KernelClass::Plus, Direction::Cumulative, Placement::Weights),
                kernel.clone(),
                Exponents::new(p, q)?,
            )
            .with_u(cutoff.clone())
            .with_v(cutoff.clone())
            .with_window(1e-4, 10.0);
            let report = problem.evaluate(&tol)?;
            // The constant is the largest component; compare the matching
            // dual-form value at the same index.
            let (best, dual) = report
                .components
                .iter()
                .filter_map(|c| Some((c.form1.as_ref()?.value, c.form2.as_ref()?.value)))
                .fold((0.0f64, 0.0f64), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
            let rel = if best > 0.0 { (best - dual).abs() / best } else { 0.0 };
            println!(
                "{:>16} {:>6} {:>8.4} {:>14.10} {:>14.10} {:>10.2e}",
                kernel.label(),
                p,
                q,
                best,
                dual,
                rel
            );
        }
    }
    Ok(())
}
