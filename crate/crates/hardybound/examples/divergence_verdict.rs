//! Distinguish an unbounded operator from a bounded one.
//!
//! With v(s) = s^{−1} and p = 2 the inner factor ∫ v^{p′} blows up at the
//! origin, so the boundedness constant is infinite. Numerically that shows
//! up in two ways, and the evaluator watches for both:
//!
//! * the inner quadrature hits its width floor while the local
//!   contribution keeps growing (a certified non-integrable singularity);
//! * the whole-window value keeps climbing as the window is widened
//!   toward the origin — the growth ratio between the refined and base
//!   windows stays far from 1.
//!
//! Run with: cargo run --example divergence_verdict

use hardybound::{
    Direction, Exponents, Kernel, KernelClass, Placement, Problem, QuadTol, Variant, Weight,
};

fn report_for(v: Weight, label: &str) -> hardybound::Result<()> {
    let problem = Problem::new(
        Variant::new(KernelClass::Plus, Direction::Cumulative, Placement::Weights),
        Kernel::constant(KernelClass::Plus).at_least_order_one(),
        Exponents::new(2.0, 4.0 / 3.0)?,
    )
    .with_u(Weight::one().with_support(1e-4, 1.0))
    .with_v(v)
    .with_window(1e-4, 10.0);

    let report = problem.evaluate(&QuadTol::default())?;
    println!("v = {label}:");
    println!("  divergent verdict: {}", report.divergent);
    println!(
        "  constant: {}",
        report
            .constant
            .map(|c| format!("{c:.10}"))
            .unwrap_or_else(|| "none (unbounded)".into())
    );
    for c in &report.components {
        println!(
            "  component {}: divergent={} growth_ratio={}",
            c.index,
            c.divergent,
            c.growth_ratio
                .map(|g| format!("{g:.4}"))
                .unwrap_or_else(|| "-".into())
        );
    }
    println!();
    Ok(())
}

fn main() -> hardybound::Result<()> {
    // Bounded reference point: v integrable at the origin.
    report_for(
        Weight::power(1.0, -0.25).with_support(0.0, 1.0),
        "s^{-1/4} on (0,1]",
    )?;

    // v(s) = 1/s: ∫_0^x v(s)^{p'} ds diverges for p = 2 — the constant is
    // infinite and the verdict says so. From the command line this exits
    // with code 3.
    report_for(Weight::power(1.0, -1.0), "s^{-1}")?;
    Ok(())
}
