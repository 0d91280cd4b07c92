//! Evaluate the boundedness constants for one operator, the long way.
//!
//! The model problem: the averaging operator with constant kernel,
//! cut off to (0, 1] on both sides, between L_2 and L_{4/3}. Truncating
//! the constant kernel makes the closed form easy:
//!
//!     B_{1,1}^4 = ∫_0^1 z^3 · (1 − z) dz = 1/20,
//!
//! so the reported constant should be (1/20)^{1/4} ≈ 0.472871.
//!
//! Run with: cargo run --example boundedness_criterion

use hardybound::{
    Direction, Exponents, Kernel, KernelClass, Placement, Problem, QuadTol, Variant, Weight,
};

fn main() -> hardybound::Result<()> {
    let eps = 1e-8;
    let exponents = Exponents::new(2.0, 4.0 / 3.0)?;
    println!("exponents: p = {}, q = {}", exponents.p, exponents.q);
    println!(
        "derived:   p' = {}, tail = {}, outer = {}",
        exponents.p_conj, exponents.tail_exp, exponents.outer_exp
    );

    // Order-0 kernels (no interesting decomposition) are promoted to order
    // 1 so the component machinery applies uniformly; the extra index-0
    // component is identically zero here.
    let kernel = Kernel::constant(KernelClass::Plus).at_least_order_one();
    let variant = Variant::new(
        KernelClass::Plus,
        Direction::Cumulative,
        Placement::Weights,
    );
    let cutoff = Weight::one().with_support(eps, 1.0);
    let problem = Problem::new(variant, kernel, exponents)
        .with_u(cutoff.clone())
        .with_v(cutoff)
        .with_window(eps, 10.0);

    let report = problem.evaluate(&QuadTol::default())?;
    println!("\nvariant: {}", report.variant);
    println!(
        "{:>5} {:>14} {:>14} {:>14} {:>10}",
        "index", "form1", "form2", "raw", "growth"
    );
    for c in &report.components {
        println!(
            "{:>5} {:>14.10} {:>14.10} {:>14.10} {:>10.6}",
            c.index,
            c.form1.as_ref().map(|f| f.value).unwrap_or(f64::NAN),
            c.form2.as_ref().map(|f| f.value).unwrap_or(f64::NAN),
            c.form1.as_ref().map(|f| f.raw).unwrap_or(f64::NAN),
            c.growth_ratio.unwrap_or(f64::NAN),
        );
    }

    let constant = report.constant.expect("nothing diverges here");
    let exact = (1.0f64 / 20.0).powf(0.25);
    println!("\nconstant        = {constant:.12}");
    println!("closed form     = {exact:.12}");
    println!("relative error  = {:.3e}", (constant - exact).abs() / exact);
    Ok(())
}
