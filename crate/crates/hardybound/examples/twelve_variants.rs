//! One computation, twelve operator variants.
//!
//! The criterion covers every combination of
//!
//! * kernel class: plus (companions at the outer pair) / minus (inner),
//! * direction: cumulative ∫_0^x / tail ∫_x^∞,
//! * placement: both Lebesgue weights, or a measure on the output or
//!   input side.
//!
//! The dispatch differs per variant — which factor carries the companion,
//! which exponent, whose data — but on a symmetric test problem (constant
//! kernel, unit box on both sides, Lebesgue measure where one is needed)
//! all twelve must land on the same number: (1/20)^{1/4} at p = 2,
//! q = 4/3. Watching that happen is a decent smoke test of the whole
//! dispatch table.
//!
//! Run with: cargo run --example twelve_variants

use hardybound::{Exponents, Kernel, Measure, Placement, Problem, QuadTol, Variant, Weight};

fn main() -> hardybound::Result<()> {
    let eps = 1e-8;
    let exponents = Exponents::new(2.0, 4.0 / 3.0)?;
    let expected = (1.0f64 / 20.0).powf(0.25);
    println!("expected everywhere: {expected:.12}\n");
    println!("{:<28} {:>16} {:>12}", "variant", "constant", "rel err");

    for variant in Variant::all() {
        let kernel = Kernel::constant(variant.class).at_least_order_one();
        let box_weight = Weight::one().with_support(eps, 1.0);
        let mut problem = Problem::new(variant, kernel, exponents)
            .with_u(box_weight.clone())
            .with_v(box_weight.clone())
            .with_window(eps, 10.0);
        if variant.placement != Placement::Weights {
            // The measured side drops its weight and uses the measure's
            // mass instead; restricting Lebesgue measure to the same box
            // keeps the twelve problems identical.
            problem = problem.with_measure(Measure::density(box_weight));
        }
        let report = problem.evaluate(&QuadTol::default())?;
        let constant = report.constant.expect("bounded by construction");
        println!(
            "{:<28} {:>16.12} {:>12.2e}",
            variant.id(),
            constant,
            (constant - expected).abs() / expected
        );
    }
    Ok(())
}
