//! Chain two kernels through a middle weight.
//!
//! The composition (K ∘_w M)(x, s) = ∫_s^x K(x, t) w(t) M(t, s) dt shows
//! up when one integral operator is applied after another. Orders add and
//! pick up one extra: composing order-n with order-m yields order n+m+1.
//! The composed kernel is evaluated by quadrature on demand; it carries no
//! companion family of its own (`has_decomposition` is false), so only its
//! top component is meaningful downstream.
//!
//! Run with: cargo run --example compose_kernels

use hardybound::{compose, Kernel, KernelClass, Weight};

fn main() -> hardybound::Result<()> {
    // (x−t) ∘ (t−s) with unit weight has the closed form (x−s)³/6.
    let lin = Kernel::power_diff(1.0, KernelClass::Plus)?;
    let cubic = compose(&lin, Weight::one(), &lin)?;
    println!(
        "{}: class {}, order {}, has_decomposition = {}",
        cubic.label(),
        cubic.class().as_str(),
        cubic.order(),
        cubic.has_decomposition()
    );
    println!("{:>8} {:>8} {:>16} {:>16} {:>10}", "x", "s", "computed", "(x−s)³/6", "rel err");
    for (x, s) in [(1.0, 0.5), (2.0, 1.0), (10.0, 0.1), (5.0, 4.9)] {
        let got = cubic.eval(x, s)?;
        let exact = (x - s).powi(3) / 6.0;
        println!(
            "{x:>8.2} {s:>8.2} {got:>16.10} {exact:>16.10} {:>10.2e}",
            (got - exact).abs() / exact
        );
    }

    // A weighted chain: constant ∘_w constant integrates the weight,
    // so against w(t) = t the result is (x² − s²)/2.
    let unit = Kernel::constant(KernelClass::Plus);
    let averaged = compose(&unit, Weight::power(1.0, 1.0), &unit)?;
    println!(
        "\n{}: order {}",
        averaged.label(),
        averaged.order()
    );
    for (x, s) in [(2.0, 1.0), (3.0, 0.5)] {
        let got = averaged.eval(x, s)?;
        let exact = (x * x - s * s) / 2.0;
        println!("  K({x}, {s}) = {got:.10}   exact {exact:.10}");
    }

    // Orders accumulate across repeated composition.
    let five = compose(&cubic, Weight::one(), &lin)?;
    println!(
        "\n{}: order {} (3 + 1 + 1)",
        five.label(),
        five.order()
    );
    let got = five.eval(2.0, 1.0)?;
    // ∫_s^x (x−t)³/6 · (t−s) dt = (x−s)⁵/120.
    println!("  K(2, 1) = {got:.10}   exact {:.10}", 1.0 / 120.0);
    Ok(())
}
