//! Tour of the kernel families and their two-sided decompositions.
//!
//! A kernel of order n comes with companion kernels K_{n,i} and lower-order
//! members such that, for every x ≥ t ≥ s in the window,
//!
//!     h⁻¹ · Σᵢ companionᵢ(x,t) · memberᵢ(t,s)  ≤  K(x,s)  ≤  h · Σᵢ ...
//!
//! (companions sit at the outer pair for the plus class, at the inner pair
//! for the minus class). The diagnostics here check that claim on a grid,
//! estimate the smallest workable h, and audit the companions' side laws:
//! monotonicity and the chain inequality.
//!
//! Run with: cargo run --example kernel_classes

use hardybound::kernels::{check_companion_laws, estimate_min_h, verify_membership};
use hardybound::{Grid, Kernel, KernelClass, Spacing};

fn inspect(kernel: &Kernel, grid: &Grid) -> hardybound::Result<()> {
    println!(
        "\n== {} (class {}, order {}, declared h {:?})",
        kernel.label(),
        kernel.class().as_str(),
        kernel.order(),
        kernel.h(),
    );
    let min_h = estimate_min_h(kernel, grid)?;
    // Kernels that declare an h are checked against it; a tabulated kernel
    // declares none, so round the estimate up a little and test that.
    let h = kernel.h().unwrap_or(min_h.value * 1.05);
    let membership = verify_membership(kernel, grid, Some(h))?;
    println!(
        "   membership: ok={} with h={:.6} over {} triples",
        membership.ok, membership.h_used, membership.triples_used
    );
    println!(
        "   ratio range seen: [{:.6}, {:.6}]",
        membership.worst_lower, membership.worst_upper
    );
    println!(
        "   minimal h ≈ {:.10} at (x,t,s) = ({:.4}, {:.4}, {:.4}){}",
        min_h.value,
        min_h.attained_at.0,
        min_h.attained_at.1,
        min_h.attained_at.2,
        if min_h.suspected_unbounded {
            "  [grows with the window: likely unbounded]"
        } else {
            ""
        }
    );
    let comp = check_companion_laws(kernel, grid)?;
    println!(
        "   companions: monotone={} chain_ok={} chain_bound={:.4}",
        comp.monotone_ok, comp.chain_ok, comp.chain_bound
    );
    Ok(())
}

fn main() -> hardybound::Result<()> {
    let grid = Grid::new(1e-2, 1e2, 24, Spacing::Geometric)?;

    // Order 0: constant kernel. Promotion appends the trivial companion so
    // the order-1 machinery applies; the decomposition is exact (h = 1).
    inspect(&Kernel::constant(KernelClass::Plus).at_least_order_one(), &grid)?;

    // ln(x/s) splits exactly: ln(x/t) + ln(t/s).
    inspect(&Kernel::log_ratio(KernelClass::Plus), &grid)?;

    // (x−s)^α for fractional α ∈ (0,1]: subadditive split, h = 2^{1−α}.
    inspect(&Kernel::power_diff(0.5, KernelClass::Plus)?, &grid)?;

    // Integer exponents get the exact binomial decomposition of order α.
    inspect(&Kernel::power_diff(2.0, KernelClass::Plus)?, &grid)?;

    // The minus class carries its companions at the inner pair and demands
    // the opposite monotonicity.
    inspect(&Kernel::log_ratio(KernelClass::Minus), &grid)?;

    // Tabulated kernels interpolate bilinearly in (ln x, ln s); claiming
    // order 1 attaches the canonical split so the same checks run.
    let xs: Vec<f64> = vec![1e-2, 1e-1, 1.0, 1e1, 1e2];
    let table: Vec<Vec<f64>> = xs
        .iter()
        .map(|x: &f64| {
            xs.iter()
                .map(|s| 1.0 + (x / s).max(1.0).ln())
                .collect()
        })
        .collect();
    let data = hardybound::kernels::TableData {
        x: xs.clone(),
        s: xs,
        values: table,
    };
    inspect(&Kernel::table(data, 1, None)?, &grid)?;

    Ok(())
}
