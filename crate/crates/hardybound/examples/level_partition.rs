//! Split the half-line where a cumulative primitive doubles.
//!
//! Given F(x) = ∫_0^x K(x, s) v(s) f(s) ds sampled on a grid, the level
//! partition marks the first grid point where F enters each dyadic band
//! [2^k h, 2^(k+1) h). Those breakpoints drive the discretization
//! arguments behind the boundedness results: between consecutive marks
//! the primitive grows by at most a fixed factor. Levels may skip when F
//! jumps past several bands between samples; the audit below re-checks
//! every promise the partition makes.
//!
//! Run with: cargo run --example level_partition

use hardybound::{
    cumulative_primitive, partition_levels, verify_partition, Grid, Kernel, KernelClass, Spacing,
    Weight,
};

fn main() -> hardybound::Result<()> {
    let kernel = Kernel::constant(KernelClass::Plus);
    let v = Weight::power(1.0, 0.5);
    let grid = Grid::new(0.01, 100.0, 400, Spacing::Geometric)?;

    // F(x) ≈ ∫_0^x s^{1/2} ds = (2/3) x^{3/2} on this window.
    let samples = cumulative_primitive(&kernel, &v, &|_s| 1.0, &grid)?;
    let at_end = samples.last().unwrap();
    println!(
        "primitive at x = {:.1}: {:.4} (closed form {:.4})",
        at_end.0,
        at_end.1,
        2.0 / 3.0 * at_end.0.powf(1.5)
    );

    let partition = partition_levels(&samples, 1.0)?;
    println!("\nh = {} gives {} breakpoints:", partition.h, partition.breakpoints.len());
    println!("{:>10} {:>7} {:>14} {:>14}", "position", "level", "F(position)", "2^level · h");
    for b in &partition.breakpoints {
        println!(
            "{:>10.4} {:>7} {:>14.6} {:>14.6}",
            b.position,
            b.level,
            b.value,
            2f64.powi(b.level as i32) * partition.h
        );
    }

    let check = verify_partition(&samples, &partition);
    println!("\naudit: ok = {}", check.ok);
    for v in &check.violations {
        println!("  violation: {v}");
    }

    // Corrupt one breakpoint and watch the audit object.
    let mut tampered = partition.clone();
    if let Some(b) = tampered.breakpoints.get_mut(2) {
        b.position *= 1.1;
    }
    let check = verify_partition(&samples, &tampered);
    println!("\nafter nudging a breakpoint off-grid: ok = {}", check.ok);
    for v in check.violations.iter().take(3) {
        println!("  violation: {v}");
    }
    Ok(())
}
