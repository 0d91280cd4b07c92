//! Level partitions of the operator's primitive.
//!
//! For a nondecreasing primitive `F` (the inner accumulation of the
//! cumulative operator applied to a fixed input), the points where `F`
//! first crosses each power of `1 + h` cut the half-line into segments on
//! which `F` moves by at most one multiplicative level. These partitions
//! are what decouples the operator into blockwise pieces: on each segment
//! the kernel's two-sided decomposition is exploited with the sandwich
//! constant `h` paying for the cut. This module computes the partition
//! from grid samples and independently verifies the defining bracketing,
//! so a claimed partition can be audited rather than trusted.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::Kernel;
use crate::weights::Weight;
use serde::Serialize;

/// Relative slack for bracket and monotonicity comparisons.
const SLACK: f64 = 1e-12;

/// One partition point: the first sample at which `F` reaches its level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub position: f64,
    /// `level = k` means `(1+h)^k ≤ F(position) < (1+h)^{k+1}`.
    pub level: i64,
    /// Sampled primitive value at the position.
    pub value: f64,
}

/// A computed level partition together with its ratio parameter.
#[derive(Debug, Clone, Serialize)]
pub struct LevelPartition {
    pub h: f64,
    pub breakpoints: Vec<Breakpoint>,
}

/// Result of auditing a partition against the samples it claims to cut.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionCheck {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Samples of the cumulative primitive
/// `F(x_j) = Σ_{s_k ≤ x_j} K(x_j, s_k) · v(s_k) · f(s_k) · Δ_k`
/// on the grid's own nodes, using the grid's cell tiling for `Δ`.
pub fn cumulative_primitive(
    kernel: &Kernel,
    v: &Weight,
    input: &dyn Fn(f64) -> f64,
    grid: &Grid,
) -> Result<Vec<(f64, f64)>> {
    let pts = grid.points();
    let widths = grid.cell_widths();
    let mut vals = Vec::with_capacity(pts.len());
    for (k, &s) in pts.iter().enumerate() {
        let fv = input(s);
        if !fv.is_finite() || fv < 0.0 {
            return Err(Error::invalid(format!(
                "input function must be finite and nonnegative, got {fv} at {s}"
            )));
        }
        vals.push(v.eval_or_zero(s) * fv * widths[k]);
    }
    let mut out = Vec::with_capacity(pts.len());
    for (j, &x) in pts.iter().enumerate() {
        let mut total = 0.0;
        for (k, &s) in pts.iter().enumerate().take(j + 1) {
            let kv = kernel.eval_raw(x, s);
            if !kv.is_finite() {
                return Err(Error::invalid(format!(
                    "kernel not finite at ({x}, {s})"
                )));
            }
            total += kv * vals[k];
        }
        out.push((x, total));
    }
    Ok(out)
}

/// True floor of `log_{1+h} value`, nudged so exact powers land on their
/// own level instead of one below (floating logs round either way).
fn level_of(value: f64, base: f64) -> i64 {
    let mut k = (value.ln() / base.ln()).floor() as i64;
    while base.powi((k + 1) as i32) <= value {
        k += 1;
    }
    while base.powi(k as i32) > value {
        k -= 1;
    }
    k
}

/// Computes the level partition of nondecreasing positive samples.
///
/// Samples with nonpositive primitive value are below every level and are
/// skipped; the first positive sample opens the first segment. Levels may
/// skip integers when `F` jumps across several powers at once.
pub fn partition_levels(samples: &[(f64, f64)], h: f64) -> Result<LevelPartition> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("level ratio h must be positive and finite"));
    }
    if samples.len() < 2 {
        return Err(Error::invalid("need at least two samples to partition"));
    }
    let base = 1.0 + h;
    let mut prev_pos = f64::NEG_INFINITY;
    let mut prev_val = 0.0f64;
    let mut current: Option<i64> = None;
    let mut breakpoints = Vec::new();
    for &(pos, val) in samples {
        if !(pos.is_finite() && val.is_finite()) {
            return Err(Error::invalid(format!(
                "sample ({pos}, {val}) is not finite"
            )));
        }
        if pos <= prev_pos {
            return Err(Error::invalid("sample positions must strictly increase"));
        }
        if val < prev_val * (1.0 - SLACK) - SLACK {
            return Err(Error::invalid(format!(
                "primitive decreases at {pos}: {prev_val} -> {val}"
            )));
        }
        prev_pos = pos;
        prev_val = prev_val.max(val);
        if val <= 0.0 {
            continue;
        }
        let k = level_of(val, base);
        if current.map_or(true, |c| k > c) {
            breakpoints.push(Breakpoint {
                position: pos,
                level: k,
                value: val,
            });
            current = Some(k);
        }
    }
    if breakpoints.is_empty() {
        return Err(Error::invalid(
            "no positive primitive values; nothing to partition",
        ));
    }
    Ok(LevelPartition { h, breakpoints })
}

/// Audits a partition against the samples: every breakpoint must sit on a
/// sample and satisfy its level bracket, levels and positions must
/// strictly increase, and between consecutive breakpoints the samples
/// must stay inside the earlier breakpoint's level.
pub fn verify_partition(
    samples: &[(f64, f64)],
    partition: &LevelPartition,
) -> PartitionCheck {
    let base = 1.0 + partition.h;
    let mut violations = Vec::new();
    if !(partition.h > 0.0) {
        violations.push(format!("ratio h = {} is not positive", partition.h));
    }
    // Brackets and sample membership.
    for bp in &partition.breakpoints {
        let lo = base.powi(bp.level as i32);
        let hi = base.powi((bp.level + 1) as i32);
        if !(bp.value >= lo * (1.0 - SLACK) && bp.value < hi * (1.0 + SLACK)) {
            violations.push(format!(
                "breakpoint at {} claims level {} but F = {} is outside [{}, {})",
                bp.position, bp.level, bp.value, lo, hi
            ));
        }
        let on_sample = samples.iter().any(|&(p, v)| {
            p == bp.position && (v - bp.value).abs() <= SLACK * v.abs().max(1.0)
        });
        if !on_sample {
            violations.push(format!(
                "breakpoint at {} does not coincide with any sample",
                bp.position
            ));
        }
    }
    // Ordering.
    for w in partition.breakpoints.windows(2) {
        if w[1].position <= w[0].position {
            violations.push(format!(
                "breakpoint positions not increasing: {} then {}",
                w[0].position, w[1].position
            ));
        }
        if w[1].level <= w[0].level {
            violations.push(format!(
                "breakpoint levels not increasing: {} then {}",
                w[0].level, w[1].level
            ));
        }
    }
    // Segment coverage: no sample inside a segment may leave its level.
    for (idx, bp) in partition.breakpoints.iter().enumerate() {
        let seg_end = partition
            .breakpoints
            .get(idx + 1)
            .map_or(f64::INFINITY, |b| b.position);
        let cap = base.powi((bp.level + 1) as i32);
        let floor_val = base.powi(bp.level as i32);
        for &(p, v) in samples {
            if p < bp.position || p >= seg_end {
                continue;
            }
            if v >= cap * (1.0 + SLACK) {
                violations.push(format!(
                    "sample at {p} has F = {v} ≥ {cap}, above level {} of its segment",
                    bp.level
                ));
            }
            if v < floor_val * (1.0 - SLACK) {
                violations.push(format!(
                    "sample at {p} has F = {v} < {floor_val}, below level {} of its segment",
                    bp.level
                ));
            }
        }
    }
    // Samples before the first breakpoint must not already reach it.
    if let Some(first) = partition.breakpoints.first() {
        let lo = base.powi(first.level as i32);
        for &(p, v) in samples {
            if p < first.position && v >= lo * (1.0 + SLACK) {
                violations.push(format!(
                    "sample at {p} already reaches level {} before the first breakpoint",
                    first.level
                ));
            }
        }
    }
    PartitionCheck {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Spacing;
    use crate::kernels::KernelClass;
    use proptest::prelude::*;

    fn straight_line_samples() -> Vec<(f64, f64)> {
        (1..=8).map(|k| (k as f64, k as f64)).collect()
    }

    #[test]
    fn doubling_partition_of_a_straight_line() {
        // F(x) = x on {1,…,8} with h = 1: levels double, so the first
        // samples of each level are 1, 2, 4, 8.
        let part = partition_levels(&straight_line_samples(), 1.0).unwrap();
        let positions: Vec<f64> = part.breakpoints.iter().map(|b| b.position).collect();
        let levels: Vec<i64> = part.breakpoints.iter().map(|b| b.level).collect();
        assert_eq!(positions, vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(levels, vec![0, 1, 2, 3]);
        let check = verify_partition(&straight_line_samples(), &part);
        assert!(check.ok, "{:?}", check.violations);
    }

    #[test]
    fn exact_powers_land_on_their_own_level() {
        // 2^k must be level k, not k−1, despite floating logs.
        for k in 0..40 {
            let v = 2f64.powi(k);
            assert_eq!(level_of(v, 2.0), k as i64, "value {v}");
            assert_eq!(level_of(v * (1.0 + 1e-9), 2.0), k as i64);
            assert_eq!(level_of(v * (1.0 - 1e-9), 2.0), k as i64 - 1);
        }
    }

    #[test]
    fn jumps_may_skip_levels() {
        let samples = vec![(1.0, 0.5), (2.0, 1.0), (3.0, 9.0)];
        let part = partition_levels(&samples, 1.0).unwrap();
        let levels: Vec<i64> = part.breakpoints.iter().map(|b| b.level).collect();
        assert_eq!(levels, vec![-1, 0, 3]);
        assert!(verify_partition(&samples, &part).ok);
    }

    #[test]
    fn zero_prefix_is_skipped() {
        let samples = vec![(0.5, 0.0), (1.0, 0.0), (2.0, 3.0), (3.0, 5.0)];
        let part = partition_levels(&samples, 1.0).unwrap();
        assert_eq!(part.breakpoints[0].position, 2.0);
        assert!(verify_partition(&samples, &part).ok);
    }

    #[test]
    fn corrupted_breakpoints_are_rejected() {
        let samples = straight_line_samples();
        let good = partition_levels(&samples, 1.0).unwrap();
        assert!(verify_partition(&samples, &good).ok);
        // Shift a position off the sample set.
        let mut shifted = good.clone();
        shifted.breakpoints[2].position *= 1.1;
        let check = verify_partition(&samples, &shifted);
        assert!(!check.ok);
        assert!(check
            .violations
            .iter()
            .any(|v| v.contains("does not coincide")));
        // Inflate a value out of its bracket.
        let mut inflated = good.clone();
        inflated.breakpoints[1].value *= 1.1;
        let check2 = verify_partition(&samples, &inflated);
        assert!(!check2.ok);
        // Drop a breakpoint: the segment then contains a sample above its
        // level cap.
        let mut dropped = good.clone();
        dropped.breakpoints.remove(2);
        let check3 = verify_partition(&samples, &dropped);
        assert!(!check3.ok);
        assert!(check3.violations.iter().any(|v| v.contains("above level")));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(partition_levels(&[(1.0, 1.0)], 1.0).is_err());
        assert!(partition_levels(&straight_line_samples(), 0.0).is_err());
        assert!(partition_levels(&[(1.0, 2.0), (2.0, 1.0)], 1.0).is_err());
        assert!(partition_levels(&[(2.0, 1.0), (1.0, 2.0)], 1.0).is_err());
        assert!(partition_levels(&[(1.0, 0.0), (2.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn primitive_of_unit_kernel_matches_cell_mass() {
        // K ≡ 1, v ≡ 1, f ≡ 1: F(x_j) is the total tiling mass up to x_j.
        let grid = Grid::new(1.0, 8.0, 8, Spacing::Uniform).unwrap();
        let kernel = Kernel::constant(KernelClass::Plus);
        let samples = cumulative_primitive(&kernel, &Weight::one(), &|_| 1.0, &grid).unwrap();
        // Uniform unit cells: F(x_j) = j + 1 cells of width 1.
        for (j, &(x, f)) in samples.iter().enumerate() {
            assert_eq!(x, (j + 1) as f64);
            assert!((f - (j + 1) as f64).abs() < 1e-12, "F({x}) = {f}");
        }
        let part = partition_levels(&samples, 1.0).unwrap();
        assert!(verify_partition(&samples, &part).ok);
    }

    #[test]
    fn primitive_respects_kernel_growth() {
        // K(x,s) = x − s on f ≡ 1, v ≡ 1: F(x) ≈ ∫_0^x (x−s) ds grows
        // quadratically; \"F at the last node\" dominates a coarse bound.
        let grid = Grid::new(0.5, 16.0, 40, Spacing::Geometric).unwrap();
        let kernel = Kernel::power_diff(1.0, KernelClass::Plus).unwrap();
        let samples = cumulative_primitive(&kernel, &Weight::one(), &|_| 1.0, &grid).unwrap();
        let (_, last) = samples[samples.len() - 1];
        assert!(last > 16.0 * 16.0 / 4.0, "F(16) = {last}");
        let part = partition_levels(&samples, 0.5).unwrap();
        assert!(verify_partition(&samples, &part).ok);
        // With a smaller ratio there are at least as many breakpoints.
        let finer = partition_levels(&samples, 0.25).unwrap();
        assert!(finer.breakpoints.len() >= part.breakpoints.len());
    }

    fn monotone_samples() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((0.01f64..2.0, 0.0f64..3.0), 2..40).prop_map(|incs| {
            let mut pos = 0.0;
            let mut val = 0.0;
            incs.into_iter()
                .map(|(dp, dv)| {
                    pos += dp;
                    val += dv;
                    (pos, val)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn computed_partitions_always_verify(
            samples in monotone_samples(),
            h in 0.1f64..3.0,
        ) {
            if let Ok(part) = partition_levels(&samples, h) {
                let check = verify_partition(&samples, &part);
                prop_assert!(check.ok, "{:?}", check.violations);
                for w in part.breakpoints.windows(2) {
                    prop_assert!(w[1].level > w[0].level);
                }
            }
        }
    }
}
