//! Grid-based diagnostics for kernel-class membership.
//!
//! All three checks sweep ordered triples `x ≥ t ≥ s` from a [`Grid`] and
//! compare the kernel against its decomposition sum. Because only finitely
//! many triples are inspected, constants reported here are *lower bounds*
//! for the true suprema: a membership failure found on the grid is
//! conclusive, a pass is evidence over that grid.

use super::{Kernel, KernelClass};
use serde::Serialize;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Relative slack applied to ratio comparisons so exact identities survive
/// float rounding.
const RATIO_SLACK: f64 = 1e-9;

/// A grid estimate of the smallest workable decomposition constant.
#[derive(Debug, Clone, Serialize)]
pub struct MinHEstimate {
    /// Largest `max(Σ/K, K/Σ)` seen — a lower bound for the minimal `h`.
    pub value: f64,
    /// Triple where the bound was attained.
    pub attained_at: (f64, f64, f64),
    /// Triples with both kernel and sum meaningfully positive.
    pub triples_used: usize,
    /// True when widening the grid by a decade grows the estimate by more
    /// than 20% — the signature of a kernel whose ratio is unbounded.
    pub suspected_unbounded: bool,
}

/// Estimates the minimal decomposition constant of `k` over the grid.
pub fn estimate_min_h(k: &Kernel, grid: &Grid) -> Result<MinHEstimate> {
    if !k.has_decomposition() {
        return Err(Error::invalid(format!(
            "kernel '{}' carries no companion family; no split to measure",
            k.label()
        )));
    }
    let (value, attained_at, triples_used) = scan_ratio_extremes(k, grid)?;
    // Widen by one decade on each side with the same point count and see
    // whether the estimate keeps growing.
    let wide = Grid::new(grid.lo() / 10.0, grid.hi() * 10.0, grid.len(), grid.spacing())?;
    let (wide_value, _, _) = scan_ratio_extremes(k, &wide)?;
    let suspected_unbounded = wide_value > 1.2 * value;
    Ok(MinHEstimate {
        value,
        attained_at,
        triples_used,
        suspected_unbounded,
    })
}

fn scan_ratio_extremes(k: &Kernel, grid: &Grid) -> Result<(f64, (f64, f64, f64), usize)> {
    let mut best = 1.0f64;
    let mut at = (0.0, 0.0, 0.0);
    let mut used = 0usize;
    for (x, t, s) in grid.triples() {
        let kv = k.eval_raw(x, s);
        let sum = k.decomposition_sum_raw(x, t, s);
        if !kv.is_finite() || !sum.is_finite() {
            return Err(Error::invalid(format!(
                "kernel '{}' is not finite on the diagnostic grid at ({x}, {t}, {s})",
                k.label()
            )));
        }
        if kv <= 0.0 || sum <= 0.0 {
            continue;
        }
        used += 1;
        let ratio = (sum / kv).max(kv / sum);
        if ratio > best {
            best = ratio;
            at = (x, t, s);
        }
    }
    if used == 0 {
        return Err(Error::invalid(format!(
            "kernel '{}' vanishes on every grid triple; enlarge the grid",
            k.label()
        )));
    }
    Ok((best, at, used))
}

/// Outcome of testing `h⁻¹·Σ ≤ K ≤ h·Σ` over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    /// All triples satisfied both bounds (with float slack).
    pub ok: bool,
    /// The constant the bounds were tested against.
    pub h_used: f64,
    /// max Σ/K over the grid — must not exceed `h`.
    pub worst_upper: f64,
    pub worst_upper_at: (f64, f64, f64),
    /// min Σ/K over the grid — must not fall below `1/h`.
    pub worst_lower: f64,
    pub worst_lower_at: (f64, f64, f64),
    pub triples_used: usize,
}

/// Tests two-sided membership with constant `h` (defaults to the kernel's
/// own `h` when `None`).
pub fn verify_membership(k: &Kernel, grid: &Grid, h: Option<f64>) -> Result<MembershipReport> {
    let h_used = match h.or(k.h()) {
        Some(v) if v >= 1.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::invalid(format!(
                "membership constant must satisfy h ≥ 1, got {v}"
            )))
        }
        None => {
            return Err(Error::invalid(format!(
                "kernel '{}' has no decomposition constant; pass one explicitly",
                k.label()
            )))
        }
    };
    if !k.has_decomposition() {
        return Err(Error::invalid(format!(
            "kernel '{}' carries no companion family; membership is undecidable",
            k.label()
        )));
    }
    let mut worst_upper = f64::NEG_INFINITY;
    let mut worst_upper_at = (0.0, 0.0, 0.0);
    let mut worst_lower = f64::INFINITY;
    let mut worst_lower_at = (0.0, 0.0, 0.0);
    let mut used = 0usize;
    for (x, t, s) in grid.triples() {
        let kv = k.eval_raw(x, s);
        let sum = k.decomposition_sum_raw(x, t, s);
        if !kv.is_finite() || !sum.is_finite() {
            return Err(Error::invalid(format!(
                "kernel '{}' is not finite on the diagnostic grid at ({x}, {t}, {s})",
                k.label()
            )));
        }
        if kv <= 0.0 || sum <= 0.0 {
            continue;
        }
        used += 1;
        let rho = sum / kv;
        if rho > worst_upper {
            worst_upper = rho;
            worst_upper_at = (x, t, s);
        }
        if rho < worst_lower {
            worst_lower = rho;
            worst_lower_at = (x, t, s);
        }
    }
    if used == 0 {
        return Err(Error::invalid(format!(
            "kernel '{}' vanishes on every grid triple; enlarge the grid",
            k.label()
        )));
    }
    let ok = worst_upper <= h_used * (1.0 + RATIO_SLACK)
        && worst_lower >= (1.0 / h_used) * (1.0 - RATIO_SLACK);
    Ok(MembershipReport {
        ok,
        h_used,
        worst_upper,
        worst_upper_at,
        worst_lower,
        worst_lower_at,
        triples_used: used,
    })
}

/// Outcome of checking the structural laws of a companion family.
#[derive(Debug, Clone, Serialize)]
pub struct CompanionReport {
    /// Kernel and companions are monotone in the argument the class
    /// dictates.
    pub monotone_ok: bool,
    /// Most negative relative increment found (0 when monotone).
    pub worst_monotonicity: f64,
    /// max over chains of `K_{n,j}·K_{j,i} / K_{n,i}` — chained companions
    /// must be dominated by the direct one up to a constant; this is the
    /// grid bound for that constant.
    pub chain_bound: f64,
    /// All chain ratios were finite.
    pub chain_ok: bool,
    pub checks: usize,
}

/// Checks companion monotonicity and the cross-order chain inequality.
pub fn check_companion_laws(k: &Kernel, grid: &Grid) -> Result<CompanionReport> {
    if !k.has_decomposition() {
        return Err(Error::invalid(format!(
            "kernel '{}' carries no companion family",
            k.label()
        )));
    }
    let pts = grid.points();
    let n = k.order();
    let mut worst_mono = 0.0f64;
    let mut checks = 0usize;

    // Monotonicity: for the plus class every companion (and the kernel) is
    // nondecreasing in the upper argument; for the minus class they are
    // nonincreasing in the lower argument.
    for wi in 0..pts.len() {
        for wj in (wi + 1)..pts.len() {
            for &fixed in pts {
                checks += 1;
                match k.class() {
                    KernelClass::Plus => {
                        if fixed > pts[wi] {
                            continue;
                        }
                        for i in 0..=n {
                            let lo = k.companion_raw(i, pts[wi], fixed);
                            let hi = k.companion_raw(i, pts[wj], fixed);
                            relative_drop(lo, hi, &mut worst_mono);
                        }
                        let kv_lo = k.eval_raw(pts[wi], fixed);
                        let kv_hi = k.eval_raw(pts[wj], fixed);
                        relative_drop(kv_lo, kv_hi, &mut worst_mono);
                    }
                    KernelClass::Minus => {
                        if fixed < pts[wj] {
                            continue;
                        }
                        for i in 0..=n {
                            // Larger lower argument must not increase.
                            let hi = k.companion_raw(i, fixed, pts[wi]);
                            let lo = k.companion_raw(i, fixed, pts[wj]);
                            relative_drop(lo, hi, &mut worst_mono);
                        }
                        let kv_hi = k.eval_raw(fixed, pts[wi]);
                        let kv_lo = k.eval_raw(fixed, pts[wj]);
                        relative_drop(kv_lo, kv_hi, &mut worst_mono);
                    }
                }
            }
        }
    }

    // Chain inequality across orders: companion from n to j, then from j to
    // i, must be dominated by the direct companion from n to i up to a
    // constant. Member kernels carry their own companion families, so the
    // middle hop comes from them.
    let mut chain_bound = 1.0f64;
    let mut chain_ok = true;
    for (x, t, s) in grid.triples() {
        for j in 0..=n {
            let mid: &Kernel = if j == n {
                k
            } else {
                match k.member(j) {
                    Some(kj) if kj.has_decomposition() => kj,
                    _ => continue,
                }
            };
            for i in 0..=j {
                let (long, hop, direct) = match k.class() {
                    KernelClass::Plus => (
                        k.companion_raw(j, x, t),
                        mid.companion_raw(i, t, s),
                        k.companion_raw(i, x, s),
                    ),
                    KernelClass::Minus => (
                        k.companion_raw(j, t, s),
                        mid.companion_raw(i, x, t),
                        k.companion_raw(i, x, s),
                    ),
                };
                checks += 1;
                let num = long * hop;
                if num <= 0.0 {
                    continue;
                }
                if direct <= 0.0 {
                    chain_ok = false;
                    continue;
                }
                let ratio = num / direct;
                if !ratio.is_finite() {
                    chain_ok = false;
                } else if ratio > chain_bound {
                    chain_bound = ratio;
                }
            }
        }
    }

    Ok(CompanionReport {
        monotone_ok: worst_mono >= -RATIO_SLACK,
        worst_monotonicity: worst_mono,
        chain_bound,
        chain_ok,
        checks,
    })
}

/// Records the most negative relative step `hi − lo` into `worst`.
fn relative_drop(lo: f64, hi: f64, worst: &mut f64) {
    let scale = lo.abs().max(hi.abs()).max(1e-300);
    let step = (hi - lo) / scale;
    if step < *worst {
        *worst = step;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Spacing;
    use crate::kernels::KernelFn;
    use std::sync::Arc;

    fn diag_grid() -> Grid {
        Grid::new(1e-2, 1e2, 30, Spacing::Geometric).unwrap()
    }

    #[test]
    fn exact_splits_report_h_one() {
        let g = diag_grid();
        for k in [
            Kernel::log_ratio(KernelClass::Plus),
            Kernel::power_diff(2.0, KernelClass::Plus).unwrap(),
            Kernel::power_diff(1.0, KernelClass::Minus).unwrap(),
        ] {
            let est = estimate_min_h(&k, &g).unwrap();
            assert!(
                (est.value - 1.0).abs() < 1e-10,
                "{} reported h = {}",
                k.label(),
                est.value
            );
            assert!(!est.suspected_unbounded);
        }
    }

    #[test]
    fn square_root_kernel_attains_its_constant() {
        let k = Kernel::power_diff(0.5, KernelClass::Plus).unwrap();
        let est = estimate_min_h(&k, &diag_grid()).unwrap();
        // The equal-gap supremum is √2; a 30-point geometric grid gets
        // within one percent of it.
        let target = 2f64.sqrt();
        assert!(
            (est.value - target).abs() / target < 0.01,
            "estimate {} vs {}",
            est.value,
            target
        );
        assert!(est.value <= target + 1e-12, "grid bound cannot exceed the supremum");
        assert!(!est.suspected_unbounded);
    }

    #[test]
    fn membership_flags_an_understated_constant() {
        let k = Kernel::power_diff(0.5, KernelClass::Plus).unwrap();
        let claimed_one = verify_membership(&k, &diag_grid(), Some(1.0)).unwrap();
        assert!(!claimed_one.ok);
        assert!(claimed_one.worst_upper > 1.4);
        let honest = verify_membership(&k, &diag_grid(), None).unwrap();
        assert!(honest.ok, "true constant √2 must pass: {honest:?}");
        assert!(honest.worst_lower >= 1.0 - 1e-12, "subadditive sum never undershoots");
    }

    #[test]
    fn companion_laws_hold_for_builtins() {
        let g = Grid::new(0.1, 10.0, 12, Spacing::Geometric).unwrap();
        for k in [
            Kernel::log_ratio(KernelClass::Plus),
            Kernel::log_ratio(KernelClass::Minus),
            Kernel::power_diff(3.0, KernelClass::Plus).unwrap(),
            Kernel::power_diff(0.5, KernelClass::Minus).unwrap(),
        ] {
            let rep = check_companion_laws(&k, &g).unwrap();
            assert!(rep.monotone_ok, "{}: {rep:?}", k.label());
            assert!(rep.chain_ok, "{}: {rep:?}", k.label());
            assert!(rep.chain_bound.is_finite());
        }
    }

    #[test]
    fn swapped_companions_are_caught() {
        // Corrupt the quadratic kernel by exchanging its two nontrivial
        // companions; the split stops bracketing the kernel.
        let good = Kernel::power_diff(2.0, KernelClass::Plus).unwrap();
        let c0: KernelFn = Arc::new(|a: f64, b: f64| {
            if a >= b {
                2.0 * (a - b)
            } else {
                0.0
            }
        });
        let c1: KernelFn = Arc::new(|a: f64, b: f64| {
            if a >= b {
                (a - b) * (a - b)
            } else {
                0.0
            }
        });
        let corrupted = Kernel::from_parts(
            "corrupted",
            KernelClass::Plus,
            2,
            Some(1.0),
            Arc::new(|a: f64, b: f64| if a >= b { (a - b) * (a - b) } else { 0.0 }),
            vec![c0, c1],
            vec![
                Kernel::constant(KernelClass::Plus),
                Kernel::power_diff(1.0, KernelClass::Plus).unwrap(),
            ],
            true,
        )
        .unwrap();
        let g = diag_grid();
        assert!(verify_membership(&good, &g, None).unwrap().ok);
        let rep = verify_membership(&corrupted, &g, None).unwrap();
        assert!(!rep.ok, "swapped companions must break membership: {rep:?}");
    }

    #[test]
    fn unbounded_ratio_is_suspected() {
        // K(x,s) = e^{x−s} − 1 claimed at order 1: K/(K(x,t)+K(t,s)) grows
        // like e^{gap}/2 at equal gaps, so no constant works and widening
        // the grid keeps inflating the estimate.
        let eval: KernelFn = Arc::new(|a: f64, b: f64| {
            if a >= b {
                (a - b).exp_m1()
            } else {
                0.0
            }
        });
        let not_a_member = Kernel::from_parts(
            "exp-gap-as-order-1",
            KernelClass::Plus,
            1,
            None,
            Arc::clone(&eval),
            vec![eval],
            vec![Kernel::constant(KernelClass::Plus)],
            true,
        )
        .unwrap();
        let small = Grid::new(0.1, 5.0, 12, Spacing::Geometric).unwrap();
        let est = estimate_min_h(&not_a_member, &small).unwrap();
        assert!(est.value > 3.0, "ratio already large: {}", est.value);
        assert!(est.suspected_unbounded);
    }

    #[test]
    fn pointwise_only_kernels_are_rejected() {
        let eval: KernelFn = Arc::new(|_, _| 1.0);
        let bare = Kernel::from_parts(
            "bare",
            KernelClass::Plus,
            2,
            None,
            eval,
            vec![],
            vec![],
            false,
        )
        .unwrap();
        assert!(estimate_min_h(&bare, &diag_grid()).is_err());
        assert!(verify_membership(&bare, &diag_grid(), Some(1.0)).is_err());
        assert!(check_companion_laws(&bare, &diag_grid()).is_err());
    }
}
