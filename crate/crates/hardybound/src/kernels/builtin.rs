//! Built-in kernel families.
//!
//! * [`Kernel::constant`] — `K ≡ 1`, order 0.
//! * [`Kernel::log_ratio`] — `K(x, s) = ln(x/s)`, order 1, exact split
//!   (`h = 1`) since `ln(x/s) = ln(x/t) + ln(t/s)`.
//! * [`Kernel::power_diff`] — `K(x, s) = (x − s)^α`:
//!   integer `α = m` gives order `m` with binomial companions and `h = 1`;
//!   fractional `α ∈ (0, 1)` gives order 1 with `h = 2^{1−α}` (the split is
//!   tight at equal-gap triples); fractional `α > 1` is rejected — those
//!   kernels do not admit an order-1 two-sided split with bounded constant.
//! * [`Kernel::table`] — bilinear interpolation in `(ln x, ln s)` through
//!   measured values, clamped outside the tabulated box; claimed order 1
//!   gets the canonical one-term split (the kernel itself as its own
//!   companion), anything else is kept pointwise-only.

use super::{Kernel, KernelClass, KernelFn};
use crate::error::{Error, Result};
use std::sync::Arc;

/// `C(n, k)` as a float, by the multiplicative rule.
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// Difference power, zero out of domain, defined with a limit at `a = b`.
fn diff_pow(a: f64, b: f64, alpha: f64) -> f64 {
    let d = a - b;
    if d <= 0.0 {
        if alpha == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        d.powf(alpha)
    }
}

impl Kernel {
    /// The constant kernel `K ≡ 1` (order 0).
    pub fn constant(class: KernelClass) -> Kernel {
        Kernel::from_parts(
            "constant",
            class,
            0,
            Some(1.0),
            Arc::new(|_, _| 1.0),
            vec![],
            vec![],
            true,
        )
        .expect("constant kernel parts are consistent")
    }

    /// `K(x, s) = ln(x/s)` (order 1, `h = 1`).
    pub fn log_ratio(class: KernelClass) -> Kernel {
        let eval: KernelFn = Arc::new(|a: f64, b: f64| {
            if b <= 0.0 || a < b {
                if a < b {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (a / b).ln()
            }
        });
        // The additive split uses the kernel itself on whichever pair the
        // class assigns to companions.
        Kernel::from_parts(
            "log_ratio",
            class,
            1,
            Some(1.0),
            Arc::clone(&eval),
            vec![eval],
            vec![Kernel::constant(class)],
            true,
        )
        .expect("log_ratio kernel parts are consistent")
    }

    /// `K(x, s) = (x − s)^α` for `α > 0`.
    pub fn power_diff(alpha: f64, class: KernelClass) -> Result<Kernel> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!(
                "difference-power exponent must be positive and finite, got {alpha}"
            )));
        }
        let rounded = alpha.round();
        let is_integer = (alpha - rounded).abs() < 1e-9 && rounded >= 1.0;
        if is_integer {
            return Ok(power_diff_integer(rounded as usize, class));
        }
        if alpha > 1.0 {
            return Err(Error::invalid(format!(
                "difference-power exponent {alpha}: fractional exponents above 1 \
                 admit no two-sided split of bounded order; use an integer \
                 exponent or α in (0, 1]"
            )));
        }
        let eval: KernelFn = Arc::new(move |a: f64, b: f64| diff_pow(a, b, alpha));
        let label = format!("power_diff({alpha})");
        // (x−s)^α ≤ (x−t)^α + (t−s)^α ≤ 2^{1−α}(x−s)^α: an order-1 split
        // with the kernel as its own companion; the upper constant is
        // attained at equal gaps.
        Kernel::from_parts(
            label,
            class,
            1,
            Some(2f64.powf(1.0 - alpha)),
            Arc::clone(&eval),
            vec![eval],
            vec![Kernel::constant(class)],
            true,
        )
    }

    /// Tabulated kernel, bilinear in `(ln x, ln s)` with clamping outside
    /// the box. `claimed_order` 1 receives the canonical split; other
    /// orders stay pointwise-only (top component still computable).
    pub fn table(data: TableData, claimed_order: usize, claimed_h: Option<f64>) -> Result<Kernel> {
        let table = Arc::new(data.validated()?);
        let t2 = Arc::clone(&table);
        let eval: KernelFn = Arc::new(move |a: f64, b: f64| t2.eval(a, b));
        let label = format!("table[{}x{}]", table.log_x.len(), table.log_s.len());
        if claimed_order == 1 {
            Ok(Kernel::from_parts(
                label,
                KernelClass::Plus,
                1,
                claimed_h,
                Arc::clone(&eval),
                vec![Arc::clone(&eval)],
                vec![Kernel::constant(KernelClass::Plus)],
                true,
            )?)
        } else {
            Kernel::from_parts(
                label,
                KernelClass::Plus,
                claimed_order,
                claimed_h,
                eval,
                vec![],
                vec![],
                false,
            )
        }
    }
}

/// Raw samples for a tabulated kernel: values on the product of two
/// positive abscissa lists, interpreted bilinearly in log-log coordinates.
#[derive(Debug, Clone)]
pub struct TableData {
    /// First-argument abscissae (strictly increasing, positive).
    pub x: Vec<f64>,
    /// Second-argument abscissae (strictly increasing, positive).
    pub s: Vec<f64>,
    /// `values[j][k]` is the kernel at `(x[j], s[k])`; nonnegative.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub(super) struct TableInterp {
    log_x: Vec<f64>,
    log_s: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TableData {
    fn validated(self) -> Result<TableInterp> {
        let check_axis = |v: &[f64], name: &str| -> Result<()> {
            if v.len() < 2 {
                return Err(Error::invalid(format!(
                    "kernel table needs at least 2 {name} abscissae"
                )));
            }
            for w in v.windows(2) {
                if !(w[0] > 0.0) || !(w[1] > w[0]) {
                    return Err(Error::invalid(format!(
                        "kernel table {name} abscissae must be positive and \
                         strictly increasing"
                    )));
                }
            }
            Ok(())
        };
        check_axis(&self.x, "x")?;
        check_axis(&self.s, "s")?;
        if self.values.len() != self.x.len()
            || self.values.iter().any(|row| row.len() != self.s.len())
        {
            return Err(Error::invalid(
                "kernel table values must be an x-by-s matrix",
            ));
        }
        if self
            .values
            .iter()
            .flatten()
            .any(|v| !(*v >= 0.0) || !v.is_finite())
        {
            return Err(Error::invalid(
                "kernel table values must be finite and nonnegative",
            ));
        }
        Ok(TableInterp {
            log_x: self.x.iter().map(|t| t.ln()).collect(),
            log_s: self.s.iter().map(|t| t.ln()).collect(),
            values: self.values,
        })
    }
}

impl TableInterp {
    fn eval(&self, a: f64, b: f64) -> f64 {
        if !(a > 0.0) || !(b > 0.0) {
            return f64::NAN;
        }
        let la = a.ln().clamp(self.log_x[0], *self.log_x.last().unwrap());
        let lb = b.ln().clamp(self.log_s[0], *self.log_s.last().unwrap());
        let j = cell_index(&self.log_x, la);
        let k = cell_index(&self.log_s, lb);
        let fx = (la - self.log_x[j]) / (self.log_x[j + 1] - self.log_x[j]);
        let fs = (lb - self.log_s[k]) / (self.log_s[k + 1] - self.log_s[k]);
        let v00 = self.values[j][k];
        let v10 = self.values[j + 1][k];
        let v01 = self.values[j][k + 1];
        let v11 = self.values[j + 1][k + 1];
        v00 * (1.0 - fx) * (1.0 - fs)
            + v10 * fx * (1.0 - fs)
            + v01 * (1.0 - fx) * fs
            + v11 * fx * fs
    }
}

fn cell_index(axis: &[f64], t: f64) -> usize {
    let idx = axis.partition_point(|&a| a <= t);
    idx.clamp(1, axis.len() - 1) - 1
}

fn power_diff_integer(m: usize, class: KernelClass) -> Kernel {
    let eval: KernelFn = Arc::new(move |a: f64, b: f64| diff_pow(a, b, m as f64));
    // Binomial identity: (x−s)^m = Σᵢ C(m,i)·(x−t)^{m−i}·(t−s)^i, an exact
    // split of order m. The coefficient rides on the companion slot for
    // either class; the members are the lower difference powers.
    let mut companions: Vec<KernelFn> = Vec::with_capacity(m);
    let mut lower = Vec::with_capacity(m);
    for i in 0..m {
        let coeff = binomial(m, i);
        let gap = (m - i) as f64;
        companions.push(Arc::new(move |a: f64, b: f64| {
            coeff * diff_pow(a, b, gap)
        }));
        lower.push(if i == 0 {
            Kernel::constant(class)
        } else {
            power_diff_integer(i, class)
        });
    }
    Kernel::from_parts(
        format!("power_diff({m})"),
        class,
        m,
        Some(1.0),
        eval,
        companions,
        lower,
        true,
    )
    .expect("binomial kernel parts are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_diff_dispatches_on_exponent() {
        let frac = Kernel::power_diff(0.5, KernelClass::Plus).unwrap();
        assert_eq!(frac.order(), 1);
        assert!((frac.h().unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let unit = Kernel::power_diff(1.0, KernelClass::Plus).unwrap();
        assert_eq!(unit.order(), 1);
        assert_eq!(unit.h().unwrap(), 1.0);

        let cubic = Kernel::power_diff(3.0, KernelClass::Plus).unwrap();
        assert_eq!(cubic.order(), 3);
        assert_eq!(cubic.h().unwrap(), 1.0);

        assert!(Kernel::power_diff(1.5, KernelClass::Plus).is_err());
        assert!(Kernel::power_diff(-1.0, KernelClass::Plus).is_err());
        assert!(Kernel::power_diff(0.0, KernelClass::Plus).is_err());
    }

    #[test]
    fn binomial_companions_carry_coefficients() {
        let k = Kernel::power_diff(2.0, KernelClass::Plus).unwrap();
        // K_{2,0}(a,b) = (a−b)², K_{2,1}(a,b) = 2(a−b), K_{2,2} = 1.
        assert!((k.companion_raw(0, 5.0, 2.0) - 9.0).abs() < 1e-12);
        assert!((k.companion_raw(1, 5.0, 2.0) - 6.0).abs() < 1e-12);
        assert_eq!(k.companion_raw(2, 5.0, 2.0), 1.0);
        // Members are the lower powers.
        assert_eq!(k.member_raw(0, 5.0, 2.0), 1.0);
        assert!((k.member_raw(1, 5.0, 2.0) - 3.0).abs() < 1e-12);
        assert!((k.member_raw(2, 5.0, 2.0) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn log_ratio_split_is_exact() {
        let k = Kernel::log_ratio(KernelClass::Plus);
        let (x, t, s) = (8.0, 4.0, 1.0);
        let sum = k.decomposition_sum_raw(x, t, s);
        assert!((sum - (x / s).ln()).abs() < 1e-14);
    }

    #[test]
    fn fractional_split_hits_its_constant_at_equal_gaps() {
        let k = Kernel::power_diff(0.5, KernelClass::Plus).unwrap();
        let (x, t, s) = (3.0, 2.0, 1.0); // equal gaps
        let ratio = k.decomposition_sum_raw(x, t, s) / k.eval_raw(x, s);
        assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn table_reproduces_a_log_linear_surface_exactly() {
        // ln(x/s) is linear in (ln x, ln s), so bilinear interpolation is
        // exact inside the box.
        let xs: Vec<f64> = vec![1.0, 4.0, 16.0, 64.0];
        let ss: Vec<f64> = vec![0.5, 2.0, 8.0];
        let values: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| ss.iter().map(|&s| (x / s).ln().max(0.0)).collect())
            .collect();
        let k = Kernel::table(
            TableData {
                x: xs,
                s: ss,
                values,
            },
            1,
            Some(1.0),
        )
        .unwrap();
        let v = k.eval(10.0, 1.0).unwrap();
        assert!((v - 10f64.ln()).abs() < 1e-12, "got {v}");
        // Clamped outside the box: beyond x = 64 the surface freezes.
        let clamped = k.eval(1000.0, 1.0).unwrap();
        assert!((clamped - 64f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn table_shape_validation() {
        let bad = Kernel::table(
            TableData {
                x: vec![1.0, 2.0],
                s: vec![1.0, 2.0],
                values: vec![vec![1.0, 2.0]], // one row missing
            },
            1,
            None,
        );
        assert!(bad.is_err());
        let negative = Kernel::table(
            TableData {
                x: vec![1.0, 2.0],
                s: vec![1.0, 2.0],
                values: vec![vec![1.0, -2.0], vec![1.0, 2.0]],
            },
            1,
            None,
        );
        assert!(negative.is_err());
    }

    #[test]
    fn binomial_helper() {
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(4, 1), 4.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 5), 1.0);
    }
}
