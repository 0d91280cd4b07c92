//! Integral-operator kernels with two-sided decompositions.
//!
//! A kernel of *order n* here is a nonnegative function `K(x, s)` on
//! `x ≥ s > 0` that splits, for every interior point `x ≥ t ≥ s`, into a sum
//! of `n + 1` products
//!
//! ```text
//!   h⁻¹ · Σᵢ (companion i at one pair) · (member i at the other pair)
//!     ≤ K(x, s) ≤
//!   h  · Σᵢ (companion i) · (member i)
//! ```
//!
//! where the *members* `K₀, …, Kₙ` are kernels of increasing order
//! (`K₀ ≡ 1`, `Kₙ = K`), the *companions* `K_{n,i}` are auxiliary functions
//! with `K_{n,n} ≡ 1`, and `h ≥ 1` measures how far the split is from an
//! identity. Which pair the companion acts on is the class:
//!
//! * [`KernelClass::Plus`] — companions take the outer pair `(x, t)` and the
//!   kernel is nondecreasing in its first argument;
//! * [`KernelClass::Minus`] — companions take the inner pair `(t, s)` and
//!   the kernel is nonincreasing in its second argument.
//!
//! The struct stores everything the boundedness criteria and the class
//! diagnostics need: the kernel itself, its companions, and the lower-order
//! members (full kernels recursively, so chain inequalities across orders
//! can be checked too).

mod builtin;
mod compose;
mod diagnostics;

pub use builtin::TableData;
pub use compose::compose;
pub use diagnostics::{
    check_companion_laws, estimate_min_h, verify_membership, CompanionReport, MembershipReport,
    MinHEstimate,
};

use crate::error::{Error, Result};
use std::sync::Arc;

/// Pointwise kernel piece: a function of an ordered pair `(hi, lo)`.
pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Which argument pair the decomposition's companions act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelClass {
    /// Companions at the outer pair `(x, t)`; kernel nondecreasing in `x`.
    Plus,
    /// Companions at the inner pair `(t, s)`; kernel nonincreasing in `s`.
    Minus,
}

impl KernelClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelClass::Plus => "plus",
            KernelClass::Minus => "minus",
        }
    }
}

/// A kernel together with its decomposition data.
#[derive(Clone)]
pub struct Kernel {
    label: String,
    class: KernelClass,
    order: usize,
    /// Decomposition constant, when known in closed form.
    h: Option<f64>,
    eval_fn: KernelFn,
    /// `K_{n,i}` for `i = 0 … n−1`; `K_{n,n} ≡ 1` is implicit.
    companions: Vec<KernelFn>,
    /// Members `K_i` for `i = 0 … n−1`; `K_n` is the kernel itself.
    lower: Vec<Kernel>,
    /// False when only the kernel itself is known (no companion family);
    /// such kernels still support the top component `i = n`.
    has_decomposition: bool,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel")
            .field("label", &self.label)
            .field("class", &self.class)
            .field("order", &self.order)
            .field("h", &self.h)
            .field("has_decomposition", &self.has_decomposition)
            .finish_non_exhaustive()
    }
}

impl Kernel {
    /// Assembles a kernel from explicit parts.
    ///
    /// `companions` and `lower` must both have length `order` (entries for
    /// `i = 0 … order−1`); pass empty vectors with `has_decomposition =
    /// false` for a kernel known only pointwise.
    pub fn from_parts(
        label: impl Into<String>,
        class: KernelClass,
        order: usize,
        h: Option<f64>,
        eval_fn: KernelFn,
        companions: Vec<KernelFn>,
        lower: Vec<Kernel>,
        has_decomposition: bool,
    ) -> Result<Kernel> {
        if has_decomposition && (companions.len() != order || lower.len() != order) {
            return Err(Error::invalid(format!(
                "kernel of order {order} needs {order} companions and {order} \
                 lower members, got {} and {}",
                companions.len(),
                lower.len()
            )));
        }
        if let Some(hv) = h {
            if !(hv >= 1.0) || !hv.is_finite() {
                return Err(Error::invalid(format!(
                    "decomposition constant must satisfy h ≥ 1, got {hv}"
                )));
            }
        }
        for (i, lk) in lower.iter().enumerate() {
            if lk.order != i {
                return Err(Error::invalid(format!(
                    "lower member at position {i} must have order {i}, has {}",
                    lk.order
                )));
            }
            if lk.class != class {
                return Err(Error::invalid(
                    "lower members must share the kernel's class",
                ));
            }
        }
        Ok(Kernel {
            label: label.into(),
            class,
            order,
            h,
            eval_fn,
            companions,
            lower,
            has_decomposition,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn class(&self) -> KernelClass {
        self.class
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Known decomposition constant, if any.
    pub fn h(&self) -> Option<f64> {
        self.h
    }

    pub fn has_decomposition(&self) -> bool {
        self.has_decomposition
    }

    /// Checked evaluation at `x ≥ s ≥ 0`, `x > 0`. The lower argument may
    /// sit at `0` as a limit where the kernel's formula extends there.
    pub fn eval(&self, x: f64, s: f64) -> Result<f64> {
        if !(x > 0.0) || !(s >= 0.0) || s > x || !x.is_finite() {
            return Err(Error::invalid(format!(
                "kernel arguments must satisfy x ≥ s ≥ 0 with x > 0, got ({x}, {s})"
            )));
        }
        let v = (self.eval_fn)(x, s);
        if !v.is_finite() {
            return Err(Error::invalid(format!(
                "kernel '{}' is not finite at ({x}, {s})",
                self.label
            )));
        }
        Ok(v)
    }

    /// Unchecked evaluation for quadrature interiors: out-of-domain pairs
    /// give `0`, failures surface as non-finite values the integrator flags.
    pub fn eval_raw(&self, x: f64, s: f64) -> f64 {
        if s > x {
            return 0.0;
        }
        (self.eval_fn)(x, s)
    }

    /// Companion `K_{n,i}` at a pair; `i = order` is the constant `1`.
    pub fn companion_raw(&self, i: usize, hi: f64, lo: f64) -> f64 {
        if i == self.order {
            return 1.0;
        }
        if lo > hi {
            return 0.0;
        }
        (self.companions[i])(hi, lo)
    }

    /// Member `K_i` at a pair; `i = order` is the kernel itself.
    pub fn member_raw(&self, i: usize, hi: f64, lo: f64) -> f64 {
        if i == self.order {
            return self.eval_raw(hi, lo);
        }
        self.lower[i].eval_raw(hi, lo)
    }

    /// The lower-order member kernel `K_i` (`i < order`).
    pub fn member(&self, i: usize) -> Option<&Kernel> {
        self.lower.get(i)
    }

    /// The decomposition sum `Σᵢ companionᵢ · memberᵢ` at `x ≥ t ≥ s`,
    /// with the companion on the pair dictated by the class.
    pub fn decomposition_sum_raw(&self, x: f64, t: f64, s: f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..=self.order {
            let term = match self.class {
                KernelClass::Plus => self.companion_raw(i, x, t) * self.member_raw(i, t, s),
                KernelClass::Minus => self.member_raw(i, x, t) * self.companion_raw(i, t, s),
            };
            sum += term;
        }
        sum
    }

    /// Re-expresses the kernel at order `n + 1` without changing its values:
    /// the old top term moves down into the member list with a zero
    /// companion taking its slot, so the decomposition sum — and therefore
    /// `h` — is untouched.
    ///
    /// This is how an order-0 (constant-like) kernel enters criteria that
    /// are stated for orders `n ≥ 1`.
    pub fn promoted(&self) -> Kernel {
        let mut lower = self.lower.clone();
        lower.push(self.clone());
        let mut companions = self.companions.clone();
        companions.push(Arc::new(|_, _| 0.0));
        Kernel {
            label: self.label.clone(),
            class: self.class,
            order: self.order + 1,
            h: self.h,
            eval_fn: Arc::clone(&self.eval_fn),
            companions,
            lower,
            has_decomposition: self.has_decomposition,
        }
    }

    /// The kernel at order `max(order, 1)` — criteria call this so order-0
    /// kernels participate transparently.
    pub fn at_least_order_one(&self) -> Kernel {
        if self.order == 0 {
            self.promoted()
        } else {
            self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Spacing};
    use proptest::prelude::*;

    #[test]
    fn promotion_preserves_values_and_sum() {
        let k = Kernel::constant(KernelClass::Plus);
        assert_eq!(k.order(), 0);
        let p = k.promoted();
        assert_eq!(p.order(), 1);
        assert_eq!(p.eval(2.0, 1.0).unwrap(), 1.0);
        // Zero companion at i = 0, implicit 1 at i = 1.
        assert_eq!(p.companion_raw(0, 2.0, 1.5), 0.0);
        assert_eq!(p.companion_raw(1, 2.0, 1.5), 1.0);
        assert_eq!(p.decomposition_sum_raw(3.0, 2.0, 1.0), 1.0);
    }

    #[test]
    fn promotion_of_order_one_keeps_the_split_exact() {
        let k = Kernel::log_ratio(KernelClass::Plus).promoted();
        assert_eq!(k.order(), 2);
        let (x, t, s) = (9.0, 3.0, 1.0);
        let sum = k.decomposition_sum_raw(x, t, s);
        assert!((sum - (x / s).ln()).abs() < 1e-14);
    }

    #[test]
    fn eval_validates_the_domain() {
        let k = Kernel::log_ratio(KernelClass::Plus);
        assert!(k.eval(1.0, 2.0).is_err()); // x < s
        assert!(k.eval(-1.0, -2.0).is_err());
        assert!(k.eval(1.0, 0.0).is_err()); // log blows up at s = 0
        let pd = Kernel::power_diff(0.5, KernelClass::Plus).unwrap();
        assert!((pd.eval(4.0, 0.0).unwrap() - 2.0).abs() < 1e-15); // limit fine here
    }

    #[test]
    fn from_parts_checks_shapes() {
        let unit: KernelFn = Arc::new(|_, _| 1.0);
        let bad = Kernel::from_parts(
            "bad",
            KernelClass::Plus,
            2,
            Some(1.0),
            Arc::clone(&unit),
            vec![Arc::clone(&unit)], // only one companion for order 2
            vec![Kernel::constant(KernelClass::Plus)],
            true,
        );
        assert!(bad.is_err());
        let bad_h = Kernel::from_parts(
            "bad-h",
            KernelClass::Plus,
            0,
            Some(0.5),
            unit,
            vec![],
            vec![],
            true,
        );
        assert!(bad_h.is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn decomposition_brackets_builtins(
            s in 1e-3f64..10.0,
            r1 in 1.0f64..20.0,
            r2 in 1.0f64..20.0,
            alpha in 0.2f64..1.0,
            minus in proptest::bool::ANY,
        ) {
            let class = if minus { KernelClass::Minus } else { KernelClass::Plus };
            let t = s * r1;
            let x = t * r2;
            for k in [
                Kernel::log_ratio(class),
                Kernel::power_diff(alpha, class).unwrap(),
                Kernel::power_diff(2.0, class).unwrap(),
                Kernel::power_diff(3.0, class).unwrap(),
            ] {
                let h = k.h().unwrap();
                let kv = k.eval_raw(x, s);
                let sum = k.decomposition_sum_raw(x, t, s);
                // h⁻¹·Σ ≤ K ≤ h·Σ, with float slack.
                let slack = 1e-9 * sum.abs().max(kv.abs()).max(1e-300);
                prop_assert!(sum / h <= kv + slack,
                    "{}: sum/h = {} > K = {}", k.label(), sum / h, kv);
                prop_assert!(kv <= h * sum + slack,
                    "{}: K = {} > h·sum = {}", k.label(), kv, h * sum);
            }
        }

        #[test]
        fn monotonicity_matches_class(
            s in 1e-2f64..5.0,
            r in 1.05f64..10.0,
            bump in 1.05f64..3.0,
        ) {
            let x = s * r;
            for k in [
                Kernel::log_ratio(KernelClass::Plus),
                Kernel::power_diff(0.5, KernelClass::Plus).unwrap(),
                Kernel::power_diff(2.0, KernelClass::Plus).unwrap(),
            ] {
                // Plus: nondecreasing in the first argument.
                prop_assert!(k.eval_raw(x * bump, s) >= k.eval_raw(x, s) - 1e-12);
            }
            for k in [
                Kernel::log_ratio(KernelClass::Minus),
                Kernel::power_diff(0.5, KernelClass::Minus).unwrap(),
            ] {
                // Minus: nonincreasing in the second argument.
                prop_assert!(k.eval_raw(x, s * bump.min(r * 0.99)) <= k.eval_raw(x, s) + 1e-12);
            }
        }
    }

    #[test]
    fn triples_from_grids_satisfy_exact_splits() {
        let g = Grid::new(0.5, 50.0, 8, Spacing::Geometric).unwrap();
        let k = Kernel::power_diff(3.0, KernelClass::Plus).unwrap();
        for (x, t, s) in g.triples() {
            let sum = k.decomposition_sum_raw(x, t, s);
            let kv = k.eval_raw(x, s);
            assert!(
                (sum - kv).abs() <= 1e-9 * kv.abs().max(1.0),
                "binomial split must be exact at ({x}, {t}, {s}): {sum} vs {kv}"
            );
        }
    }
}
