//! Kernel composition through an intermediate weight.
//!
//! Two kernels of orders `n` and `m` in the same class combine into
//!
//! ```text
//!   (K_A ∘w K_B)(x, s) = ∫_s^x K_A(x, t) · w(t) · K_B(t, s) dt
//! ```
//!
//! which again belongs to the class, with order `n + m + 1` (the extra `+1`
//! is the integration variable acting as one more splitting level). The
//! composed kernel is produced *pointwise only*: no companion family is
//! fabricated for it, so diagnostics that need companions reject it while
//! the top criterion component (whose companion is the constant `1`)
//! remains available.

use super::{Kernel, KernelFn};
use crate::error::{Error, Result};
use crate::quad::{self, QuadTol};
use crate::weights::Weight;
use std::sync::Arc;

/// Composes `outer ∘w inner`. Evaluation failures inside the defining
/// integral surface as NaN from the raw evaluator, which checked callers
/// and the adaptive integrator turn into errors.
pub fn compose(outer: &Kernel, weight: Weight, inner: &Kernel) -> Result<Kernel> {
    if outer.class() != inner.class() {
        return Err(Error::invalid(format!(
            "cannot compose kernels of different classes ({} vs {})",
            outer.class().as_str(),
            inner.class().as_str()
        )));
    }
    let order = outer.order() + inner.order() + 1;
    let label = format!("compose({}, {})", outer.label(), inner.label());
    let class = outer.class();
    let a = outer.clone();
    let b = inner.clone();
    let tol = QuadTol {
        rel: 1e-10,
        ..QuadTol::default()
    };
    let breaks = weight.breakpoints();
    let eval: KernelFn = Arc::new(move |x: f64, s: f64| {
        if s > x {
            return 0.0;
        }
        if s == x {
            return 0.0;
        }
        let mut f = |t: f64| a.eval_raw(x, t) * weight.eval_or_zero(t) * b.eval_raw(t, s);
        match quad::integrate(&mut f, s, x, &breaks, &tol) {
            Ok(out) => out.value,
            Err(_) => f64::NAN,
        }
    });
    Kernel::from_parts(label, class, order, None, eval, vec![], vec![], false)
}
