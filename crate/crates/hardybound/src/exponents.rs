//! Exponent bookkeeping for the fixed regime `1 < q < p < ∞`.
//!
//! Every criterion in this crate compares an operator acting from an
//! L_p-type space into an L_q-type space with q *strictly below* p. Six
//! derived exponents show up over and over in the integrals — the conjugate
//! exponents, the two powers of the "direct" integral form, the two powers of
//! the "dual" form obtained by integration by parts, and the outer power
//! applied to the whole thing. They are computed once, validated, and carried
//! around as a unit so no call site ever re-derives them ad hoc.

use crate::error::{Error, Result};
use serde::Serialize;

/// The derived exponent family for a `(p, q)` pair with `1 < q < p < ∞`.
///
/// Identities that hold by construction (and are property-tested):
///
/// * `outer_exp · tail_exp · q = 1`
/// * `inner_exp + 1 = dual_inner_exp`
/// * `dual_tail_exp + 1 = tail_exp`
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    /// Conjugate exponent p′ = p/(p−1).
    pub p_conj: f64,
    /// Conjugate exponent q′ = q/(q−1).
    pub q_conj: f64,
    /// p/(p−q) — power on the plain factor in the direct form.
    pub tail_exp: f64,
    /// p(q−1)/(p−q) — power on the differentiated factor in the direct form.
    pub inner_exp: f64,
    /// q/(p−q) — power on the differentiated factor in the dual form.
    pub dual_tail_exp: f64,
    /// q(p−1)/(p−q) — power on the plain factor in the dual form.
    pub dual_inner_exp: f64,
    /// (p−q)/(pq) — outer power applied to the whole integral.
    pub outer_exp: f64,
}

impl Exponents {
    /// Validates `1 < q < p < ∞` and derives the family.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::invalid(format!(
                "exponents must be finite, got p={p}, q={q}"
            )));
        }
        if !(q > 1.0) {
            return Err(Error::invalid(format!(
                "q must exceed 1, got q={q}"
            )));
        }
        if !(q < p) {
            return Err(Error::invalid(format!(
                "this regime needs q < p strictly, got p={p}, q={q}"
            )));
        }
        let d = p - q;
        Ok(Exponents {
            p,
            q,
            p_conj: p / (p - 1.0),
            q_conj: q / (q - 1.0),
            tail_exp: p / d,
            inner_exp: p * (q - 1.0) / d,
            dual_tail_exp: q / d,
            dual_inner_exp: q * (p - 1.0) / d,
            outer_exp: d / (p * q),
        })
    }

    /// Exact ratio between the direct-form and dual-form integrals for
    /// absolutely continuous factors: integration by parts gives
    /// `I_direct = (p / (q(p−1))) · I_dual` when the boundary terms vanish.
    /// The dual-form value reported by the criteria multiplies this back in
    /// so that the two forms cross-check against each other.
    pub fn dual_form_scale(&self) -> f64 {
        self.tail_exp / self.dual_inner_exp
    }

    /// Exponents of the adjoint problem: `(p, q) ↦ (q′, p′)`.
    ///
    /// Transposing an operator swaps domain and codomain, and the dual
    /// indices land back in the same regime (`p′ < q′` exactly when `q < p`).
    pub fn transposed(&self) -> Exponents {
        Exponents::new(self.q_conj, self.p_conj)
            .expect("dual indices of a valid pair are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frozen_values_p2_q_four_thirds() {
        let e = Exponents::new(2.0, 4.0 / 3.0).unwrap();
        assert!((e.p_conj - 2.0).abs() < 1e-15);
        assert!((e.q_conj - 4.0).abs() < 1e-14);
        assert!((e.tail_exp - 3.0).abs() < 1e-14);
        assert!((e.inner_exp - 1.0).abs() < 1e-14);
        assert!((e.dual_tail_exp - 2.0).abs() < 1e-14);
        assert!((e.dual_inner_exp - 2.0).abs() < 1e-14);
        assert!((e.outer_exp - 0.25).abs() < 1e-15);
        // direct = (3/2) · dual for absolutely continuous inputs at this pair
        assert!((e.dual_form_scale() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn frozen_values_p2_q_three_halves() {
        let e = Exponents::new(2.0, 1.5).unwrap();
        assert!((e.tail_exp - 4.0).abs() < 1e-14);
        assert!((e.inner_exp - 2.0).abs() < 1e-14);
        assert!((e.outer_exp - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_order_and_degenerate_pairs() {
        assert!(Exponents::new(1.5, 2.0).is_err()); // q > p
        assert!(Exponents::new(2.0, 2.0).is_err()); // q == p
        assert!(Exponents::new(2.0, 1.0).is_err()); // q == 1
        assert!(Exponents::new(2.0, 0.5).is_err());
        assert!(Exponents::new(f64::INFINITY, 2.0).is_err());
        assert!(Exponents::new(f64::NAN, 1.2).is_err());
    }

    #[test]
    fn transposed_lands_in_regime_and_is_involutive() {
        let e = Exponents::new(2.0, 4.0 / 3.0).unwrap();
        let t = e.transposed();
        assert!((t.p - 4.0).abs() < 1e-13); // q′ of 4/3
        assert!((t.q - 2.0).abs() < 1e-13); // p′ of 2
        let back = t.transposed();
        assert!((back.p - e.p).abs() < 1e-12);
        assert!((back.q - e.q).abs() < 1e-12);
    }

    fn regime() -> impl Strategy<Value = (f64, f64)> {
        // Keep p − q bounded away from zero so the derived exponents stay
        // well scaled for the 1e−14 identity checks below.
        (1.05f64..40.0, 0.05f64..0.95).prop_map(|(q, frac)| {
            let p = q + 0.1 + frac * 20.0;
            (p, q)
        })
    }

    proptest! {
        #[test]
        fn identity_outer_times_tail_times_q((p, q) in regime()) {
            let e = Exponents::new(p, q).unwrap();
            let lhs = e.outer_exp * e.tail_exp * e.q;
            prop_assert!((lhs - 1.0).abs() < 1e-14);
        }

        #[test]
        fn identity_inner_plus_one_is_dual_inner((p, q) in regime()) {
            let e = Exponents::new(p, q).unwrap();
            let rel = ((e.inner_exp + 1.0) - e.dual_inner_exp).abs()
                / e.dual_inner_exp.max(1.0);
            prop_assert!(rel < 1e-14);
            let rel2 = ((e.dual_tail_exp + 1.0) - e.tail_exp).abs()
                / e.tail_exp.max(1.0);
            prop_assert!(rel2 < 1e-14);
        }

        #[test]
        fn conjugates_are_conjugate((p, q) in regime()) {
            let e = Exponents::new(p, q).unwrap();
            prop_assert!((1.0 / e.p + 1.0 / e.p_conj - 1.0).abs() < 1e-14);
            prop_assert!((1.0 / e.q + 1.0 / e.q_conj - 1.0).abs() < 1e-14);
        }
    }
}
