//! Weight functions on `(0, ∞)`.
//!
//! The operators treated here carry an outer weight `u` and an inner weight
//! `v`, both nonnegative measurable functions of a positive variable. The
//! concrete families below (powers, indicators, tabulated profiles, and
//! products of those) cover everything the built-in examples and the
//! configuration surface need, while staying cheap enough to evaluate inside
//! adaptive quadrature.

use crate::error::{Error, Result};

/// A nonnegative weight on `(0, ∞)`, optionally restricted to a support
/// interval outside of which it evaluates to zero.
#[derive(Debug, Clone)]
pub struct Weight {
    kind: WeightKind,
    /// Effective support `(lo, hi]`; `None` means all of `(0, ∞)`.
    support: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `coefficient · t^exponent`.
    Power { coefficient: f64, exponent: f64 },
    /// `1` on `(lo, hi]`, `0` elsewhere. Half-open on the left so that a
    /// window starting at `0` never evaluates the weight *at* `0`.
    Indicator { lo: f64, hi: f64 },
    /// Piecewise-linear interpolation through `(t, value)` pairs, constant
    /// extension outside the tabulated range.
    Table { points: Vec<(f64, f64)> },
    /// Pointwise product of factors.
    Product { factors: Vec<Weight> },
}

impl Weight {
    /// The constant weight `1`.
    pub fn one() -> Weight {
        Weight::power(1.0, 0.0)
    }

    /// `coefficient · t^exponent`. The coefficient must be nonnegative; the
    /// exponent may be negative (singular weights are the interesting case).
    pub fn power(coefficient: f64, exponent: f64) -> Weight {
        Weight {
            kind: WeightKind::Power {
                coefficient,
                exponent,
            },
            support: None,
        }
    }

    /// Indicator of `(lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Weight {
        Weight {
            kind: WeightKind::Indicator { lo, hi },
            support: None,
        }
    }

    /// Piecewise-linear table through strictly increasing abscissae.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Weight> {
        if points.len() < 2 {
            return Err(Error::invalid("weight table needs at least 2 points"));
        }
        for w in points.windows(2) {
            if !(w[0].0 > 0.0) || !(w[1].0 > w[0].0) {
                return Err(Error::invalid(format!(
                    "weight table abscissae must be positive and strictly \
                     increasing; offending pair ({}, {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if points.iter().any(|&(_, v)| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(
                "weight table values must be finite and nonnegative",
            ));
        }
        Ok(Weight {
            kind: WeightKind::Table { points },
            support: None,
        })
    }

    /// Pointwise product of the given factors.
    pub fn product(factors: Vec<Weight>) -> Weight {
        Weight {
            kind: WeightKind::Product { factors },
            support: None,
        }
    }

    /// Restricts the weight to `(lo, hi]`; evaluation returns `0` outside.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Weight {
        self.support = Some((lo, hi));
        self
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Evaluates at `t > 0`. Positions at or below zero are a caller error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!(
                "weights are defined on (0, ∞); asked at t={t}"
            )));
        }
        if let Some((lo, hi)) = self.support {
            if t <= lo || t > hi {
                return Ok(0.0);
            }
        }
        let val = match &self.kind {
            WeightKind::Power {
                coefficient,
                exponent,
            } => coefficient * t.powf(*exponent),
            WeightKind::Indicator { lo, hi } => {
                if t > *lo && t <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::Table { points } => {
                let first = points.first().unwrap();
                let last = points.last().unwrap();
                if t <= first.0 {
                    first.1
                } else if t >= last.0 {
                    last.1
                } else {
                    let idx = points.partition_point(|&(x, _)| x < t);
                    let (x0, y0) = points[idx - 1];
                    let (x1, y1) = points[idx];
                    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
                }
            }
            WeightKind::Product { factors } => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.eval(t)?;
                    if acc == 0.0 {
                        break;
                    }
                }
                acc
            }
        };
        if val.is_nan() {
            return Err(Error::invalid(format!(
                "weight evaluated to NaN at t={t}"
            )));
        }
        Ok(val)
    }

    /// Quadrature-interior helper: zero out of domain instead of erroring.
    /// Adaptive integrators probe boundary-adjacent nodes where an interval
    /// endpoint has been clamped; those probes must not abort the sweep.
    pub fn eval_or_zero(&self, t: f64) -> f64 {
        if !(t > 0.0) || !t.is_finite() {
            return 0.0;
        }
        self.eval(t).unwrap_or(0.0)
    }

    /// Points where the weight is non-smooth (support edges, indicator
    /// boundaries, table knots). Integrators split there up front so kinks
    /// never sit in the middle of a quadrature interval.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some((lo, hi)) = self.support {
            out.push(lo);
            out.push(hi);
        }
        match &self.kind {
            WeightKind::Power { .. } => {}
            WeightKind::Indicator { lo, hi } => {
                out.push(*lo);
                out.push(*hi);
            }
            WeightKind::Table { points } => out.extend(points.iter().map(|p| p.0)),
            WeightKind::Product { factors } => {
                out.extend(factors.iter().flat_map(|f| f.breakpoints()))
            }
        }
        out.retain(|t| t.is_finite() && *t > 0.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn power_weight_matches_closed_form() {
        let w = Weight::power(1.0, -0.5);
        assert!((w.eval(4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((w.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        let scaled = Weight::power(3.0, 2.0);
        assert!((scaled.eval(2.0).unwrap() - 12.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_is_half_open_on_the_left() {
        let w = Weight::indicator(0.0, 1.0);
        assert_eq!(w.eval(0.5).unwrap(), 1.0);
        assert_eq!(w.eval(1.0).unwrap(), 1.0); // right endpoint included
        assert_eq!(w.eval(1.0 + 1e-12).unwrap(), 0.0);
        assert_eq!(w.eval(2.0).unwrap(), 0.0);
        let shifted = Weight::indicator(1.0, 2.0);
        assert_eq!(shifted.eval(1.0).unwrap(), 0.0); // left endpoint excluded
        assert_eq!(shifted.eval(1.5).unwrap(), 1.0);
    }

    #[test]
    fn table_interpolates_and_extends_flat() {
        let w = Weight::table(vec![(1.0, 2.0), (3.0, 6.0)]).unwrap();
        assert!((w.eval(2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((w.eval(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((w.eval(10.0).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn product_and_support_compose() {
        let w = Weight::product(vec![Weight::power(2.0, 1.0), Weight::power(1.0, -1.0)]);
        assert!((w.eval(7.0).unwrap() - 2.0).abs() < 1e-15);
        let cut = Weight::one().with_support(1.0, 2.0);
        assert_eq!(cut.eval(0.5).unwrap(), 0.0);
        assert_eq!(cut.eval(1.5).unwrap(), 1.0);
        assert_eq!(cut.eval(3.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_arguments_and_bad_tables() {
        let w = Weight::one();
        assert!(w.eval(0.0).is_err());
        assert!(w.eval(-1.0).is_err());
        assert!(w.eval(f64::NAN).is_err());
        assert_eq!(w.eval_or_zero(-1.0), 0.0);
        assert!(Weight::table(vec![(1.0, 1.0)]).is_err());
        assert!(Weight::table(vec![(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(Weight::table(vec![(1.0, -1.0), (2.0, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn weights_are_nonnegative_where_defined(
            t in 1e-6f64..1e6,
            coeff in 0.0f64..10.0,
            expo in -3.0f64..3.0,
        ) {
            let w = Weight::power(coeff, expo);
            let v = w.eval(t).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }

        #[test]
        fn support_restriction_only_zeroes(
            t in 1e-3f64..1e3,
            lo in 1e-3f64..1.0,
            span in 0.1f64..100.0,
        ) {
            let hi = lo + span;
            let free = Weight::power(1.0, 0.5);
            let cut = Weight::power(1.0, 0.5).with_support(lo, hi);
            let a = free.eval(t).unwrap();
            let b = cut.eval(t).unwrap();
            if t > lo && t <= hi {
                prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
            } else {
                prop_assert_eq!(b, 0.0);
            }
        }
    }
}
