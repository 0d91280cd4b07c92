//! Boundedness criteria for weighted Hardy-type operators.
//!
//! For exponents `1 < q < p < ∞`, an operator with an order-`n` kernel is
//! bounded exactly when a family of constants `B_{n,i}` (one per
//! decomposition component `i = 0 … n`) is finite, and the operator norm is
//! equivalent to their maximum. Each constant is the outer power
//! `(p−q)/(pq)` of a Riemann–Stieltjes integral built from two *factors*:
//!
//! * an **upper factor** `z ↦ ∫_{(z, X]} piece(x, z)^κ · (data)` — mass
//!   above the moving point, nonincreasing in `z`;
//! * a **lower factor** `z ↦ ∫_{(ε, z]} piece(z, s)^κ · (data)` — mass
//!   below it, nondecreasing in `z`.
//!
//! Three independent switches pick what goes where, giving twelve variants:
//!
//! 1. **class** — `plus` puts the companion piece on the upper factor and
//!    the member kernel on the lower one; `minus` swaps them;
//! 2. **direction** — `cumulative` (operator integrates from below) gives
//!    the upper factor exponent `q` and the lower factor `p′`; `tail`
//!    (operator integrates from above) swaps the exponents;
//! 3. **measure placement** — `weights` uses Lebesgue data `u^κ dx` above
//!    and `v^κ ds` below; `output` replaces the data of the `q`-exponent
//!    factor by a general measure `μ`; `input` replaces the `p′` side.
//!
//! Every constant is computed in two independent forms connected by
//! integration by parts — the direct form differentiates the `p′` factor,
//! the dual form differentiates the `q` factor and carries the exact
//! conversion ratio `p/(q(p−1))` — so agreement between them is a working
//! error estimate. Integrals run on a truncated window `(ε, X]`; each
//! component is re-evaluated at `ε/10` and a growth of the value beyond a
//! threshold is reported as divergence (the constant is infinite in the
//! untruncated limit).

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::kernels::{Kernel, KernelClass};
use crate::measures::{Interval, Measure};
use crate::quad::{self, QuadTol};
use crate::weights::Weight;
use serde::Serialize;
use std::cell::RefCell;

/// Which way the operator integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `(Tf)(x)` aggregates inputs `s ≤ x`.
    Cumulative,
    /// `(Tf)(x)` aggregates inputs `s ≥ x`.
    Tail,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Cumulative => "cumulative",
            Direction::Tail => "tail",
        }
    }
}

/// Where the general measure sits, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Both sides carry Lebesgue weights.
    Weights,
    /// The output side (the `q`-exponent factor) integrates against `μ`.
    Output,
    /// The input side (the `p′`-exponent factor) integrates against `μ`.
    Input,
}

impl Placement {
    pub fn as_str(&self) -> &'static str {
        match self {
            Placement::Weights => "weights",
            Placement::Output => "output",
            Placement::Input => "input",
        }
    }
}

/// One of the twelve operator variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub class: KernelClass,
    pub direction: Direction,
    pub placement: Placement,
}

impl Variant {
    pub fn new(class: KernelClass, direction: Direction, placement: Placement) -> Variant {
        Variant {
            class,
            direction,
            placement,
        }
    }

    /// Canonical identifier, e.g. `plus/cumulative/weights`.
    pub fn id(&self) -> String {
        format!(
            "{}/{}/{}",
            self.class.as_str(),
            self.direction.as_str(),
            self.placement.as_str()
        )
    }

    /// Parses the canonical identifier.
    pub fn parse(s: &str) -> Result<Variant> {
        let mut parts = s.split('/');
        let (a, b, c) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(Error::invalid(format!(
                    "variant must look like class/direction/placement, got '{s}'"
                )))
            }
        };
        let class = match a {
            "plus" => KernelClass::Plus,
            "minus" => KernelClass::Minus,
            other => return Err(Error::invalid(format!("unknown kernel class '{other}'"))),
        };
        let direction = match b {
            "cumulative" => Direction::Cumulative,
            "tail" => Direction::Tail,
            other => return Err(Error::invalid(format!("unknown direction '{other}'"))),
        };
        let placement = match c {
            "weights" => Placement::Weights,
            "output" => Placement::Output,
            "input" => Placement::Input,
            other => return Err(Error::invalid(format!("unknown measure placement '{other}'"))),
        };
        Ok(Variant::new(class, direction, placement))
    }

    /// All twelve variants, classes outermost.
    pub fn all() -> Vec<Variant> {
        let mut out = Vec::with_capacity(12);
        for class in [KernelClass::Plus, KernelClass::Minus] {
            for direction in [Direction::Cumulative, Direction::Tail] {
                for placement in [Placement::Weights, Placement::Output, Placement::Input] {
                    out.push(Variant::new(class, direction, placement));
                }
            }
        }
        out
    }
}

/// A fully specified criterion evaluation problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub variant: Variant,
    pub kernel: Kernel,
    pub u: Weight,
    pub v: Weight,
    pub measure: Option<Measure>,
    pub exponents: Exponents,
    /// Truncation window `(ε, X]`.
    pub window: (f64, f64),
    /// A component whose value grows by more than this factor when `ε`
    /// shrinks tenfold is declared divergent.
    pub growth_threshold: f64,
}

impl Problem {
    /// Starts a problem with unit weights, no measure, window
    /// `(10⁻⁴, 10⁴]`, and growth threshold 1.5. Order-0 kernels are
    /// re-expressed at order 1 so the component family is never empty.
    pub fn new(variant: Variant, kernel: Kernel, exponents: Exponents) -> Problem {
        Problem {
            variant,
            kernel: kernel.at_least_order_one(),
            u: Weight::one(),
            v: Weight::one(),
            measure: None,
            exponents,
            window: (1e-4, 1e4),
            growth_threshold: 1.5,
        }
    }

    pub fn with_u(mut self, u: Weight) -> Problem {
        self.u = u;
        self
    }

    pub fn with_v(mut self, v: Weight) -> Problem {
        self.v = v;
        self
    }

    pub fn with_measure(mut self, m: Measure) -> Problem {
        self.measure = Some(m);
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Problem {
        self.window = (lo, hi);
        self
    }

    pub fn with_growth_threshold(mut self, t: f64) -> Problem {
        self.growth_threshold = t;
        self
    }

    fn validated(&self) -> Result<()> {
        if self.kernel.class() != self.variant.class {
            return Err(Error::invalid(format!(
                "variant {} needs a {}-class kernel, got {}",
                self.variant.id(),
                self.variant.class.as_str(),
                self.kernel.class().as_str()
            )));
        }
        let (lo, hi) = self.window;
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "window must satisfy 0 < ε < X < ∞, got ({lo}, {hi})"
            )));
        }
        match (self.variant.placement, &self.measure) {
            (Placement::Weights, Some(_)) => {
                return Err(Error::invalid(
                    "the weights placement uses no general measure; remove it \
                     or pick the output/input placement",
                ))
            }
            (Placement::Output | Placement::Input, None) => {
                return Err(Error::invalid(format!(
                    "variant {} needs a measure",
                    self.variant.id()
                )))
            }
            _ => {}
        }
        if !(self.growth_threshold > 1.0) {
            return Err(Error::invalid(
                "growth threshold must exceed 1 (a ratio near 1 means the \
                 truncation has converged)",
            ));
        }
        Ok(())
    }

    /// Factor pair `(q-side, p′-side)` for component `i` on a window.
    fn factor_specs(&self, i: usize, window: (f64, f64)) -> (FactorSpec<'_>, FactorSpec<'_>) {
        let e = &self.exponents;
        let (upper_exp, lower_exp) = match self.variant.direction {
            Direction::Cumulative => (e.q, e.p_conj),
            Direction::Tail => (e.p_conj, e.q),
        };
        let (upper_role, lower_role) = match self.variant.class {
            KernelClass::Plus => (PieceRole::Companion, PieceRole::Member),
            KernelClass::Minus => (PieceRole::Member, PieceRole::Companion),
        };
        let q_is_upper = self.variant.direction == Direction::Cumulative;
        let measure = self.measure.as_ref();
        let upper_data = match (self.variant.placement, q_is_upper) {
            (Placement::Output, true) | (Placement::Input, false) => {
                FactorData::Measured(measure.expect("validated"))
            }
            _ => FactorData::Weighted(&self.u),
        };
        let lower_data = match (self.variant.placement, q_is_upper) {
            (Placement::Output, false) | (Placement::Input, true) => {
                FactorData::Measured(measure.expect("validated"))
            }
            _ => FactorData::Weighted(&self.v),
        };
        let upper = FactorSpec {
            role: upper_role,
            index: i,
            kernel: &self.kernel,
            exponent: upper_exp,
            data: upper_data,
            orientation: Orientation::Upper,
            window,
        };
        let lower = FactorSpec {
            role: lower_role,
            index: i,
            kernel: &self.kernel,
            exponent: lower_exp,
            data: lower_data,
            orientation: Orientation::Lower,
            window,
        };
        if q_is_upper {
            (upper, lower)
        } else {
            (lower, upper)
        }
    }

    /// The two factors of component `i` as standalone evaluators — used by
    /// tests and examples to inspect the integrands directly.
    pub fn component_factors(&self, i: usize) -> Result<(FactorHandle<'_>, FactorHandle<'_>)> {
        self.validated()?;
        self.check_index(i)?;
        let (qf, pf) = self.factor_specs(i, self.window);
        Ok((FactorHandle { spec: qf }, FactorHandle { spec: pf }))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        let n = self.kernel.order();
        if i > n {
            return Err(Error::invalid(format!(
                "component index {i} exceeds kernel order {n}"
            )));
        }
        if i < n && !self.kernel.has_decomposition() {
            return Err(Error::invalid(format!(
                "kernel '{}' carries no companion family; only the top \
                 component i = {n} is available",
                self.kernel.label()
            )));
        }
        Ok(())
    }

    /// One Stieltjes pass: the chosen form of component `i` on `window`.
    fn raw_form(
        &self,
        i: usize,
        window: (f64, f64),
        form: Form,
        tol: &QuadTol,
    ) -> std::result::Result<RawIntegral, Error> {
        let e = &self.exponents;
        let (qf, pf) = self.factor_specs(i, window);
        let inner_tol = tol.tighter();
        // Which factor is differentiated, and the powers on each value.
        let (diff, plain, diff_pow, plain_pow) = match form {
            Form::Direct => (&pf, &qf, e.inner_exp, e.tail_exp),
            Form::Dual => (&qf, &pf, e.dual_tail_exp, e.dual_inner_exp),
        };
        // An upper-oriented accumulation decreases in z; feed its negation
        // to the integrator and undo the sign when using the value.
        let diff_increases = diff.orientation == Orientation::Lower;
        let failure: RefCell<Option<crate::error::QuadFailure>> = RefCell::new(None);
        let record = |e: crate::error::QuadFailure| -> f64 {
            let divergent = e.is_divergent();
            let mut slot = failure.borrow_mut();
            if slot.is_none() {
                *slot = Some(e);
            }
            if divergent {
                f64::INFINITY
            } else {
                f64::NAN
            }
        };
        let mut g = |z: f64| match diff.eval(z, &inner_tol) {
            Ok(v) => {
                if diff_increases {
                    v
                } else {
                    -v
                }
            }
            Err(e) => record(e),
        };
        let mut f = |z: f64, gz: f64| {
            let dv = if diff_increases { gz } else { -gz }.max(0.0);
            match plain.eval(z, &inner_tol) {
                Ok(pv) => pv.max(0.0).powf(plain_pow) * dv.powf(diff_pow),
                Err(e) => record(e),
            }
        };
        let out = quad::stieltjes_integrate(&mut f, &mut g, window.0, window.1, tol);
        match out {
            Ok(o) => Ok(RawIntegral {
                value: o.value,
                error: o.abs_error,
            }),
            Err(engine) => {
                let cause = failure.into_inner().unwrap_or(engine);
                Err(Error::Numerical(cause))
            }
        }
    }

    /// Evaluates component `i`: both forms on the configured window plus
    /// the direct form on the ε/10 window for the truncation-growth check.
    pub fn evaluate_component(&self, i: usize, tol: &QuadTol) -> Result<ComponentValue> {
        self.validated()?;
        self.check_index(i)?;
        let e = &self.exponents;
        let outcome = (|| -> std::result::Result<ComponentValue, Error> {
            let direct = self.raw_form(i, self.window, Form::Direct, tol)?;
            let dual = self.raw_form(i, self.window, Form::Dual, tol)?;
            let refined_window = (self.window.0 / 10.0, self.window.1);
            let refined = self.raw_form(i, refined_window, Form::Direct, tol)?;
            let outer = e.outer_exp;
            let form1 = FormValue::from_raw(direct.value, direct.error, outer);
            let form2_raw = FormValue::from_raw(dual.value, dual.error, outer);
            let scale = e.dual_form_scale();
            let form2 = FormValue::from_raw(scale * dual.value, scale * dual.error, outer);
            let refined_value = refined.value.max(0.0).powf(outer);
            let growth_ratio = if form1.value > 0.0 {
                refined_value / form1.value
            } else if refined_value > 0.0 {
                f64::INFINITY
            } else {
                1.0
            };
            let divergent = growth_ratio > self.growth_threshold;
            Ok(ComponentValue {
                index: i,
                divergent,
                form1: Some(form1),
                form2: Some(form2),
                form2_raw: Some(form2_raw),
                form1_refined: Some(refined_value),
                growth_ratio: Some(growth_ratio),
            })
        })();
        match outcome {
            Ok(c) => Ok(c),
            Err(Error::Numerical(qf)) if qf.is_divergent() => Ok(ComponentValue {
                index: i,
                divergent: true,
                form1: None,
                form2: None,
                form2_raw: None,
                form1_refined: None,
                growth_ratio: None,
            }),
            Err(e) => Err(e),
        }
    }

    /// Evaluates every available component and aggregates the verdict.
    pub fn evaluate(&self, tol: &QuadTol) -> Result<CriterionReport> {
        self.validated()?;
        let n = self.kernel.order();
        let indices: Vec<usize> = if self.kernel.has_decomposition() {
            (0..=n).collect()
        } else {
            vec![n]
        };
        let mut components = Vec::with_capacity(indices.len());
        for &i in &indices {
            components.push(self.evaluate_component(i, tol)?);
        }
        let divergent = components.iter().any(|c| c.divergent);
        let constant = if divergent {
            None
        } else {
            components
                .iter()
                .filter_map(|c| c.form1.as_ref())
                .map(|f| f.value)
                .reduce(f64::max)
        };
        let mut notes = Vec::new();
        if !self.kernel.has_decomposition() {
            notes.push(format!(
                "kernel '{}' carries no companion family; only the top \
                 component i = {n} was computed",
                self.kernel.label()
            ));
        }
        if matches!(
            (self.variant.class, self.variant.direction, self.variant.placement),
            (KernelClass::Plus, Direction::Tail, Placement::Input)
                | (KernelClass::Minus, Direction::Cumulative, Placement::Input)
                | (KernelClass::Minus, Direction::Cumulative, Placement::Weights)
        ) {
            notes.push(
                "endpoint component indices (i = 0 and i = n) are included; \
                 the defining bound for this variant is often quoted for \
                 interior indices only"
                    .to_string(),
            );
        }
        Ok(CriterionReport {
            variant: self.variant.id(),
            kernel: self.kernel.label().to_string(),
            order: n,
            p: self.exponents.p,
            q: self.exponents.q,
            window: self.window,
            components,
            constant,
            divergent,
            notes,
        })
    }
}

/// Which of the two integration-by-parts forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Direct,
    Dual,
}

#[derive(Debug, Clone, Copy)]
struct RawIntegral {
    value: f64,
    error: f64,
}

/// One evaluated integral form: the raw Stieltjes value, its error bound,
/// and the criterion constant (outer power applied).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FormValue {
    pub raw: f64,
    pub raw_error: f64,
    pub value: f64,
}

impl FormValue {
    fn from_raw(raw: f64, raw_error: f64, outer: f64) -> FormValue {
        FormValue {
            raw,
            raw_error,
            value: raw.max(0.0).powf(outer),
        }
    }
}

/// The evaluation of one component `B_{n,i}`.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentValue {
    pub index: usize,
    /// Set either by the truncation-growth test or by a divergent inner
    /// integral; in the latter case no values are available.
    pub divergent: bool,
    pub form1: Option<FormValue>,
    pub form2: Option<FormValue>,
    pub form2_raw: Option<FormValue>,
    /// Direct-form value on the `(ε/10, X]` window.
    pub form1_refined: Option<f64>,
    /// `form1_refined / form1` — near 1 when the truncation has converged.
    pub growth_ratio: Option<f64>,
}

/// Everything `evaluate` learned about a problem.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub variant: String,
    pub kernel: String,
    pub order: usize,
    pub p: f64,
    pub q: f64,
    pub window: (f64, f64),
    pub components: Vec<ComponentValue>,
    /// `max_i B_{n,i}` over the computed components; absent when any
    /// component diverges.
    pub constant: Option<f64>,
    pub divergent: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PieceRole {
    Companion,
    Member,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Upper,
    Lower,
}

#[derive(Clone, Copy)]
struct FactorSpec<'a> {
    role: PieceRole,
    index: usize,
    kernel: &'a Kernel,
    exponent: f64,
    data: FactorData<'a>,
    orientation: Orientation,
    window: (f64, f64),
}

#[derive(Clone, Copy)]
enum FactorData<'a> {
    Weighted(&'a Weight),
    Measured(&'a Measure),
}

impl FactorSpec<'_> {
    fn piece(&self, hi: f64, lo: f64) -> f64 {
        match self.role {
            PieceRole::Companion => self.kernel.companion_raw(self.index, hi, lo),
            PieceRole::Member => self.kernel.member_raw(self.index, hi, lo),
        }
    }

    fn eval(&self, z: f64, tol: &QuadTol) -> std::result::Result<f64, crate::error::QuadFailure> {
        let (lo, hi) = match self.orientation {
            Orientation::Upper => (z, self.window.1),
            Orientation::Lower => (self.window.0, z),
        };
        if !(hi > lo) {
            return Ok(0.0);
        }
        let kappa = self.exponent;
        let mut integrand = |t: f64| {
            let pc = match self.orientation {
                Orientation::Upper => self.piece(t, z),
                Orientation::Lower => self.piece(z, t),
            };
            if pc <= 0.0 {
                return 0.0;
            }
            pc.powf(kappa)
        };
        match self.data {
            FactorData::Weighted(w) => {
                let mut f = |t: f64| {
                    let wd = w.eval_or_zero(t);
                    if wd <= 0.0 {
                        return 0.0;
                    }
                    integrand(t) * wd.powf(kappa)
                };
                let breaks = w.breakpoints();
                quad::integrate(&mut f, lo, hi, &breaks, tol).map(|o| o.value)
            }
            FactorData::Measured(m) => m
                .integrate(&mut integrand, Interval::open_closed(lo, hi), tol)
                .map(|o| o.value),
        }
    }
}

/// Standalone evaluator for one factor of one component.
pub struct FactorHandle<'a> {
    spec: FactorSpec<'a>,
}

impl FactorHandle<'_> {
    /// Factor value at `z`, with the given accuracy target.
    pub fn eval(&self, z: f64, tol: &QuadTol) -> Result<f64> {
        self.spec.eval(z, tol).map_err(Error::Numerical)
    }

    /// The kernel piece this factor raises to its exponent, at a pair.
    pub fn piece(&self, hi: f64, lo: f64) -> f64 {
        self.spec.piece(hi, lo)
    }
}
