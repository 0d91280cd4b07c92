//! Adaptive quadrature.
//!
//! Two engines live here:
//!
//! * [`integrate`] — a globally adaptive Gauss–Legendre engine for ordinary
//!   integrals `∫ f(t) dt` over finite or semi-infinite intervals. Each
//!   interval is estimated with a 15-point rule and its error with the gap to
//!   a 7-point rule; the worst interval (by estimated error) is bisected until
//!   the total meets tolerance, the budget runs out, or an interval collapses
//!   to the width floor with its error still unresolved — the last case is
//!   reported as divergence.
//! * [`stieltjes_integrate`] — a refinement engine for `∫ f dg` where `g` is
//!   an *opaque* nondecreasing function (typically itself defined by an inner
//!   adaptive integral, so evaluations are expensive and `dg` has no usable
//!   density). Function values are cached on interval endpoints and passed
//!   down on subdivision so refinement never re-evaluates a point.
//!
//! Rule nodes are computed once at startup by Newton iteration on the
//! Legendre polynomials rather than transcribed from tables.

use crate::error::QuadFailure;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Accuracy and budget targets for one integration call.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    /// Relative error target (against the running value).
    pub rel: f64,
    /// Absolute error floor; convergence uses `max(abs, rel · |value|)`.
    pub abs: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            rel: 1e-8,
            abs: 1e-14,
            max_evals: 1_000_000,
        }
    }
}

impl QuadTol {
    /// Tolerances for an integral nested one level deeper: one order tighter
    /// so inner noise stays below the outer error estimate. The relative
    /// target is floored near machine precision.
    pub fn tighter(&self) -> QuadTol {
        QuadTol {
            rel: (self.rel / 10.0).max(1e-13),
            abs: (self.abs / 10.0).max(1e-300),
            max_evals: self.max_evals,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// A converged (or partially converged) integral value with its error bound
/// and the number of integrand evaluations spent.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

/// Values beyond this magnitude are treated as numerically divergent.
const OVERFLOW_GUARD: f64 = 1e290;

/// Gauss–Legendre nodes/weights on [−1, 1] for the 7- and 15-point rules.
struct Rules {
    n7: Vec<(f64, f64)>,
    n15: Vec<(f64, f64)>,
}

static RULES: OnceLock<Rules> = OnceLock::new();

fn rules() -> &'static Rules {
    RULES.get_or_init(|| Rules {
        n7: legendre_rule(7),
        n15: legendre_rule(15),
    })
}

/// Legendre P_n and P_n′ at `x` via the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the n-point Gauss–Legendre rule, found by Newton
/// iteration from the Chebyshev-angle initial guesses.
fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_eval(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates one interval with both rules; returns (G15, |G15 − G7|).
/// Spends 22 evaluations.
fn eval_segment(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    loc_map: &dyn Fn(f64) -> f64,
) -> Result<(f64, f64), QuadFailure> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let r = rules();
    let mut g7 = 0.0;
    for &(x, w) in &r.n7 {
        let t = c + h * x;
        let y = f(t);
        if y.is_nan() {
            return Err(QuadFailure::NaN { location: loc_map(t) });
        }
        if y.is_infinite() {
            return Err(QuadFailure::Divergent { location: loc_map(t) });
        }
        g7 += w * y;
    }
    let mut g15 = 0.0;
    for &(x, w) in &r.n15 {
        let t = c + h * x;
        let y = f(t);
        if y.is_nan() {
            return Err(QuadFailure::NaN { location: loc_map(t) });
        }
        if y.is_infinite() {
            return Err(QuadFailure::Divergent { location: loc_map(t) });
        }
        g15 += w * y;
    }
    Ok((h * g15, h * (g15 - g7).abs()))
}

/// Adaptive integral of `f` over `[a, b]`; `b` may be `f64::INFINITY`.
///
/// `breaks` lists interior points where the integrand is known to be
/// non-smooth (kinks, support edges); the initial partition splits there so
/// the error estimate is not polluted by a kink mid-interval.
///
/// Semi-infinite ranges are folded to `[0, 1)` by `t = a + s/(1−s)` before
/// integrating; reported failure locations are mapped back to `t`.
pub fn integrate(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: &QuadTol,
) -> Result<QuadOutcome, QuadFailure> {
    if !a.is_finite() || b < a || a.is_nan() || b.is_nan() {
        return Err(QuadFailure::NaN { location: a });
    }
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
        });
    }
    if b.is_infinite() {
        // t = a + s/(1−s); dt = ds/(1−s)².
        let mut g = |s: f64| {
            let om = 1.0 - s;
            f(a + s / om) / (om * om)
        };
        let mapped: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&t| t > a && t.is_finite())
            .map(|t| (t - a) / (1.0 + (t - a)))
            .collect();
        let back = move |s: f64| a + s / (1.0 - s);
        return integrate_core(&mut g, 0.0, 1.0, &mapped, tol, &back);
    }
    integrate_core(f, a, b, breaks, tol, &|t| t)
}

fn integrate_core(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: &QuadTol,
    loc_map: &dyn Fn(f64) -> f64,
) -> Result<QuadOutcome, QuadFailure> {
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let width_floor = 4.0 * f64::EPSILON * (b - a);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0usize;

    let push = |heap: &mut BinaryHeap<Segment>,
                    f: &mut dyn FnMut(f64) -> f64,
                    lo: f64,
                    hi: f64,
                    total: &mut f64,
                    total_err: &mut f64,
                    evals: &mut usize|
     -> Result<(), QuadFailure> {
        let (v, e) = eval_segment(f, lo, hi, loc_map)?;
        *evals += 22;
        *total += v;
        *total_err += e;
        heap.push(Segment {
            a: lo,
            b: hi,
            value: v,
            err: e,
        });
        Ok(())
    };

    for w in edges.windows(2) {
        push(&mut heap, f, w[0], w[1], &mut total, &mut total_err, &mut evals)?;
    }

    loop {
        if !total.is_finite() || total.abs() > OVERFLOW_GUARD {
            return Err(QuadFailure::Divergent {
                location: loc_map(heap.peek().map_or(a, |s| 0.5 * (s.a + s.b))),
            });
        }
        if total_err <= tol.target(total) {
            return Ok(QuadOutcome {
                value: total,
                abs_error: total_err,
                evals,
            });
        }
        if evals + 44 > tol.max_evals {
            return Err(QuadFailure::Budget {
                evals,
                error: total_err,
                partial: total,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty before convergence");
        if worst.b - worst.a < width_floor {
            // The worst interval is as narrow as floating point allows and
            // still carries the dominant error: a non-integrable singularity.
            return Err(QuadFailure::Divergent {
                location: loc_map(0.5 * (worst.a + worst.b)),
            });
        }
        total -= worst.value;
        total_err -= worst.err;
        let mid = 0.5 * (worst.a + worst.b);
        push(&mut heap, f, worst.a, mid, &mut total, &mut total_err, &mut evals)?;
        push(&mut heap, f, mid, worst.b, &mut total, &mut total_err, &mut evals)?;
    }
}

/// One cached node of the Stieltjes refinement tree: position plus the
/// (expensive) values of the accumulation `g` and the integrand `f` there.
#[derive(Clone, Copy)]
struct StNode {
    z: f64,
    g: f64,
    f: f64,
}

struct StSegment {
    lo: StNode,
    hi: StNode,
    mid: StNode,
    value: f64,
    err: f64,
    /// Set once the segment width reaches the floor; frozen segments keep
    /// their error but are not refined further (a jump of `g` inside an
    /// interval can never be resolved past floating-point spacing).
    frozen: bool,
}

impl PartialEq for StSegment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for StSegment {}
impl PartialOrd for StSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for StSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Riemann–Stieltjes integral `∫_a^b f(z, g(z)) dg(z)` for a nondecreasing
/// opaque `g`.
///
/// The integrand receives the already-computed `g(z)` alongside `z` because
/// in every use here `f` contains a power of `g` itself — recomputing it
/// would double the cost of each (inner-quadrature-backed) evaluation.
///
/// Per segment the value is the endpoint-trapezoid sum over the two halves,
/// `(f_a+f_m)/2·Δg(a,m) + (f_m+f_b)/2·Δg(m,b)`, and the error estimate is
/// the gap to the one-piece midpoint product `f_m·Δg(a,b)`. Jumps of `g` are
/// localized by refinement; a segment that reaches the width floor is frozen
/// with its residual error kept in the reported bound.
///
/// Decrements of `g` beyond a small noise slack are an error; decrements
/// within the slack are clamped to zero.
pub fn stieltjes_integrate(
    f: &mut dyn FnMut(f64, f64) -> f64,
    g: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: &QuadTol,
) -> Result<QuadOutcome, QuadFailure> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadFailure::NaN { location: a });
    }
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
        });
    }

    let mut evals = 0usize;
    let node = |z: f64,
                    f: &mut dyn FnMut(f64, f64) -> f64,
                    g: &mut dyn FnMut(f64) -> f64,
                    evals: &mut usize|
     -> Result<StNode, QuadFailure> {
        let gv = g(z);
        if gv.is_nan() {
            return Err(QuadFailure::NaN { location: z });
        }
        let fv = f(z, gv);
        if fv.is_nan() {
            return Err(QuadFailure::NaN { location: z });
        }
        if fv.is_infinite() || gv.is_infinite() {
            return Err(QuadFailure::Divergent { location: z });
        }
        *evals += 1;
        Ok(StNode { z, g: gv, f: fv })
    };

    // Increment of g across [x, y], clamped for noise, erroring on a real
    // decrement.
    let increment = |x: &StNode, y: &StNode| -> Result<f64, QuadFailure> {
        let d = y.g - x.g;
        let slack = 1e-12 * x.g.abs().max(y.g.abs()).max(1e-300);
        if d < -slack {
            return Err(QuadFailure::NotMonotone {
                location: 0.5 * (x.z + y.z),
                increment: d,
            });
        }
        Ok(d.max(0.0))
    };

    let assemble = |lo: &StNode, mid: &StNode, hi: &StNode| -> Result<(f64, f64), QuadFailure> {
        let d1 = increment(lo, mid)?;
        let d2 = increment(mid, hi)?;
        let fine = 0.5 * (lo.f + mid.f) * d1 + 0.5 * (mid.f + hi.f) * d2;
        let coarse = mid.f * (d1 + d2);
        Ok((fine, (fine - coarse).abs()))
    };

    // Initial partition: ~16 pieces, geometric when the window spans more
    // than two decades (everything here lives on a multiplicative scale).
    let pieces = 16usize;
    let geometric = a > 0.0 && b / a > 100.0;
    let mut edges = Vec::with_capacity(pieces + 1);
    for k in 0..=pieces {
        let frac = k as f64 / pieces as f64;
        let z = if geometric {
            a * (b / a).powf(frac)
        } else {
            a + (b - a) * frac
        };
        edges.push(z);
    }
    edges[0] = a;
    edges[pieces] = b;

    let width_floor = 4.0 * f64::EPSILON * (b - a);
    let mut heap: BinaryHeap<StSegment> = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut frozen_err = 0.0;

    let mut nodes = Vec::with_capacity(edges.len());
    for &z in &edges {
        nodes.push(node(z, f, g, &mut evals)?);
    }
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mz = 0.5 * (lo.z + hi.z);
        let mid = node(mz, f, g, &mut evals)?;
        let (v, e) = assemble(&lo, &mid, &hi)?;
        total += v;
        total_err += e;
        heap.push(StSegment {
            lo,
            hi,
            mid,
            value: v,
            err: e,
            frozen: false,
        });
    }

    loop {
        if !total.is_finite() || total.abs() > OVERFLOW_GUARD {
            return Err(QuadFailure::Divergent {
                location: heap.peek().map_or(a, |s| s.mid.z),
            });
        }
        if total_err + frozen_err <= tol.target(total) {
            return Ok(QuadOutcome {
                value: total,
                abs_error: total_err + frozen_err,
                evals,
            });
        }
        // When the parked (unresolvable) error dominates what is left in
        // the active segments, further splitting cannot move the bound:
        // report honestly instead of refining forever.
        if frozen_err > 0.0 && total_err <= 0.01 * frozen_err {
            return Ok(QuadOutcome {
                value: total,
                abs_error: total_err + frozen_err,
                evals,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            // Only frozen residue is left: report honestly rather than loop.
            None => {
                return Ok(QuadOutcome {
                    value: total,
                    abs_error: frozen_err,
                    evals,
                })
            }
        };
        if worst.frozen {
            // Heap holds only frozen segments from here on.
            heap.push(worst);
            return Ok(QuadOutcome {
                value: total,
                abs_error: total_err + frozen_err,
                evals,
            });
        }
        if evals + 2 > tol.max_evals {
            return Err(QuadFailure::Budget {
                evals,
                error: total_err + frozen_err,
                partial: total,
            });
        }
        total -= worst.value;
        total_err -= worst.err;
        if worst.hi.z - worst.lo.z < width_floor {
            // Unresolvable (a jump thinner than float spacing): keep its
            // value, park its error.
            total += worst.value;
            frozen_err += worst.err;
            continue;
        }
        // Split at the cached midpoint; each half needs one new node.
        for (lo, hi) in [(worst.lo, worst.mid), (worst.mid, worst.hi)] {
            let mz = 0.5 * (lo.z + hi.z);
            let mid = node(mz, f, g, &mut evals)?;
            let (v, e) = assemble(&lo, &mid, &hi)?;
            total += v;
            total_err += e;
            heap.push(StSegment {
                lo,
                hi,
                mid,
                value: v,
                err: e,
                frozen: false,
            });
        }
    }
}
