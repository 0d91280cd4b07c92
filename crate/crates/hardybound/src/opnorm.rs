//! Discretized operator-norm lower bounds.
//!
//! The criterion constants promise `‖T‖ ≍ max_i B_{n,i}` up to constants
//! depending only on the exponents, the order, and the sandwich constant
//! `h`. To test that promise empirically the operator is discretized on a
//! grid — inputs and outputs become vectors, integrals become weighted
//! sums — and the norm of the resulting matrix between weighted discrete
//! `p`- and `q`-spaces is *lower-bounded* by ascent: any explicit vector
//! gives a certified lower bound `‖Af‖_q/‖f‖_p`, and alternating the
//! first-order optimality maps pushes that ratio monotonically upward.
//! Restarting from several seeded positive vectors guards against flat
//! starts; a hill-climbing brute force over tiny matrices cross-checks
//! the ascent in tests.

use crate::criteria::{Direction, Placement, Problem};
use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::grid::Grid;
use crate::measures::Interval;
use crate::quad::QuadTol;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A matrix acting between weighted discrete Lebesgue spaces.
///
/// The matrix itself carries the operator's internal data (kernel values,
/// inner weight, input cell masses); `row_weights` and `col_weights` are
/// the cell masses of the output and input norms.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    rows: usize,
    cols: usize,
    matrix: Vec<f64>,
    row_weights: Vec<f64>,
    col_weights: Vec<f64>,
}

impl DiscreteOperator {
    pub fn new(
        rows: usize,
        cols: usize,
        matrix: Vec<f64>,
        row_weights: Vec<f64>,
        col_weights: Vec<f64>,
    ) -> Result<DiscreteOperator> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("operator needs at least one row and column"));
        }
        if matrix.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix has {} entries, expected {}×{}",
                matrix.len(),
                rows,
                cols
            )));
        }
        if row_weights.len() != rows || col_weights.len() != cols {
            return Err(Error::invalid("weight vectors must match the matrix shape"));
        }
        if matrix.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::invalid("matrix entries must be finite and nonnegative"));
        }
        if row_weights
            .iter()
            .chain(col_weights.iter())
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(Error::invalid("cell weights must be finite and nonnegative"));
        }
        if col_weights.iter().all(|w| *w == 0.0) {
            return Err(Error::invalid("input space has no mass"));
        }
        Ok(DiscreteOperator {
            rows,
            cols,
            matrix,
            row_weights,
            col_weights,
        })
    }

    /// Discretizes a criterion problem on a grid. Both axes share the
    /// grid's nodes; cell masses come from its tiling, or from the
    /// measure's mass over each cell on the side the measure replaces.
    pub fn from_problem(problem: &Problem, grid: &Grid, tol: &QuadTol) -> Result<DiscreteOperator> {
        let n = grid.len();
        let pts = grid.points();
        let widths = grid.cell_widths();
        let bounds = grid.cell_bounds();
        let placement = problem.variant.placement;

        let measure_cells = |needed: bool| -> Result<Option<Vec<f64>>> {
            if !needed {
                return Ok(None);
            }
            let m = problem
                .measure
                .as_ref()
                .ok_or_else(|| Error::invalid("measure placement without a measure"))?;
            let mut cells = Vec::with_capacity(n);
            for k in 0..n {
                let iv = Interval::open_closed(bounds[k], bounds[k + 1]);
                let mass = m.integrate(&mut |_| 1.0, iv, tol).map_err(Error::Numerical)?;
                cells.push(mass.value);
            }
            Ok(Some(cells))
        };
        let out_measure = measure_cells(placement == Placement::Output)?;
        let in_measure = measure_cells(placement == Placement::Input)?;

        let row_weights = out_measure.unwrap_or_else(|| widths.clone());
        let col_weights = in_measure.clone().unwrap_or_else(|| widths.clone());

        let mut u_vals = Vec::with_capacity(n);
        let mut v_vals = Vec::with_capacity(n);
        for &t in pts {
            u_vals.push(if placement == Placement::Output {
                1.0
            } else {
                problem.u.eval_or_zero(t)
            });
            v_vals.push(if placement == Placement::Input {
                1.0
            } else {
                problem.v.eval_or_zero(t)
            });
        }
        // Mass each input cell contributes inside the operator sum.
        let in_mass = in_measure.unwrap_or_else(|| widths.clone());

        let mut matrix = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let (xj, sk) = (pts[j], pts[k]);
                let included = match problem.variant.direction {
                    Direction::Cumulative => sk <= xj,
                    Direction::Tail => sk >= xj,
                };
                if !included {
                    continue;
                }
                let kv = match problem.variant.direction {
                    Direction::Cumulative => problem.kernel.eval_raw(xj, sk),
                    Direction::Tail => problem.kernel.eval_raw(sk, xj),
                };
                if !kv.is_finite() {
                    return Err(Error::invalid(format!(
                        "kernel is not finite at ({xj}, {sk}); shrink the grid window"
                    )));
                }
                matrix[j * n + k] = u_vals[j] * kv * v_vals[k] * in_mass[k];
            }
        }
        DiscreteOperator::new(n, n, matrix, row_weights, col_weights)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.matrix[j * self.cols + k]
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn col_weights(&self) -> &[f64] {
        &self.col_weights
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for j in 0..self.rows {
            let row = &self.matrix[j * self.cols..(j + 1) * self.cols];
            y[j] = row.iter().zip(f).map(|(a, x)| a * x).sum();
        }
        y
    }

    pub fn apply_transpose(&self, s: &[f64]) -> Vec<f64> {
        assert_eq!(s.len(), self.rows);
        let mut z = vec![0.0; self.cols];
        for j in 0..self.rows {
            let row = &self.matrix[j * self.cols..(j + 1) * self.cols];
            for (zk, a) in z.iter_mut().zip(row) {
                *zk += a * s[j];
            }
        }
        z
    }

    /// Weighted output norm `(Σ w_j |y_j|^q)^{1/q}`.
    pub fn output_norm(&self, y: &[f64], q: f64) -> f64 {
        weighted_norm(y, &self.row_weights, q)
    }

    /// Weighted input norm `(Σ w_k |f_k|^p)^{1/p}`.
    pub fn input_norm(&self, f: &[f64], p: f64) -> f64 {
        weighted_norm(f, &self.col_weights, p)
    }

    /// The certified lower bound `‖Af‖_q / ‖f‖_p` carried by one vector.
    pub fn rayleigh(&self, f: &[f64], e: &Exponents) -> f64 {
        let denom = self.input_norm(f, e.p);
        if denom == 0.0 {
            return 0.0;
        }
        self.output_norm(&self.apply(f), e.q) / denom
    }
}

fn weighted_norm(vals: &[f64], weights: &[f64], exp: f64) -> f64 {
    vals.iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs().powf(exp))
        .sum::<f64>()
        .powf(1.0 / exp)
}

/// Result of the ascent: the best ratio found and the vector attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Vec<f64>,
    /// Iterations used by the winning restart.
    pub iterations: usize,
    pub restarts: usize,
    /// Whether the winning restart met the stationarity tolerance.
    pub converged: bool,
}

impl NormEstimate {
    /// Re-derives the bound from the witness alone; the estimate is only
    /// trusted if the recomputation agrees.
    pub fn verify(&self, op: &DiscreteOperator, e: &Exponents, tol: f64) -> bool {
        let again = op.rayleigh(&self.witness, e);
        (again - self.value).abs() <= tol * self.value.max(1.0)
    }
}

const ASCENT_STOP_REL: f64 = 1e-10;

/// One ascent run from a fixed starting vector.
fn ascent(
    op: &DiscreteOperator,
    e: &Exponents,
    start: Vec<f64>,
    max_iters: usize,
) -> (f64, Vec<f64>, usize, bool) {
    let mut f = start;
    let norm0 = op.input_norm(&f, e.p);
    if norm0 == 0.0 {
        return (0.0, f, 0, true);
    }
    for x in f.iter_mut() {
        *x /= norm0;
    }
    let mut value = op.rayleigh(&f, e);
    for iter in 1..=max_iters {
        let y = op.apply(&f);
        let ynorm = op.output_norm(&y, e.q);
        if ynorm == 0.0 {
            return (0.0, f, iter, true);
        }
        // Optimality maps: dual output vector, pulled back and re-dualized
        // on the input side.
        let s: Vec<f64> = y
            .iter()
            .zip(&op.row_weights)
            .map(|(yj, wj)| wj * yj.max(0.0).powf(e.q - 1.0))
            .collect();
        let z = op.apply_transpose(&s);
        let mut f_new: Vec<f64> = z
            .iter()
            .zip(&op.col_weights)
            .map(|(zk, ck)| {
                if *ck == 0.0 {
                    0.0
                } else {
                    (zk / ck).max(0.0).powf(1.0 / (e.p - 1.0))
                }
            })
            .collect();
        let fnorm = op.input_norm(&f_new, e.p);
        if fnorm == 0.0 {
            return (value, f, iter, true);
        }
        for x in f_new.iter_mut() {
            *x /= fnorm;
        }
        let next = op.rayleigh(&f_new, e);
        let stalled = (next - value).abs() <= ASCENT_STOP_REL * value.max(1e-300);
        if next >= value {
            f = f_new;
            value = next;
        }
        if stalled {
            return (value, f, iter, true);
        }
    }
    (value, f, max_iters, false)
}

/// Ascent from `restarts` deterministic starting vectors (one flat, the
/// rest seeded), in parallel; returns the best certified lower bound.
pub fn lower_bound_norm(
    op: &DiscreteOperator,
    e: &Exponents,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if restarts == 0 {
        return Err(Error::invalid("need at least one restart"));
    }
    if max_iters == 0 {
        return Err(Error::invalid("need at least one iteration"));
    }
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|r| {
            if r == 0 {
                vec![1.0; op.cols]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
                (0..op.cols).map(|_| rng.gen::<f64>() + 1e-3).collect()
            }
        })
        .collect();
    let runs: Vec<(f64, Vec<f64>, usize, bool)> = starts
        .into_par_iter()
        .map(|s| ascent(op, e, s, max_iters))
        .collect();
    // Stable argmax: first restart wins ties, independent of thread order.
    let mut best = 0usize;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = i;
        }
    }
    let (value, witness, iterations, converged) = runs.into_iter().nth(best).expect("non-empty");
    Ok(NormEstimate {
        value,
        witness,
        iterations,
        restarts,
        converged,
    })
}

/// Randomized hill-climbing reference for tiny matrices. Exponential in
/// nothing but patience, but trustworthy: every candidate is itself a
/// certified lower bound, so the maximum over many candidates brackets
/// the true norm from below tightly on well-conditioned examples.
pub fn brute_force_norm(op: &DiscreteOperator, e: &Exponents, seed: u64) -> Result<f64> {
    if op.rows > 4 || op.cols > 4 {
        return Err(Error::invalid(
            "brute-force reference is limited to 4×4 operators",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_f = vec![1.0; op.cols];
    let mut best = op.rayleigh(&best_f, e);
    for _ in 0..2000 {
        let f: Vec<f64> = (0..op.cols).map(|_| rng.gen::<f64>()).collect();
        let r = op.rayleigh(&f, e);
        if r > best {
            best = r;
            best_f = f;
        }
    }
    // Multiplicative coordinate descent with a shrinking step.
    let mut step = 0.5;
    while step > 1e-6 {
        let mut improved = true;
        while improved {
            improved = false;
            for k in 0..op.cols {
                for dir in [1.0 + step, 1.0 / (1.0 + step)] {
                    let mut cand = best_f.clone();
                    cand[k] *= dir;
                    let r = op.rayleigh(&cand, e);
                    if r > best {
                        best = r;
                        best_f = cand;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
    }
    Ok(best)
}
