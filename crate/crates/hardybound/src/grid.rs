//! Sample grids on a positive interval.
//!
//! Discretized operators, level partitions, and the minimal-constant search
//! all work from a finite list of sample points in `(0, ∞)`. A [`Grid`]
//! carries the points together with cell bounds so that product-rule sums
//! (value at the sample × cell width) approximate the corresponding
//! integrals. Geometric spacing is the default because every quantity in
//! this crate lives on a multiplicative scale.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How sample points are laid out between the window endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    /// Equal steps in `x`.
    Uniform,
    /// Equal steps in `log x`.
    Geometric,
}

/// A finite, strictly increasing list of positive sample points with an
/// associated cell decomposition of the spanned interval.
#[derive(Debug, Clone)]
pub struct Grid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl Grid {
    /// Builds `count` points from `lo` to `hi` inclusive.
    pub fn new(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(lo > 0.0) || !lo.is_finite() {
            return Err(Error::invalid(format!(
                "grid lower endpoint must be positive and finite, got {lo}"
            )));
        }
        if !(hi > lo) || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "grid upper endpoint must exceed the lower one, got lo={lo}, hi={hi}"
            )));
        }
        if count < 2 {
            return Err(Error::invalid(format!(
                "grid needs at least 2 points, got {count}"
            )));
        }
        let n = count;
        let mut points = Vec::with_capacity(n);
        match spacing {
            Spacing::Uniform => {
                let step = (hi - lo) / (n - 1) as f64;
                for k in 0..n {
                    points.push(lo + step * k as f64);
                }
            }
            Spacing::Geometric => {
                let lstep = (hi / lo).ln() / (n - 1) as f64;
                for k in 0..n {
                    points.push(lo * (lstep * k as f64).exp());
                }
            }
        }
        // Pin the endpoints exactly; accumulated rounding must not move them.
        points[0] = lo;
        points[n - 1] = hi;
        Ok(Grid { points, spacing })
    }

    /// Wraps an explicit strictly increasing positive point list.
    pub fn from_points(points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        for w in points.windows(2) {
            if !(w[0] > 0.0) || !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::invalid(format!(
                    "grid points must be positive, finite, strictly increasing; \
                     offending pair ({}, {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Grid { points, spacing })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Cell boundaries `b_0 < b_1 < … < b_n` with the k-th sample inside
    /// `[b_k, b_{k+1}]`.
    ///
    /// Interior boundaries sit at the arithmetic midpoint of neighbouring
    /// samples for uniform grids and at the geometric midpoint for geometric
    /// grids. The outer boundaries extend the first and last cell by the
    /// same half-step, clamped so the left edge stays strictly positive.
    pub fn cell_bounds(&self) -> Vec<f64> {
        let pts = &self.points;
        let n = pts.len();
        let mut b = Vec::with_capacity(n + 1);
        match self.spacing {
            Spacing::Uniform => {
                b.push((pts[0] - 0.5 * (pts[1] - pts[0])).max(pts[0] * 0.5));
                for k in 0..n - 1 {
                    b.push(0.5 * (pts[k] + pts[k + 1]));
                }
                b.push(pts[n - 1] + 0.5 * (pts[n - 1] - pts[n - 2]));
            }
            Spacing::Geometric => {
                let r0 = (pts[1] / pts[0]).sqrt();
                b.push(pts[0] / r0);
                for k in 0..n - 1 {
                    b.push((pts[k] * pts[k + 1]).sqrt());
                }
                let rlast = (pts[n - 1] / pts[n - 2]).sqrt();
                b.push(pts[n - 1] * rlast);
            }
        }
        b
    }

    /// Width of each cell; `widths[k]` belongs to `points[k]`.
    pub fn cell_widths(&self) -> Vec<f64> {
        let b = self.cell_bounds();
        b.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// A grid with every adjacent pair's midpoint inserted (`2n − 1` points),
    /// used for refinement studies.
    pub fn refined(&self) -> Grid {
        let pts = &self.points;
        let mut out = Vec::with_capacity(2 * pts.len() - 1);
        for k in 0..pts.len() - 1 {
            out.push(pts[k]);
            let mid = match self.spacing {
                Spacing::Uniform => 0.5 * (pts[k] + pts[k + 1]),
                Spacing::Geometric => (pts[k] * pts[k + 1]).sqrt(),
            };
            out.push(mid);
        }
        out.push(*pts.last().unwrap());
        Grid {
            points: out,
            spacing: self.spacing,
        }
    }

    /// All ordered triples `(x, t, s)` with `x ≥ t ≥ s` drawn from the grid.
    ///
    /// Every decomposition and chain inequality in this crate is quantified
    /// over such triples, so diagnostics sweep this set.
    pub fn triples(&self) -> Vec<(f64, f64, f64)> {
        let pts = &self.points;
        let n = pts.len();
        let mut out = Vec::with_capacity(n * (n + 1) * (n + 2) / 6);
        for i in 0..n {
            for j in 0..=i {
                for k in 0..=j {
                    out.push((pts[i], pts[j], pts[k]));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_cells_match_hand_computation() {
        // Samples {1, 2} → interior boundary 1.5, edges extended by the
        // half-step: bounds {0.5, 1.5, 2.5}, widths {1, 1}.
        let g = Grid::new(1.0, 2.0, 2, Spacing::Uniform).unwrap();
        let b = g.cell_bounds();
        assert_eq!(b.len(), 3);
        assert!((b[0] - 0.5).abs() < 1e-15);
        assert!((b[1] - 1.5).abs() < 1e-15);
        assert!((b[2] - 2.5).abs() < 1e-15);
        let w = g.cell_widths();
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!((w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_cells_use_multiplicative_midpoints() {
        let g = Grid::from_points(vec![1.0, 2.0, 4.0, 8.0], Spacing::Geometric).unwrap();
        let b = g.cell_bounds();
        let r = 2.0f64.sqrt();
        assert!((b[0] - 1.0 / r).abs() < 1e-14);
        assert!((b[1] - r).abs() < 1e-14);
        assert!((b[2] - 2.0 * r).abs() < 1e-14);
        assert!((b[3] - 4.0 * r).abs() < 1e-14);
        assert!((b[4] - 8.0 * r).abs() < 1e-13);
    }

    #[test]
    fn construction_endpoints_are_exact() {
        let g = Grid::new(1e-4, 1e4, 200, Spacing::Geometric).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g.lo(), 1e-4);
        assert_eq!(g.hi(), 1e4);
    }

    #[test]
    fn refined_doubles_resolution_and_keeps_endpoints() {
        let g = Grid::new(1.0, 16.0, 5, Spacing::Geometric).unwrap();
        let r = g.refined();
        assert_eq!(r.len(), 9);
        assert_eq!(r.lo(), 1.0);
        assert_eq!(r.hi(), 16.0);
        // Original points survive at even indices.
        for (k, p) in g.points().iter().enumerate() {
            assert!((r.points()[2 * k] - p).abs() < 1e-12);
        }
    }

    #[test]
    fn triples_are_ordered_and_counted() {
        let g = Grid::new(1.0, 8.0, 4, Spacing::Geometric).unwrap();
        let trips = g.triples();
        // C(4+2, 3) with repetition = 20 ordered triples.
        assert_eq!(trips.len(), 20);
        for (x, t, s) in trips {
            assert!(x >= t && t >= s && s > 0.0);
        }
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(Grid::new(0.0, 1.0, 10, Spacing::Geometric).is_err());
        assert!(Grid::new(-1.0, 1.0, 10, Spacing::Uniform).is_err());
        assert!(Grid::new(2.0, 1.0, 10, Spacing::Uniform).is_err());
        assert!(Grid::new(1.0, 2.0, 1, Spacing::Uniform).is_err());
        assert!(Grid::from_points(vec![1.0, 1.0], Spacing::Uniform).is_err());
    }

    proptest! {
        #[test]
        fn widths_tile_the_extended_window(
            lo in 1e-3f64..1.0,
            ratio in 1.5f64..1e3,
            count in 2usize..40,
            geometric in proptest::bool::ANY,
        ) {
            let spacing = if geometric { Spacing::Geometric } else { Spacing::Uniform };
            let g = Grid::new(lo, lo * ratio, count, spacing).unwrap();
            let b = g.cell_bounds();
            let w = g.cell_widths();
            prop_assert_eq!(w.len(), g.len());
            // Bounds increase and each sample lies inside its cell.
            for k in 0..g.len() {
                prop_assert!(b[k] < b[k + 1]);
                prop_assert!(b[k] <= g.points()[k] && g.points()[k] <= b[k + 1]);
            }
            prop_assert!(b[0] > 0.0);
            let total: f64 = w.iter().sum();
            let span = b[g.len()] - b[0];
            prop_assert!((total - span).abs() <= 1e-9 * span.abs());
        }
    }
}
