//! TOML configuration for the command-line interface.
//!
//! Sections are plain optional structs; every section rejects unknown
//! keys so a typo fails loudly instead of silently falling back to a
//! default, and each kind-dispatched item (weights, kernels, measures)
//! validates that exactly the fields of its kind are present.

use crate::criteria::{Direction, Placement, Problem, Variant};
use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::grid::{Grid, Spacing};
use crate::kernels::{Kernel, KernelClass, TableData};
use crate::measures::Measure;
use crate::quad::QuadTol;
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub exponents: Option<ExponentsConfig>,
    pub kernel: Option<KernelConfig>,
    pub operator: Option<OperatorConfig>,
    pub weights: Option<WeightsConfig>,
    pub measure: Option<MeasureConfig>,
    pub window: Option<WindowConfig>,
    pub grid: Option<GridConfig>,
    pub tolerances: Option<TolerancesConfig>,
    pub norm: Option<NormConfig>,
    pub partition: Option<PartitionConfig>,
    pub compose: Option<ComposeConfig>,
    pub sweep: Option<SweepConfig>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// `constant`, `log_ratio`, `power_diff`, or `table`.
    pub family: String,
    /// `plus` (default) or `minus`.
    pub class: Option<String>,
    /// Exponent for the `power_diff` family.
    pub alpha: Option<f64>,
    pub table: Option<TableConfig>,
    pub claimed_order: Option<usize>,
    pub claimed_h: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    /// `cumulative` or `tail`.
    pub direction: String,
    /// `weights` (default), `output`, or `input`.
    pub measure_role: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub u: Option<WeightConfig>,
    pub v: Option<WeightConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    /// `one`, `power`, `indicator`, `table`, or `product`.
    pub kind: String,
    pub coefficient: Option<f64>,
    pub exponent: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<Vec<(f64, f64)>>,
    pub support: Option<(f64, f64)>,
    pub factors: Option<Vec<WeightConfig>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// `lebesgue`, `density`, or `atoms`.
    pub kind: String,
    pub weight: Option<WeightConfig>,
    /// Power applied to the density weight (default 1).
    pub power: Option<f64>,
    pub atoms: Option<Vec<(f64, f64)>>,
    pub mass_at_inf: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    /// `uniform` or `geometric` (default).
    pub spacing: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
    pub max_evals: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    /// Level ratio: segments end when the primitive grows by `1 + h`.
    pub h: f64,
    /// Input profile `f`; defaults to the constant 1.
    pub input: Option<WeightConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeConfig {
    /// Kernel applied closer to the input; `[kernel]` is the outer one.
    pub inner: KernelConfig,
    /// Middle weight of the composition (default 1).
    pub weight: Option<WeightConfig>,
    /// Extra `(x, s)` pairs at which to tabulate the composition.
    pub samples: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Kernel short-codes: `constant`, `log_ratio`, `power_diff:A`.
    pub kernels: Option<Vec<String>>,
    pub pq: Option<Vec<(f64, f64)>>,
    pub windows: Option<Vec<(f64, f64)>>,
    /// When present, also estimate the discrete norm at each grid size.
    pub grid_points: Option<Vec<usize>>,
}

/// Fails when a field irrelevant to the chosen kind is present, so typos
/// like setting `alpha` on a `constant` kernel surface immediately.
fn reject_stray(kind: &str, strays: &[(&str, bool)]) -> Result<()> {
    for (name, present) in strays {
        if *present {
            return Err(Error::invalid(format!(
                "field '{name}' does not apply to kind '{kind}'"
            )));
        }
    }
    Ok(())
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config parse error: {e}")))
    }

    pub fn exponents(&self) -> Result<Exponents> {
        let e = self
            .exponents
            .as_ref()
            .ok_or_else(|| Error::invalid("missing [exponents] section"))?;
        Exponents::new(e.p, e.q)
    }

    pub fn kernel(&self) -> Result<Kernel> {
        let k = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::invalid("missing [kernel] section"))?;
        k.to_kernel()
    }

    pub fn kernel_class(&self) -> Result<KernelClass> {
        match &self.kernel {
            Some(k) => parse_class(k.class.as_deref()),
            None => Ok(KernelClass::Plus),
        }
    }

    pub fn variant(&self) -> Result<Variant> {
        let class = self.kernel_class()?;
        let (direction, placement) = match &self.operator {
            None => (Direction::Cumulative, Placement::Weights),
            Some(op) => {
                let direction = match op.direction.as_str() {
                    "cumulative" => Direction::Cumulative,
                    "tail" => Direction::Tail,
                    other => {
                        return Err(Error::invalid(format!("unknown direction '{other}'")))
                    }
                };
                let placement = match op.measure_role.as_deref() {
                    None | Some("weights") => Placement::Weights,
                    Some("output") => Placement::Output,
                    Some("input") => Placement::Input,
                    Some(other) => {
                        return Err(Error::invalid(format!("unknown measure role '{other}'")))
                    }
                };
                (direction, placement)
            }
        };
        Ok(Variant::new(class, direction, placement))
    }

    pub fn window(&self) -> (f64, f64) {
        self.window.map_or((1e-4, 1e4), |w| (w.lo, w.hi))
    }

    pub fn grid(&self) -> Result<Grid> {
        let (lo, hi) = self.window();
        let (points, spacing) = match &self.grid {
            None => (200, Spacing::Geometric),
            Some(g) => {
                let spacing = match g.spacing.as_deref() {
                    None | Some("geometric") => Spacing::Geometric,
                    Some("uniform") => Spacing::Uniform,
                    Some(other) => {
                        return Err(Error::invalid(format!("unknown spacing '{other}'")))
                    }
                };
                (g.points.unwrap_or(200), spacing)
            }
        };
        Grid::new(lo, hi, points, spacing)
    }

    pub fn quad_tol(&self) -> QuadTol {
        let mut tol = QuadTol::default();
        if let Some(t) = self.tolerances {
            if let Some(rel) = t.rel {
                tol.rel = rel;
            }
            if let Some(abs) = t.abs {
                tol.abs = abs;
            }
            if let Some(m) = t.max_evals {
                tol.max_evals = m;
            }
        }
        tol
    }

    pub fn norm_restarts(&self) -> usize {
        self.norm.and_then(|n| n.restarts).unwrap_or(8)
    }

    pub fn norm_max_iters(&self) -> usize {
        self.norm.and_then(|n| n.max_iters).unwrap_or(500)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn weight_u(&self) -> Result<Weight> {
        match self.weights.as_ref().and_then(|w| w.u.as_ref()) {
            Some(w) => w.to_weight(),
            None => Ok(Weight::one()),
        }
    }

    pub fn weight_v(&self) -> Result<Weight> {
        match self.weights.as_ref().and_then(|w| w.v.as_ref()) {
            Some(w) => w.to_weight(),
            None => Ok(Weight::one()),
        }
    }

    pub fn measure(&self) -> Result<Option<Measure>> {
        match &self.measure {
            None => Ok(None),
            Some(m) => m.to_measure().map(Some),
        }
    }

    /// Assembles the full criterion problem this config describes.
    pub fn problem(&self) -> Result<Problem> {
        let variant = self.variant()?;
        let kernel = self.kernel()?;
        let exponents = self.exponents()?;
        let (lo, hi) = self.window();
        let mut problem = Problem::new(variant, kernel, exponents)
            .with_u(self.weight_u()?)
            .with_v(self.weight_v()?)
            .with_window(lo, hi);
        if let Some(m) = self.measure()? {
            problem = problem.with_measure(m);
        }
        Ok(problem)
    }
}

fn parse_class(s: Option<&str>) -> Result<KernelClass> {
    match s {
        None | Some("plus") => Ok(KernelClass::Plus),
        Some("minus") => Ok(KernelClass::Minus),
        Some(other) => Err(Error::invalid(format!("unknown kernel class '{other}'"))),
    }
}

impl KernelConfig {
    pub fn to_kernel(&self) -> Result<Kernel> {
        let class = parse_class(self.class.as_deref())?;
        match self.family.as_str() {
            "constant" => {
                reject_stray(
                    "constant",
                    &[
                        ("alpha", self.alpha.is_some()),
                        ("table", self.table.is_some()),
                        ("claimed_order", self.claimed_order.is_some()),
                        ("claimed_h", self.claimed_h.is_some()),
                    ],
                )?;
                Ok(Kernel::constant(class))
            }
            "log_ratio" => {
                reject_stray(
                    "log_ratio",
                    &[
                        ("alpha", self.alpha.is_some()),
                        ("table", self.table.is_some()),
                        ("claimed_order", self.claimed_order.is_some()),
                        ("claimed_h", self.claimed_h.is_some()),
                    ],
                )?;
                Ok(Kernel::log_ratio(class))
            }
            "power_diff" => {
                reject_stray(
                    "power_diff",
                    &[
                        ("table", self.table.is_some()),
                        ("claimed_order", self.claimed_order.is_some()),
                        ("claimed_h", self.claimed_h.is_some()),
                    ],
                )?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::invalid("power_diff kernel needs 'alpha'"))?;
                Kernel::power_diff(alpha, class)
            }
            "table" => {
                reject_stray("table", &[("alpha", self.alpha.is_some())])?;
                if class != KernelClass::Plus {
                    return Err(Error::invalid(
                        "tabulated kernels are built plus-class; omit 'class' or set it to 'plus'",
                    ));
                }
                let t = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::invalid("table kernel needs a [kernel.table]"))?;
                let order = self
                    .claimed_order
                    .ok_or_else(|| Error::invalid("table kernel needs 'claimed_order'"))?;
                Kernel::table(
                    TableData {
                        x: t.x.clone(),
                        s: t.s.clone(),
                        values: t.values.clone(),
                    },
                    order,
                    self.claimed_h,
                )
            }
            other => Err(Error::invalid(format!("unknown kernel family '{other}'"))),
        }
    }
}

impl WeightConfig {
    pub fn to_weight(&self) -> Result<Weight> {
        let base = match self.kind.as_str() {
            "one" => {
                reject_stray(
                    "one",
                    &[
                        ("coefficient", self.coefficient.is_some()),
                        ("exponent", self.exponent.is_some()),
                        ("lo", self.lo.is_some()),
                        ("hi", self.hi.is_some()),
                        ("points", self.points.is_some()),
                        ("factors", self.factors.is_some()),
                    ],
                )?;
                Weight::one()
            }
            "power" => {
                reject_stray(
                    "power",
                    &[
                        ("lo", self.lo.is_some()),
                        ("hi", self.hi.is_some()),
                        ("points", self.points.is_some()),
                        ("factors", self.factors.is_some()),
                    ],
                )?;
                let c = self.coefficient.unwrap_or(1.0);
                let e = self
                    .exponent
                    .ok_or_else(|| Error::invalid("power weight needs 'exponent'"))?;
                Weight::power(c, e)
            }
            "indicator" => {
                reject_stray(
                    "indicator",
                    &[
                        ("coefficient", self.coefficient.is_some()),
                        ("exponent", self.exponent.is_some()),
                        ("points", self.points.is_some()),
                        ("factors", self.factors.is_some()),
                    ],
                )?;
                let lo = self
                    .lo
                    .ok_or_else(|| Error::invalid("indicator weight needs 'lo'"))?;
                let hi = self
                    .hi
                    .ok_or_else(|| Error::invalid("indicator weight needs 'hi'"))?;
                Weight::indicator(lo, hi)
            }
            "table" => {
                reject_stray(
                    "table",
                    &[
                        ("coefficient", self.coefficient.is_some()),
                        ("exponent", self.exponent.is_some()),
                        ("lo", self.lo.is_some()),
                        ("hi", self.hi.is_some()),
                        ("factors", self.factors.is_some()),
                    ],
                )?;
                let pts = self
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::invalid("table weight needs 'points'"))?;
                Weight::table(pts.clone())?
            }
            "product" => {
                reject_stray(
                    "product",
                    &[
                        ("coefficient", self.coefficient.is_some()),
                        ("exponent", self.exponent.is_some()),
                        ("lo", self.lo.is_some()),
                        ("hi", self.hi.is_some()),
                        ("points", self.points.is_some()),
                    ],
                )?;
                let factors = self
                    .factors
                    .as_ref()
                    .ok_or_else(|| Error::invalid("product weight needs 'factors'"))?;
                let parts = factors
                    .iter()
                    .map(|f| f.to_weight())
                    .collect::<Result<Vec<_>>>()?;
                Weight::product(parts)
            }
            other => return Err(Error::invalid(format!("unknown weight kind '{other}'"))),
        };
        match self.support {
            Some((lo, hi)) => Ok(base.with_support(lo, hi)),
            None => Ok(base),
        }
    }
}

impl MeasureConfig {
    pub fn to_measure(&self) -> Result<Measure> {
        let base = match self.kind.as_str() {
            "lebesgue" => {
                reject_stray(
                    "lebesgue",
                    &[
                        ("weight", self.weight.is_some()),
                        ("power", self.power.is_some()),
                        ("atoms", self.atoms.is_some()),
                    ],
                )?;
                Measure::lebesgue()
            }
            "density" => {
                reject_stray("density", &[("atoms", self.atoms.is_some())])?;
                let w = self
                    .weight
                    .as_ref()
                    .ok_or_else(|| Error::invalid("density measure needs a 'weight'"))?
                    .to_weight()?;
                Measure::density_power(w, self.power.unwrap_or(1.0))
            }
            "atoms" => {
                reject_stray(
                    "atoms",
                    &[
                        ("weight", self.weight.is_some()),
                        ("power", self.power.is_some()),
                    ],
                )?;
                let atoms = self
                    .atoms
                    .clone()
                    .ok_or_else(|| Error::invalid("atoms measure needs 'atoms'"))?;
                Measure::atoms(atoms)?
            }
            other => return Err(Error::invalid(format!("unknown measure kind '{other}'"))),
        };
        let mut m = base;
        if let Some(mass) = self.mass_at_inf {
            m = m.with_mass_at_inf(mass);
        }
        if let Some(s) = self.scale {
            m = m.scaled_by(s);
        }
        Ok(m)
    }
}
