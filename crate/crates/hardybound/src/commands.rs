//! The operations behind the command-line subcommands.
//!
//! Each function takes the effective configuration plus the raw text it
//! was parsed from (for fingerprinting) and produces both renderings of
//! the result — JSON and CSV — together with the process exit code:
//! `0` success, `1` invalid input, `2` exhausted numerical budget,
//! `3` divergence verdict. Input errors surface as `Err`; the caller
//! maps them onto the same code space.

use crate::config::Config;
use crate::criteria::{CriterionReport, Placement};
use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::grid::Grid;
use crate::kernels::{
    check_companion_laws, compose, estimate_min_h, verify_membership, CompanionReport, Kernel,
    KernelClass, MembershipReport, MinHEstimate,
};
use crate::opnorm::{lower_bound_norm, DiscreteOperator, NormEstimate};
use crate::partition::{cumulative_primitive, partition_levels, verify_partition};
use crate::report::{csv_f64, csv_opt, render_json, Artifact, CsvTable};
use rayon::prelude::*;
use serde::Serialize;

/// Exit code signalling a divergence verdict.
pub const EXIT_DIVERGENT: i32 = 3;

/// Renderings of one command's result.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub json: String,
    pub csv: String,
    pub exit_code: i32,
}

fn criterion_csv(artifact: &Artifact, reports: &[(String, Option<usize>, &CriterionReport)]) -> String {
    let mut table = CsvTable::new(
        artifact,
        &[
            "kernel",
            "variant",
            "p",
            "q",
            "window_lo",
            "window_hi",
            "grid_points",
            "component",
            "form1",
            "form1_raw",
            "form2",
            "form2_raw",
            "growth_ratio",
            "divergent",
        ],
    );
    for (kernel_code, grid_points, report) in reports {
        for c in &report.components {
            table.push(vec![
                kernel_code.clone(),
                report.variant.clone(),
                csv_f64(report.p),
                csv_f64(report.q),
                csv_f64(report.window.0),
                csv_f64(report.window.1),
                grid_points.map_or(String::new(), |g| g.to_string()),
                c.index.to_string(),
                csv_opt(c.form1.as_ref().map(|f| f.value)),
                csv_opt(c.form1.as_ref().map(|f| f.raw)),
                csv_opt(c.form2.as_ref().map(|f| f.value)),
                csv_opt(c.form2_raw.as_ref().map(|f| f.raw)),
                csv_opt(c.growth_ratio),
                c.divergent.to_string(),
            ]);
        }
    }
    table.render()
}

/// Evaluates the boundedness criterion described by the configuration.
pub fn run_criterion(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let problem = cfg.problem()?;
    let report = problem.evaluate(&cfg.quad_tol())?;
    let exit_code = if report.divergent { EXIT_DIVERGENT } else { 0 };
    let csv = criterion_csv(&artifact, &[(report.kernel.clone(), None, &report)]);
    let json = render_json(&artifact, "criterion", cfg, &report)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code,
    })
}

#[derive(Debug, Clone, Serialize)]
struct NormResult {
    grid_points: usize,
    estimate: NormEstimate,
    /// The witness re-check: the reported value reproduced from the
    /// witness vector alone.
    witness_consistent: bool,
    criterion: CriterionReport,
    /// norm lower bound / criterion constant, when the latter is finite.
    ratio: Option<f64>,
}

/// Discretizes the operator, lower-bounds its norm, and compares with the
/// criterion constant.
pub fn run_norm(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let problem = cfg.problem()?;
    let tol = cfg.quad_tol();
    let grid = cfg.grid()?;
    let op = DiscreteOperator::from_problem(&problem, &grid, &tol)?;
    let estimate = lower_bound_norm(
        &op,
        &problem.exponents,
        cfg.norm_restarts(),
        cfg.norm_max_iters(),
        cfg.seed(),
    )?;
    let witness_consistent = estimate.verify(&op, &problem.exponents, 1e-10);
    let criterion = problem.evaluate(&tol)?;
    let ratio = criterion
        .constant
        .filter(|c| *c > 0.0)
        .map(|c| estimate.value / c);
    let exit_code = if criterion.divergent { EXIT_DIVERGENT } else { 0 };
    let result = NormResult {
        grid_points: grid.len(),
        estimate,
        witness_consistent,
        criterion,
        ratio,
    };
    let mut table = CsvTable::new(
        &artifact,
        &[
            "variant",
            "p",
            "q",
            "grid_points",
            "norm_lower",
            "criterion_constant",
            "ratio",
            "converged",
            "witness_consistent",
        ],
    );
    table.push(vec![
        result.criterion.variant.clone(),
        csv_f64(result.criterion.p),
        csv_f64(result.criterion.q),
        result.grid_points.to_string(),
        csv_f64(result.estimate.value),
        csv_opt(result.criterion.constant),
        csv_opt(result.ratio),
        result.estimate.converged.to_string(),
        result.witness_consistent.to_string(),
    ]);
    let csv = table.render();
    let json = render_json(&artifact, "norm", cfg, &result)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code,
    })
}

#[derive(Debug, Clone, Serialize)]
struct VerifyClassResult {
    kernel: String,
    class: String,
    order: usize,
    declared_h: Option<f64>,
    membership: MembershipReport,
    min_h: MinHEstimate,
    companions: CompanionReport,
    ok: bool,
}

/// Checks the kernel's claimed two-sided decomposition on a grid.
pub fn run_verify_class(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let kernel = cfg.kernel()?.at_least_order_one();
    if !kernel.has_decomposition() {
        return Err(Error::invalid(format!(
            "kernel '{}' carries no companion family to verify",
            kernel.label()
        )));
    }
    let grid = cfg.grid()?;
    let membership = verify_membership(&kernel, &grid, kernel.h())?;
    let min_h = estimate_min_h(&kernel, &grid)?;
    let companions = check_companion_laws(&kernel, &grid)?;
    let ok = membership.ok && companions.monotone_ok && companions.chain_ok;
    let result = VerifyClassResult {
        kernel: kernel.label().to_string(),
        class: kernel.class().as_str().to_string(),
        order: kernel.order(),
        declared_h: kernel.h(),
        membership,
        min_h,
        companions,
        ok,
    };
    let mut table = CsvTable::new(
        &artifact,
        &[
            "kernel",
            "class",
            "order",
            "declared_h",
            "membership_ok",
            "worst_upper",
            "worst_lower",
            "min_h_estimate",
            "suspected_unbounded",
            "monotone_ok",
            "chain_ok",
            "ok",
        ],
    );
    table.push(vec![
        result.kernel.clone(),
        result.class.clone(),
        result.order.to_string(),
        csv_opt(result.declared_h),
        result.membership.ok.to_string(),
        csv_f64(result.membership.worst_upper),
        csv_f64(result.membership.worst_lower),
        csv_f64(result.min_h.value),
        result.min_h.suspected_unbounded.to_string(),
        result.companions.monotone_ok.to_string(),
        result.companions.chain_ok.to_string(),
        result.ok.to_string(),
    ]);
    let csv = table.render();
    let json = render_json(&artifact, "verify-class", cfg, &result)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
struct ComposeSample {
    x: f64,
    s: f64,
    value: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ComposeResult {
    label: String,
    class: String,
    order: usize,
    has_decomposition: bool,
    samples: Vec<ComposeSample>,
}

/// Chains two kernels through a middle weight and tabulates the result.
pub fn run_compose(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let outer = cfg.kernel()?;
    let cc = cfg
        .compose
        .as_ref()
        .ok_or_else(|| Error::invalid("missing [compose] section"))?;
    let inner = cc.inner.to_kernel()?;
    let weight = match &cc.weight {
        Some(w) => w.to_weight()?,
        None => crate::weights::Weight::one(),
    };
    let composed = compose(&outer, weight, &inner)?;
    let pairs: Vec<(f64, f64)> = match &cc.samples {
        Some(s) => s.clone(),
        None => {
            // Default: adjacent and wide pairs from a coarse grid.
            let grid = Grid::new(cfg.window().0.max(1e-3), cfg.window().1.min(1e3), 8,
                crate::grid::Spacing::Geometric)?;
            let pts = grid.points();
            let mut v = Vec::new();
            for w in pts.windows(2) {
                v.push((w[1], w[0]));
            }
            v.push((pts[pts.len() - 1], pts[0]));
            v
        }
    };
    let mut samples = Vec::with_capacity(pairs.len());
    for (x, s) in pairs {
        let value = composed.eval(x, s)?;
        samples.push(ComposeSample { x, s, value });
    }
    let result = ComposeResult {
        label: composed.label().to_string(),
        class: composed.class().as_str().to_string(),
        order: composed.order(),
        has_decomposition: composed.has_decomposition(),
        samples,
    };
    let mut table = CsvTable::new(&artifact, &["label", "order", "x", "s", "value"]);
    for smp in &result.samples {
        table.push(vec![
            result.label.clone(),
            result.order.to_string(),
            csv_f64(smp.x),
            csv_f64(smp.s),
            csv_f64(smp.value),
        ]);
    }
    let csv = table.render();
    let json = render_json(&artifact, "compose", cfg, &result)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
struct PartitionResult {
    h: f64,
    sample_count: usize,
    partition: crate::partition::LevelPartition,
    check: crate::partition::PartitionCheck,
}

/// Computes and audits the level partition of the cumulative primitive.
pub fn run_partition(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let pc = cfg
        .partition
        .as_ref()
        .ok_or_else(|| Error::invalid("missing [partition] section"))?;
    let kernel = cfg.kernel()?;
    let v = cfg.weight_v()?;
    let input = match &pc.input {
        Some(w) => w.to_weight()?,
        None => crate::weights::Weight::one(),
    };
    let grid = cfg.grid()?;
    let samples = cumulative_primitive(&kernel, &v, &|s| input.eval_or_zero(s), &grid)?;
    let partition = partition_levels(&samples, pc.h)?;
    let check = verify_partition(&samples, &partition);
    let result = PartitionResult {
        h: pc.h,
        sample_count: samples.len(),
        partition,
        check,
    };
    let mut table = CsvTable::new(&artifact, &["h", "position", "level", "value"]);
    for bp in &result.partition.breakpoints {
        table.push(vec![
            csv_f64(result.h),
            csv_f64(bp.position),
            bp.level.to_string(),
            csv_f64(bp.value),
        ]);
    }
    let csv = table.render();
    let json = render_json(&artifact, "partition", cfg, &result)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code: 0,
    })
}

/// Parses a sweep kernel short-code: `constant`, `log_ratio`, or
/// `power_diff:ALPHA`.
fn sweep_kernel(code: &str, class: KernelClass) -> Result<Kernel> {
    if code == "constant" {
        return Ok(Kernel::constant(class));
    }
    if code == "log_ratio" {
        return Ok(Kernel::log_ratio(class));
    }
    if let Some(alpha_text) = code.strip_prefix("power_diff:") {
        let alpha: f64 = alpha_text
            .parse()
            .map_err(|_| Error::invalid(format!("bad power_diff exponent '{alpha_text}'")))?;
        return Kernel::power_diff(alpha, class);
    }
    Err(Error::invalid(format!(
        "unknown sweep kernel '{code}' (use constant, log_ratio, or power_diff:A)"
    )))
}

#[derive(Debug, Clone, Serialize)]
struct SweepNorm {
    grid_points: usize,
    norm_lower: f64,
    ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SweepPointResult {
    kernel: String,
    p: f64,
    q: f64,
    window: (f64, f64),
    criterion: CriterionReport,
    norms: Vec<SweepNorm>,
}

/// Evaluates the criterion over the cartesian product of sweep axes,
/// optionally estimating the discrete norm at each grid size.
pub fn run_sweep(cfg: &Config, raw: &str) -> Result<CommandOutput> {
    let artifact = Artifact::new(raw, cfg.seed());
    let variant = cfg.variant()?;
    let tol = cfg.quad_tol();
    let sw = cfg.sweep.clone().unwrap_or_default();
    let kernels = sw.kernels.unwrap_or_else(|| {
        vec![
            "constant".to_string(),
            "log_ratio".to_string(),
            "power_diff:1".to_string(),
        ]
    });
    let pq = sw
        .pq
        .unwrap_or_else(|| vec![(2.0, 4.0 / 3.0), (2.0, 1.5), (3.0, 2.0)]);
    let windows = sw.windows.unwrap_or_else(|| vec![cfg.window()]);
    let grid_points = sw.grid_points.unwrap_or_default();

    struct Point {
        code: String,
        exponents: Exponents,
        window: (f64, f64),
    }
    let mut points = Vec::new();
    for code in &kernels {
        sweep_kernel(code, variant.class)?; // fail fast on bad codes
        for &(p, q) in &pq {
            let exponents = Exponents::new(p, q)?;
            for &window in &windows {
                points.push(Point {
                    code: code.clone(),
                    exponents,
                    window,
                });
            }
        }
    }

    let u = cfg.weight_u()?;
    let v = cfg.weight_v()?;
    let measure = cfg.measure()?;
    if variant.placement != Placement::Weights && measure.is_none() {
        return Err(Error::invalid(
            "sweep variant uses a measure placement but no [measure] is configured",
        ));
    }

    let results: Vec<Result<SweepPointResult>> = points
        .par_iter()
        .map(|pt| {
            let kernel = sweep_kernel(&pt.code, variant.class)?;
            let mut problem = crate::criteria::Problem::new(variant, kernel, pt.exponents)
                .with_u(u.clone())
                .with_v(v.clone())
                .with_window(pt.window.0, pt.window.1);
            if let Some(m) = &measure {
                problem = problem.with_measure(m.clone());
            }
            let criterion = problem.evaluate(&tol)?;
            let mut norms = Vec::new();
            for &gp in &grid_points {
                let grid = Grid::new(pt.window.0, pt.window.1, gp, crate::grid::Spacing::Geometric)?;
                let op = DiscreteOperator::from_problem(&problem, &grid, &tol)?;
                let est = lower_bound_norm(
                    &op,
                    &problem.exponents,
                    cfg.norm_restarts(),
                    cfg.norm_max_iters(),
                    cfg.seed(),
                )?;
                let ratio = criterion
                    .constant
                    .filter(|c| *c > 0.0)
                    .map(|c| est.value / c);
                norms.push(SweepNorm {
                    grid_points: gp,
                    norm_lower: est.value,
                    ratio,
                });
            }
            Ok(SweepPointResult {
                kernel: pt.code.clone(),
                p: pt.exponents.p,
                q: pt.exponents.q,
                window: pt.window,
                criterion,
                norms,
            })
        })
        .collect();
    let results: Vec<SweepPointResult> = results.into_iter().collect::<Result<_>>()?;

    let mut table = CsvTable::new(
        &artifact,
        &[
            "kernel",
            "variant",
            "p",
            "q",
            "window_lo",
            "window_hi",
            "component",
            "form1",
            "form2",
            "growth_ratio",
            "divergent",
            "grid_points",
            "norm_lower",
            "ratio",
        ],
    );
    for r in &results {
        let norm_cells: Vec<(String, String, String)> = if r.norms.is_empty() {
            vec![(String::new(), String::new(), String::new())]
        } else {
            r.norms
                .iter()
                .map(|n| {
                    (
                        n.grid_points.to_string(),
                        csv_f64(n.norm_lower),
                        csv_opt(n.ratio),
                    )
                })
                .collect()
        };
        for (gp, norm_lower, ratio) in &norm_cells {
            for c in &r.criterion.components {
                table.push(vec![
                    r.kernel.clone(),
                    r.criterion.variant.clone(),
                    csv_f64(r.p),
                    csv_f64(r.q),
                    csv_f64(r.window.0),
                    csv_f64(r.window.1),
                    c.index.to_string(),
                    csv_opt(c.form1.as_ref().map(|f| f.value)),
                    csv_opt(c.form2.as_ref().map(|f| f.value)),
                    csv_opt(c.growth_ratio),
                    c.divergent.to_string(),
                    gp.clone(),
                    norm_lower.clone(),
                    ratio.clone(),
                ]);
            }
        }
    }
    let csv = table.render();
    let json = render_json(&artifact, "sweep", cfg, &results)?;
    Ok(CommandOutput {
        json,
        csv,
        exit_code: 0,
    })
}
