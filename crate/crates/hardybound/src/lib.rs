//! Boundedness constants, operator-norm estimates, and kernel-class
//! diagnostics for weighted Hardy-type integral operators between Lebesgue
//! spaces in the regime `1 < q < p < ∞`.
//!
//! The operators are `𝒦f(x) = u(x) ∫_0^x K(x,s) v(s) f(s) ds` and its
//! tail / adjoint / measure-weighted relatives, with kernels drawn from
//! order-`n` decomposition classes: `K` is sandwiched, up to a constant
//! `h`, between sums `Σᵢ K_{n,i}·K_i` of companion pairs split at an
//! intermediate point. For such kernels the finiteness of an explicit
//! integral functional `B` decides boundedness `L_p → L_q`, and this crate
//! computes `B` (two independent integral forms of it), estimates the
//! discretized operator norm from below, checks claimed kernel
//! decompositions, and builds the dyadic level partitions the theory runs
//! on.
//!
//! The examples directory is the guided tour; each one is runnable as
//! `cargo run -p hardybound --example <name>`:
//!
//! * `boundedness_criterion` — evaluate the constants for one operator
//!   and compare against a closed form.
//! * `twelve_variants` — the same computation dispatched across all
//!   twelve class/direction/placement variants.
//! * `kernel_classes` — built-in kernel families, membership checks,
//!   minimal-`h` estimation, companion laws.
//! * `operator_norm` — discretized operator-norm lower bounds vs the
//!   constant, plus a brute-force cross-check.
//! * `compose_kernels` — chaining kernels through a middle weight and the
//!   order bookkeeping that goes with it.
//! * `level_partition` — doubling-level partitions of a cumulative
//!   primitive, audited.
//! * `parameter_sweep` — the constant across kernels and exponent pairs.
//! * `divergence_verdict` — how unbounded problems are detected and
//!   reported.
//!
//! The same capabilities are exposed as a CLI (`hardybound criterion |
//! norm | verify-class | sweep | compose | partition`) driven by a TOML
//! config; see the `config` and `commands` modules.

pub mod commands;
pub mod config;
pub mod criteria;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod kernels;
pub mod measures;
pub mod opnorm;
pub mod partition;
pub mod quad;
pub mod report;
pub mod weights;

pub use criteria::{
    ComponentValue, CriterionReport, Direction, Placement, Problem, Variant,
};
pub use error::{Error, QuadFailure, Result};
pub use exponents::Exponents;
pub use grid::{Grid, Spacing};
pub use kernels::{compose, Kernel, KernelClass, KernelFn};
pub use measures::{Interval, Measure};
pub use opnorm::{brute_force_norm, lower_bound_norm, DiscreteOperator, NormEstimate};
pub use partition::{
    cumulative_primitive, partition_levels, verify_partition, Breakpoint, LevelPartition,
    PartitionCheck,
};
pub use quad::{QuadOutcome, QuadTol};
pub use report::{Artifact, CsvTable};
pub use weights::Weight;
