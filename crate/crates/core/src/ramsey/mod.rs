//! Finite colorings, homogeneous-set search and the reductions between
//! Ramsey statements for pairs.
//!
//! Subsets are indexed in lexicographic order of sorted `n`-subsets of
//! `0..N`; for pairs, `{i, j}` with `i < j` sits at
//! `i (2N - i - 1) / 2 + (j - i - 1)`. Color values outside `0..k` read as
//! `0`.
//!
//! The halving hierarchy of [`generalized_one_use`] is a reconstruction:
//! for `k` colors beyond four only its shape is fixed by the classical
//! argument, and the level search here is one reading of it.

mod coloring;
mod pipelines;
mod problem;
mod search;

pub use coloring::{binomial, subset_rank, truncate_color, Coloring, HomSet, RamseyError, MAX_EXPONENT, MAX_VERTICES};
pub use pipelines::{
    classical_one_use_rt24, color_halving_forward, compute_advice, generalized_one_use, parity_forward,
    rt24_via_two_rt22, two_step_backward, Advice, GeneralOneUse, HierarchyAdvice, OneUse, OneUseError, PipelineError,
    TwoStep,
};
pub use problem::{
    encoded_solver, halving_functional, parity_continuation, ramsey_problem, rt24_two_step_reduction,
    two_step_backward_functional, two_step_forward, RamseyProblem,
};
pub use search::{
    find_2mono, find_homogeneous, least_solver, max_homogeneous, maximum_solver, ramsey_oracle, OracleReport,
};
