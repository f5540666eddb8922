//! Executable models of uniform (Weihrauch-style) reductions between finite
//! combinatorial problems.
//!
//! * [`formula`]: a small two-sorted formula language with syntactic
//!   classifiers.
//! * [`problems`]: instance/solution relations over finite words, and the
//!   call-counting solver wrapper.
//! * [`functionals`]: computations that read their input through an
//!   instrumented oracle, recording exactly which positions they used.
//! * [`reductions`]: forward/backward pairs, their exhaustive or sampled
//!   verification, composition and sequential multi-use.
//! * [`ramsey`]: finite colorings, homogeneous-set search and the
//!   two-application and one-application reductions between Ramsey
//!   statements.
//! * [`adversary`]: trees, the path-or-escape solution predicate and the
//!   finite-use probe that defeats bounded-use backward maps.

pub mod adversary;
pub mod formula;
pub mod functionals;
pub mod problems;
pub mod ramsey;
pub mod reductions;
