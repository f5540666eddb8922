//! Forward/backward pairs between problems and their verification.
//!
//! A [`Reduction`] from `Q` (the source) to `P` (the target) carries a
//! forward map turning `Q`-instances into `P`-instances and a backward map
//! turning `(u, y)` with `y` a `P`-solution of the forward image back into
//! a `Q`-solution for `u`. [`verify`] checks both clauses on enumerated or
//! sampled instances, and the backward clause on every enumerated solution
//! of each image.

mod seq;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::functionals::{evaluate, Arg, TrackedFunctional};
use crate::problems::{Encoded, Problem, Run};

pub use seq::{seq_use2, seq_use_n, SeqError, SeqUse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("forward map `{name}` must take 1 input, not {arity}")]
    ForwardArity { name: String, arity: usize },
    #[error("backward map `{name}` must take 2 inputs, not {arity}")]
    BackwardArity { name: String, arity: usize },
    #[error(
        "cannot compose: target `{target}` of the first reduction is not the source `{source_name}` of the second"
    )]
    ProblemMismatch { target: String, source_name: String },
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

#[derive(Clone)]
pub struct Reduction {
    pub source: Arc<dyn Problem>,
    pub target: Arc<dyn Problem>,
    pub forward: TrackedFunctional,
    pub backward: TrackedFunctional,
}

impl std::fmt::Debug for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reduction")
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("forward", &self.forward)
            .field("backward", &self.backward)
            .finish()
    }
}

impl Reduction {
    pub fn new(
        source: Arc<dyn Problem>,
        target: Arc<dyn Problem>,
        forward: TrackedFunctional,
        backward: TrackedFunctional,
    ) -> Result<Reduction, ReductionError> {
        if forward.arity() != 1 {
            return Err(ReductionError::ForwardArity { name: forward.name().into(), arity: forward.arity() });
        }
        if backward.arity() != 2 {
            return Err(ReductionError::BackwardArity { name: backward.name().into(), arity: backward.arity() });
        }
        Ok(Reduction { source, target, forward, backward })
    }

    /// The identity reduction of `problem` to itself.
    pub fn identity(problem: Arc<dyn Problem>) -> Reduction {
        Reduction {
            source: Arc::clone(&problem),
            target: problem,
            forward: TrackedFunctional::identity(),
            backward: TrackedFunctional::projection(2, 1),
        }
    }
}

/// `r2 ∘ r1`: forward `r2.φ ∘ r1.φ`, backward
/// `(u, y) ↦ r1.ψ(u, r2.ψ(r1.φ(u), y))`.
pub fn compose(r1: &Reduction, r2: &Reduction) -> Result<Reduction, ReductionError> {
    if !r1.target.same_as(r2.source.as_ref()) {
        return Err(ReductionError::ProblemMismatch { target: r1.target.name(), source_name: r2.source.name() });
    }
    let (f1, f2) = (r1.forward.clone(), r2.forward.clone());
    let forward = TrackedFunctional::new(format!("{}∘{}", f2.name(), f1.name()), 1, move |o| {
        let x = o.call(&f1, &[Arg::Tape(0)])?;
        o.call(&f2, &[Arg::Word(x)])
    });
    let (f1, b1, b2) = (r1.forward.clone(), r1.backward.clone(), r2.backward.clone());
    let backward = TrackedFunctional::new(format!("{}∘{}", b1.name(), b2.name()), 2, move |o| {
        let x = o.call(&f1, &[Arg::Tape(0)])?;
        let y = o.call(&b2, &[Arg::Word(x), Arg::Tape(1)])?;
        o.call(&b1, &[Arg::Tape(0), Arg::Word(y)])
    });
    Reduction::new(Arc::clone(&r1.source), Arc::clone(&r2.target), forward, backward)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyParams {
    pub mode: Mode,
    /// Step budget for each evaluation of the forward or backward map.
    pub budget: u64,
    pub jobs: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { mode: Mode::Exhaustive, budget: 1_000_000, jobs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForwardFailure {
    pub instance: Encoded,
    pub image: Option<Encoded>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BackwardFailure {
    pub instance: Encoded,
    pub image: Encoded,
    pub solution: Encoded,
    pub output: Option<Encoded>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub source: String,
    pub target: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub exhaustive: bool,
    /// Source instances checked.
    pub checked: u64,
    pub forward_failures: Vec<ForwardFailure>,
    pub backward_failures: Vec<BackwardFailure>,
    /// Largest number of input positions read by one evaluation.
    pub max_use: usize,
    pub evaluations: u64,
    /// Target solutions fed to the backward map.
    pub counter: u64,
    pub passed: bool,
}

#[derive(Default)]
struct Partial {
    forward_failures: Vec<ForwardFailure>,
    backward_failures: Vec<BackwardFailure>,
    max_use: usize,
    evaluations: u64,
    counter: u64,
}

impl Partial {
    fn merge(&mut self, other: Partial) {
        self.forward_failures.extend(other.forward_failures);
        self.backward_failures.extend(other.backward_failures);
        self.max_use = self.max_use.max(other.max_use);
        self.evaluations += other.evaluations;
        self.counter += other.counter;
    }
}

fn check_instance(r: &Reduction, u: &Encoded, budget: u64) -> Partial {
    let mut out = Partial::default();
    if !r.source.instance_valid(u) {
        return out;
    }
    let image = match evaluate(&r.forward, &[u], budget) {
        Ok(e) => {
            out.evaluations += 1;
            out.max_use = out.max_use.max(e.use_record.size());
            e.output
        }
        Err(err) => {
            out.forward_failures.push(ForwardFailure { instance: u.clone(), image: None, reason: err.to_string() });
            return out;
        }
    };
    if !r.target.instance_valid(&image) {
        out.forward_failures.push(ForwardFailure {
            instance: u.clone(),
            image: Some(image),
            reason: "image is not a target instance".into(),
        });
        return out;
    }
    for y in r.target.solutions(&image) {
        out.counter += 1;
        let failure = |output, reason: String| BackwardFailure {
            instance: u.clone(),
            image: image.clone(),
            solution: y.clone(),
            output,
            reason,
        };
        match evaluate(&r.backward, &[u, &y], budget) {
            Ok(e) => {
                out.evaluations += 1;
                out.max_use = out.max_use.max(e.use_record.size());
                if !r.source.is_solution(u, &e.output) {
                    out.backward_failures.push(failure(Some(e.output), "output does not solve the instance".into()));
                }
            }
            Err(err) => out.backward_failures.push(failure(None, err.to_string())),
        }
    }
    out
}

const BATCH: usize = 4096;

/// Check both clauses of `r` on every enumerated (or sampled) source
/// instance, and the backward clause on every enumerated solution of each
/// forward image.
///
/// Evaluation errors are recorded as failures of the clause in which they
/// occur. Failure lists follow the instance order, then the solution order,
/// whatever the number of jobs.
pub fn verify(r: &Reduction, params: &VerifyParams) -> Result<VerificationReport, ReductionError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.jobs.max(1))
        .build()
        .map_err(|e| ReductionError::Pool(e.to_string()))?;
    let (instances, seed, exhaustive): (Box<dyn Iterator<Item = Encoded> + Send>, _, _) = match params.mode {
        Mode::Exhaustive => (r.source.instances(), None, true),
        Mode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drawn: Vec<Encoded> = (0..samples).map(|_| r.source.sample_instance(&mut rng)).collect();
            (Box::new(drawn.into_iter()), Some(seed), false)
        }
    };
    let mut total = Partial::default();
    let mut checked = 0u64;
    let mut instances = instances.peekable();
    while instances.peek().is_some() {
        let batch: Vec<Encoded> = instances.by_ref().take(BATCH).collect();
        checked += batch.len() as u64;
        let parts: Vec<Partial> =
            pool.install(|| batch.par_iter().map(|u| check_instance(r, u, params.budget)).collect());
        for p in parts {
            total.merge(p);
        }
    }
    let passed = total.forward_failures.is_empty() && total.backward_failures.is_empty();
    Ok(VerificationReport {
        source: r.source.name(),
        target: r.target.name(),
        params: json!({
            "source": r.source.params(),
            "target": r.target.params(),
            "forward": r.forward.name(),
            "backward": r.backward.name(),
            "mode": params.mode,
            "budget": params.budget,
        }),
        seed,
        exhaustive,
        checked,
        forward_failures: total.forward_failures,
        backward_failures: total.backward_failures,
        max_use: total.max_use,
        evaluations: total.evaluations,
        counter: total.counter,
        passed,
    })
}

/// The number of solver applications made during `run`.
pub fn application_count<T>(run: &Run<T>) -> u64 {
    run.applications
}
