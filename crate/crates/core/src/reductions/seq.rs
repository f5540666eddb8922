use std::sync::Arc;

use rand::RngCore;
use serde_json::{json, Value};
use thiserror::Error;

use crate::functionals::{evaluate, EvalError, TrackedFunctional};
use crate::problems::{CountedSolver, DecodeError, Encoded, Problem, WordSpace, WordStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("continuation failed: {0}")]
    Continuation(#[from] EvalError),
    #[error("not an instance of the sequential problem")]
    InvalidInstance,
    #[error("solver returned nothing at application {stage}")]
    SolverFailed { stage: usize },
    #[error("solver output at application {stage} does not solve its instance")]
    InvalidSolverOutput { stage: usize },
}

/// `uses` sequential applications of `base`.
///
/// An instance is `pair(x_1, w)`: a first `base`-instance and data `w` for
/// the continuation `kappa`, which maps `(w, y_i)` to the next instance
/// `x_{i+1}`. A solution is `tuple(y_1, ..., y_uses)` with each `y_i`
/// solving `x_i`.
///
/// Instances are enumerated as `base` instances paired with the words of
/// `data`, but any `w` for which `kappa` produces valid instances is
/// accepted.
#[derive(Clone)]
pub struct SeqUse {
    pub base: Arc<dyn Problem>,
    pub kappa: TrackedFunctional,
    pub uses: usize,
    pub data: WordSpace,
    pub budget: u64,
}

pub fn seq_use2(base: Arc<dyn Problem>, kappa: TrackedFunctional, data: WordSpace, budget: u64) -> SeqUse {
    seq_use_n(base, kappa, 2, data, budget)
}

pub fn seq_use_n(
    base: Arc<dyn Problem>,
    kappa: TrackedFunctional,
    uses: usize,
    data: WordSpace,
    budget: u64,
) -> SeqUse {
    assert!(uses >= 1, "at least one application");
    SeqUse { base, kappa, uses, data, budget }
}

impl SeqUse {
    fn next(&self, w: &Encoded, y: &Encoded) -> Result<Encoded, EvalError> {
        evaluate(&self.kappa, &[w, y], self.budget).map(|e| e.output)
    }

    fn chain_valid(&self, w: &Encoded, x: &Encoded, remaining: usize) -> bool {
        self.base.instance_valid(x)
            && (remaining == 1
                || self.base.solutions(x).all(|y| match self.next(w, &y) {
                    Ok(next) => self.chain_valid(w, &next, remaining - 1),
                    Err(_) => false,
                }))
    }

    fn collect(&self, w: &Encoded, x: &Encoded, remaining: usize, prefix: &mut Vec<Encoded>, out: &mut Vec<Encoded>) {
        for y in self.base.solutions(x) {
            prefix.push(y.clone());
            if remaining == 1 {
                let parts: Vec<&Encoded> = prefix.iter().collect();
                out.push(Encoded::tuple(&parts));
            } else if let Ok(next) = self.next(w, &y) {
                self.collect(w, &next, remaining - 1, prefix, out);
            }
            prefix.pop();
        }
    }

    /// Solve `instance` by calling `solver` once per application.
    pub fn solve(&self, instance: &Encoded, solver: &CountedSolver<Encoded, Encoded>) -> Result<Encoded, SeqError> {
        let (mut x, w) = instance.unpair()?;
        let mut ys = Vec::with_capacity(self.uses);
        for stage in 1..=self.uses {
            if !self.base.instance_valid(&x) {
                return Err(SeqError::InvalidInstance);
            }
            let y = solver.solve(&x).ok_or(SeqError::SolverFailed { stage })?;
            if !self.base.is_solution(&x, &y) {
                return Err(SeqError::InvalidSolverOutput { stage });
            }
            if stage < self.uses {
                x = self.next(&w, &y)?;
            }
            ys.push(y);
        }
        let parts: Vec<&Encoded> = ys.iter().collect();
        Ok(Encoded::tuple(&parts))
    }
}

impl Problem for SeqUse {
    fn name(&self) -> String {
        format!("seq_use{}({})", self.uses, self.base.name())
    }

    fn params(&self) -> Value {
        json!({
            "base": self.base.params(),
            "uses": self.uses,
            "continuation": self.kappa.name(),
            "data": self.data,
        })
    }

    fn instance_valid(&self, x: &Encoded) -> bool {
        x.unpair().is_ok_and(|(x1, w)| self.chain_valid(&w, &x1, self.uses))
    }

    fn is_solution(&self, x: &Encoded, y: &Encoded) -> bool {
        let (Ok((mut current, w)), Ok(ys)) = (x.unpair(), y.untuple()) else {
            return false;
        };
        if ys.len() != self.uses {
            return false;
        }
        for (i, yi) in ys.iter().enumerate() {
            if !self.base.is_solution(&current, yi) {
                return false;
            }
            if i + 1 < ys.len() {
                match self.next(&w, yi) {
                    Ok(next) => current = next,
                    Err(_) => return false,
                }
            }
        }
        true
    }

    fn instances(&self) -> WordStream<'_> {
        let data = self.data;
        Box::new(self.base.instances().flat_map(move |x1| data.iter().map(move |w| Encoded::pair(&x1, &w))))
    }

    fn instance_count(&self) -> Option<u128> {
        self.base.instance_count()?.checked_mul(self.data.count()?)
    }

    fn sample_instance(&self, rng: &mut dyn RngCore) -> Encoded {
        let x1 = self.base.sample_instance(rng);
        Encoded::pair(&x1, &self.data.sample(rng))
    }

    /// Collected eagerly, in lexicographic order of `(y_1, ..., y_uses)`.
    fn solutions<'a>(&'a self, x: &'a Encoded) -> WordStream<'a> {
        let mut out = Vec::new();
        if let Ok((x1, w)) = x.unpair() {
            self.collect(&w, &x1, self.uses, &mut Vec::new(), &mut out);
        }
        Box::new(out.into_iter())
    }
}
