//! Computations that see their inputs only through an instrumented oracle.
//!
//! A [`TrackedFunctional`] is host code receiving an [`Oracle`]. Every
//! read goes through [`Oracle::query`] (or [`Oracle::len`]), which charges
//! one step against the evaluation budget and records the position and the
//! answer in a [`UseRecord`]. The record is the finite use of the
//! computation: any input agreeing with the original on it produces the
//! same output.

mod combinators;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::problems::{Encoded, Problem};
use crate::reductions::{Reduction, ReductionError};

pub use combinators::{random_functional, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("query of position {pos} on input {tape} of length {len}")]
    OutOfRange { tape: usize, pos: usize, len: usize },
    #[error("no input {tape}; the functional has {arity}")]
    NoSuchTape { tape: usize, arity: usize },
    #[error("`{name}` takes {expected} inputs, got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("second input disagrees with the first on its recorded use")]
    UseDisagreement,
    #[error("{0}")]
    Failed(String),
}

type Body = dyn Fn(&Oracle<'_>) -> Result<Encoded, EvalError> + Send + Sync;

/// A named, fixed-arity computation over oracle inputs.
///
/// Functionals must be deterministic in the oracle answers; this is what
/// [`consistency_check`] probes.
#[derive(Clone)]
pub struct TrackedFunctional {
    name: Arc<str>,
    arity: usize,
    body: Arc<Body>,
}

impl fmt::Debug for TrackedFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TrackedFunctional({}/{})", self.name, self.arity)
    }
}

impl TrackedFunctional {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        body: impl Fn(&Oracle<'_>) -> Result<Encoded, EvalError> + Send + Sync + 'static,
    ) -> TrackedFunctional {
        TrackedFunctional { name: Arc::from(name.into()), arity, body: Arc::new(body) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Ignores its inputs.
    pub fn constant(arity: usize, word: Encoded) -> TrackedFunctional {
        TrackedFunctional::new(format!("const{word}"), arity, move |_| Ok(word.clone()))
    }

    /// Copies input `tape` in full.
    pub fn projection(arity: usize, tape: usize) -> TrackedFunctional {
        TrackedFunctional::new(format!("proj{tape}"), arity, move |o| o.read_all(tape))
    }

    pub fn identity() -> TrackedFunctional {
        TrackedFunctional::projection(1, 0)
    }

    /// `[u(pos)]`.
    pub fn read_at(pos: usize) -> TrackedFunctional {
        TrackedFunctional::new(format!("read{pos}"), 1, move |o| Ok(Encoded::new(vec![o.query(0, pos)?])))
    }

    /// `outer(inner_1(u), ..., inner_k(u))`, every inner functional reading
    /// the same inputs.
    pub fn compose(outer: &TrackedFunctional, inner: &[TrackedFunctional]) -> Result<TrackedFunctional, EvalError> {
        if outer.arity != inner.len() {
            return Err(EvalError::Arity { name: outer.name.to_string(), expected: outer.arity, found: inner.len() });
        }
        let arity = inner.first().map_or(0, |f| f.arity);
        if let Some(bad) = inner.iter().find(|f| f.arity != arity) {
            return Err(EvalError::Arity { name: bad.name.to_string(), expected: arity, found: bad.arity });
        }
        let names: Vec<&str> = inner.iter().map(|f| f.name()).collect();
        let name = format!("{}({})", outer.name, names.join(","));
        let outer = outer.clone();
        let inner = inner.to_vec();
        Ok(TrackedFunctional::new(name, arity, move |o| {
            let tapes: Vec<Arg> = (0..arity).map(Arg::Tape).collect();
            let mids = inner.iter().map(|f| o.call(f, &tapes).map(Arg::Word)).collect::<Result<Vec<_>, _>>()?;
            o.call(&outer, &mids)
        }))
    }
}

/// An argument passed to a nested call: one of the caller's inputs, or a
/// word the caller has computed.
#[derive(Clone, Debug)]
pub enum Arg {
    Tape(usize),
    Word(Encoded),
}

#[derive(Clone)]
enum Source<'a> {
    Root { tape: usize, word: &'a [u64] },
    Local(Arc<[u64]>),
}

struct EvalState {
    log: Vec<Vec<(usize, u64)>>,
    lengths: Vec<Option<usize>>,
    steps: u64,
    budget: u64,
}

/// The only door through which a functional sees its inputs.
pub struct Oracle<'a> {
    sources: Vec<Source<'a>>,
    state: &'a RefCell<EvalState>,
}

impl<'a> Oracle<'a> {
    pub fn arity(&self) -> usize {
        self.sources.len()
    }

    /// Charge one step.
    pub fn tick(&self) -> Result<(), EvalError> {
        let mut st = self.state.borrow_mut();
        if st.steps >= st.budget {
            return Err(EvalError::BudgetExhausted(st.budget));
        }
        st.steps += 1;
        Ok(())
    }

    fn source(&self, tape: usize) -> Result<&Source<'a>, EvalError> {
        self.sources.get(tape).ok_or(EvalError::NoSuchTape { tape, arity: self.sources.len() })
    }

    /// Value at `pos` of input `tape`; one step.
    pub fn query(&self, tape: usize, pos: usize) -> Result<u64, EvalError> {
        self.tick()?;
        match self.source(tape)? {
            Source::Root { tape: root, word } => {
                let v = *word.get(pos).ok_or(EvalError::OutOfRange { tape, pos, len: word.len() })?;
                self.state.borrow_mut().log[*root].push((pos, v));
                Ok(v)
            }
            Source::Local(word) => word.get(pos).copied().ok_or(EvalError::OutOfRange { tape, pos, len: word.len() }),
        }
    }

    /// Length of input `tape`; one step. Observing the length is recorded
    /// as part of the use.
    pub fn len(&self, tape: usize) -> Result<usize, EvalError> {
        self.tick()?;
        match self.source(tape)? {
            Source::Root { tape: root, word } => {
                self.state.borrow_mut().lengths[*root] = Some(word.len());
                Ok(word.len())
            }
            Source::Local(word) => Ok(word.len()),
        }
    }

    pub fn read_all(&self, tape: usize) -> Result<Encoded, EvalError> {
        let n = self.len(tape)?;
        (0..n).map(|i| self.query(tape, i)).collect::<Result<Vec<_>, _>>().map(Encoded)
    }

    /// Evaluate `f` on the given arguments, sharing this evaluation's budget
    /// and use record.
    pub fn call(&self, f: &TrackedFunctional, args: &[Arg]) -> Result<Encoded, EvalError> {
        if args.len() != f.arity {
            return Err(EvalError::Arity { name: f.name.to_string(), expected: f.arity, found: args.len() });
        }
        let sources = args
            .iter()
            .map(|a| match a {
                Arg::Tape(t) => self.source(*t).cloned(),
                Arg::Word(w) => Ok(Source::Local(Arc::from(w.as_slice()))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let child = Oracle { sources, state: self.state };
        (f.body)(&child)
    }
}

/// Positions of each input consulted during one evaluation, with the
/// answers seen.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UseRecord {
    pub answers: Vec<BTreeMap<usize, u64>>,
    /// `Some(len)` when the length of the input was observed.
    pub lengths: Vec<Option<usize>>,
}

impl UseRecord {
    pub fn positions(&self, tape: usize) -> Vec<usize> {
        self.answers.get(tape).map(|m| m.keys().copied().collect()).unwrap_or_default()
    }

    /// Number of distinct positions queried, over all inputs.
    pub fn size(&self) -> usize {
        self.answers.iter().map(BTreeMap::len).sum()
    }

    pub fn max_position(&self, tape: usize) -> Option<usize> {
        self.answers.get(tape).and_then(|m| m.keys().next_back().copied())
    }

    /// Whether `inputs` give the same answers on every recorded position and
    /// have any recorded lengths.
    pub fn agrees_with(&self, inputs: &[&Encoded]) -> bool {
        inputs.len() == self.answers.len()
            && self.answers.iter().zip(inputs).all(|(seen, u)| seen.iter().all(|(&p, &v)| u.get(p) == Some(&v)))
            && self.lengths.iter().zip(inputs).all(|(l, u)| l.is_none_or(|l| l == u.len()))
    }
}

impl Serialize for UseRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.answers.len()))?;
        for tape in 0..self.answers.len() {
            seq.serialize_element(&self.positions(tape))?;
        }
        seq.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub output: Encoded,
    pub use_record: UseRecord,
    pub steps: u64,
}

/// Run `f` on `inputs` within `budget` steps.
pub fn evaluate(f: &TrackedFunctional, inputs: &[&Encoded], budget: u64) -> Result<Evaluation, EvalError> {
    if budget == 0 {
        return Err(EvalError::ZeroBudget);
    }
    if inputs.len() != f.arity {
        return Err(EvalError::Arity { name: f.name.to_string(), expected: f.arity, found: inputs.len() });
    }
    let state = RefCell::new(EvalState {
        log: vec![Vec::new(); inputs.len()],
        lengths: vec![None; inputs.len()],
        steps: 0,
        budget,
    });
    let oracle = Oracle {
        sources: inputs.iter().enumerate().map(|(tape, u)| Source::Root { tape, word: u.as_slice() }).collect(),
        state: &state,
    };
    let output = (f.body)(&oracle)?;
    let st = state.into_inner();
    let answers = st.log.into_iter().map(|entries| entries.into_iter().collect()).collect();
    Ok(Evaluation { output, use_record: UseRecord { answers, lengths: st.lengths }, steps: st.steps })
}

/// Evaluate on `u`, then on `u2` (which must agree with `u` on the first
/// run's use) and report whether output and use coincide.
///
/// An honest functional always yields `true`.
pub fn consistency_check(
    f: &TrackedFunctional,
    u: &[&Encoded],
    u2: &[&Encoded],
    budget: u64,
) -> Result<bool, EvalError> {
    let first = evaluate(f, u, budget)?;
    if !first.use_record.agrees_with(u2) {
        return Err(EvalError::UseDisagreement);
    }
    let second = evaluate(f, u2, budget)?;
    Ok(first.output == second.output && first.use_record == second.use_record)
}

/// Package a forward map (one input) and a backward map (instance and
/// solution) as a reduction from `source` to `target`.
pub fn as_reduction_pair(
    source: Arc<dyn Problem>,
    target: Arc<dyn Problem>,
    forward: TrackedFunctional,
    backward: TrackedFunctional,
) -> Result<Reduction, ReductionError> {
    Reduction::new(source, target, forward, backward)
}
