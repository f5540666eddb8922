//! Trees of 0/1 words, the path-or-escape solution predicate, and the
//! finite-use probe.
//!
//! The probe runs a candidate backward map `ψ(u, ∅)` on a path prefix,
//! reads off how much of `u` it consulted, and replays it on the computable
//! extension that keeps the consulted prefix and continues with zeros. If
//! the replayed output is not a solution, the run is a [`CounterWitness`].

mod tree;

use serde::Serialize;
use thiserror::Error;

use crate::functionals::{evaluate, EvalError, TrackedFunctional};
use crate::problems::{mu_witness, Encoded};

pub use tree::{check_downward_closed, collapse, secret_prefix_tree, ProgramTree, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS-PATH")]
    PassPath,
    #[serde(rename = "PASS-ESCAPE")]
    PassEscape,
    /// `depth` is the length of the first prefix of the claimed path that
    /// leaves the tree, or for an escape claim the length of the prefix of
    /// `u` that stays inside.
    #[serde(rename = "FAIL")]
    Fail { depth: usize },
}

impl Verdict {
    pub fn passes(self) -> bool {
        !matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error("solution of length {len}; at least {needed} entries are needed")]
    ShortSolution { len: usize, needed: usize },
    #[error("escape claim {claim} is beyond depth {depth}")]
    EscapeBeyondDepth { claim: u64, depth: usize },
    #[error("escape claim {claim} needs {needed} entries of the instance, which has {available}")]
    EscapeBeyondData { claim: u64, needed: usize, available: usize },
}

/// Judge `v` as a solution for instance `u` of the path problem over `tree`.
///
/// `v(0) = 0` claims that `v(1..=depth)` is a path; `v(0) = e > 0` claims
/// that the first `e + 1` entries of `u` leave the tree.
pub fn q2_verdict(u: &[u64], v: &[u64], tree: &Tree, depth: usize) -> Result<Verdict, VerdictError> {
    let Some(&claim) = v.first() else {
        return Err(VerdictError::ShortSolution { len: 0, needed: 1 });
    };
    if claim == 0 {
        if v.len() < depth + 1 {
            return Err(VerdictError::ShortSolution { len: v.len(), needed: depth + 1 });
        }
        let path = collapse(&v[1..=depth]);
        return Ok(match (0..=depth).find(|&l| !tree.contains(&path[..l])) {
            Some(l) => Verdict::Fail { depth: l },
            None => Verdict::PassPath,
        });
    }
    if claim > depth as u64 {
        return Err(VerdictError::EscapeBeyondDepth { claim, depth });
    }
    let needed = claim as usize + 1;
    if needed > u.len() {
        return Err(VerdictError::EscapeBeyondData { claim, needed, available: u.len() });
    }
    Ok(if tree.contains_collapsed(&u[..needed]) { Verdict::Fail { depth: needed } } else { Verdict::PassEscape })
}

/// A backward map defeated by its own finite use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterWitness {
    /// Largest position of `u` consulted, if any.
    #[serde(rename = "use")]
    pub use_k: Option<usize>,
    pub use_positions: Vec<usize>,
    pub s0: Encoded,
    pub v0: Encoded,
    pub failure_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Witness(CounterWitness),
    Survived { verdict: Verdict, note: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("the backward map must take two inputs, not {0}")]
    Arity(usize),
    #[error("the given prefix leaves the tree at length {0}")]
    NotAPath(usize),
    #[error("prefix of length {len} is longer than depth + 1 = {limit}")]
    PrefixTooLong { len: usize, limit: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Verdict(#[from] VerdictError),
}

fn padded(prefix: &[u64], len: usize) -> Encoded {
    let mut w = prefix.to_vec();
    w.resize(len, 0);
    Encoded(w)
}

/// Probe `psi` at the path prefix `u0`.
///
/// `psi` is evaluated on `(u0 padded with zeros to depth + 1, ∅)`. With `k`
/// the largest position it consulted, `s0` is `u0(0..=k)` followed by zeros
/// (all zeros when nothing was consulted), and the verdict on
/// `psi(s0, ∅)` decides the outcome.
pub fn probe(
    psi: &TrackedFunctional,
    tree: &Tree,
    u0: &[u64],
    depth: usize,
    budget: u64,
) -> Result<ProbeOutcome, ProbeError> {
    if psi.arity() != 2 {
        return Err(ProbeError::Arity(psi.arity()));
    }
    if u0.len() > depth + 1 {
        return Err(ProbeError::PrefixTooLong { len: u0.len(), limit: depth + 1 });
    }
    if let Some(l) = (0..=u0.len()).find(|&l| !tree.contains_collapsed(&u0[..l])) {
        return Err(ProbeError::NotAPath(l));
    }
    let width = depth + 1;
    let u = padded(u0, width);
    let empty = Encoded::zeros(width);
    let first = evaluate(psi, &[&u, &empty], budget)?;
    let use_positions = first.use_record.positions(0);
    let use_k = first.use_record.max_position(0);
    let s0 = padded(&u[..use_k.map_or(0, |k| k + 1)], width);
    let v0 = evaluate(psi, &[&s0, &empty], budget)?.output;
    match q2_verdict(&s0, &v0, tree, depth)? {
        Verdict::Fail { depth: failure_depth } => {
            Ok(ProbeOutcome::Witness(CounterWitness { use_k, use_positions, s0, v0, failure_depth }))
        }
        verdict => {
            let note = match verdict {
                Verdict::PassEscape => "the output names a genuine escape of s0".to_string(),
                _ if mu_witness(&s0, tree, depth).is_none() => {
                    "s0 stays in the tree, so no escape claim v(0) > 0 could pass; the output is a path".to_string()
                }
                _ => "the output is a path through the tree".to_string(),
            };
            Ok(ProbeOutcome::Survived { verdict, note })
        }
    }
}

impl CounterWitness {
    /// Independent re-check: `s0` agrees with `u` on the recorded use,
    /// `psi(s0, ∅)` reproduces `v0`, and the verdict on it is a failure.
    pub fn reverify(&self, psi: &TrackedFunctional, tree: &Tree, u: &[u64], depth: usize, budget: u64) -> bool {
        let agrees = self.use_positions.iter().all(|&p| u.get(p).unwrap_or(&0) == self.s0.get(p).unwrap_or(&0));
        let empty = Encoded::zeros(depth + 1);
        let replay = evaluate(psi, &[&self.s0, &empty], budget).map(|e| e.output);
        agrees
            && replay.as_ref() == Ok(&self.v0)
            && matches!(q2_verdict(&self.s0, &self.v0, tree, depth), Ok(Verdict::Fail { .. }))
    }
}

/// `[0, p_1, ..., p_depth]` regardless of the inputs.
pub fn constant_backward(path: &[u8], depth: usize) -> TrackedFunctional {
    let mut v = vec![0u64];
    v.extend(path.iter().map(|&b| u64::from(b)));
    v.resize(depth + 1, 0);
    TrackedFunctional::constant(2, Encoded(v))
}

/// Reads `u(0..k)` and claims the path that copies those bits and continues
/// with zeros.
pub fn bounded_guess_backward(k: usize, depth: usize) -> TrackedFunctional {
    TrackedFunctional::new(format!("guess{k}"), 2, move |o| {
        let mut v = vec![0u64; depth + 1];
        for i in 0..k.min(depth) {
            v[i + 1] = u64::from(o.query(0, i)? != 0);
        }
        Ok(Encoded(v))
    })
}

/// The escape-or-path strategy: every output position searches for the
/// least `m` such that `u(0..=m)` leaves the tree. With a witness the
/// output is the escape claim `[1 + m, 0, ...]`; without one it is the
/// path read off `u`.
pub fn case_two_backward(tree: Tree, depth: usize) -> TrackedFunctional {
    TrackedFunctional::new("case-two", 2, move |o| {
        let witness = || -> Result<Option<usize>, EvalError> {
            let mut prefix = Vec::with_capacity(depth + 1);
            for m in 0..=depth {
                prefix.push(o.query(0, m)?);
                if !tree.contains_collapsed(&prefix) {
                    return Ok(Some(m));
                }
            }
            Ok(None)
        };
        let mut v = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let value = match (n, witness()?) {
                (0, found) => found.map_or(0, |m| 1 + m as u64),
                (_, Some(_)) => 0,
                (_, None) => u64::from(o.query(0, n - 1)? != 0),
            };
            v.push(value);
        }
        Ok(Encoded(v))
    })
}
