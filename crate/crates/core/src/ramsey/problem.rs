use std::sync::Arc;

use rand::RngCore;
use serde_json::{json, Value};

use super::coloring::{binomial, for_each_subset, subset_rank, truncate_color, Coloring, HomSet, RamseyError};
use super::search::max_homogeneous;
use crate::functionals::{as_reduction_pair, EvalError, Oracle, TrackedFunctional};
use crate::problems::{counted, CountedSolver, Encoded, Problem, WordSpace, WordStream};
use crate::reductions::{seq_use2, Reduction};

/// Ramsey's theorem for `n`-subsets and `k` colors at finite scale: every
/// coloring has a homogeneous set of at least `m` vertices.
///
/// Instances are words `[N, table...]` read through truncation, so any
/// entries are allowed and any `N` up to the supported maximum. Solutions
/// are words `[color, v_1, ..., v_s]` with `v_1 < ... < v_s` homogeneous
/// and `s >= m`. Enumeration covers the colorings of `0..vertices` with
/// entries below `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyProblem {
    pub n: usize,
    pub k: u32,
    pub vertices: usize,
    pub m: usize,
}

pub fn ramsey_problem(n: usize, k: u32, vertices: usize, m: usize) -> Result<RamseyProblem, RamseyError> {
    Coloring::constant(n, vertices, k, 0)?;
    Ok(RamseyProblem { n, k, vertices, m })
}

impl RamseyProblem {
    fn table_space(&self) -> WordSpace {
        WordSpace::new(binomial(self.vertices, self.n).expect("checked on construction"), u64::from(self.k))
    }

    fn with_header(&self, table: Encoded) -> Encoded {
        let mut w = Vec::with_capacity(1 + table.len());
        w.push(self.vertices as u64);
        w.extend_from_slice(&table);
        Encoded(w)
    }
}

/// Every homogeneous vertex list of `color` with at least `min` vertices,
/// in lexicographic order.
fn homogeneous_lists(c: &Coloring, color: u32, min: usize, out: &mut Vec<Vec<usize>>) {
    fn go(c: &Coloring, color: u32, min: usize, list: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if list.len() >= min {
            out.push(list.clone());
        }
        let n = c.exponent();
        let from = list.last().map_or(0, |&v| v + 1);
        let mut subset = vec![0; n];
        for v in from..c.vertices() {
            let ok = list.len() + 1 < n
                || for_each_subset(list, n - 1, |t| {
                    subset[..n - 1].copy_from_slice(t);
                    subset[n - 1] = v;
                    c.color(&subset) == color
                });
            if ok {
                list.push(v);
                go(c, color, min, list, out);
                list.pop();
            }
        }
    }
    go(c, color, min, &mut Vec::new(), out);
}

impl Problem for RamseyProblem {
    fn name(&self) -> String {
        format!("RT({},{})", self.n, self.k)
    }

    fn params(&self) -> Value {
        json!({ "n": self.n, "k": self.k, "N": self.vertices, "m": self.m })
    }

    fn instance_valid(&self, x: &Encoded) -> bool {
        Coloring::from_encoded(self.n, self.k, x).is_ok()
    }

    fn is_solution(&self, x: &Encoded, y: &Encoded) -> bool {
        Coloring::from_encoded(self.n, self.k, x)
            .and_then(|c| HomSet::from_encoded(&c, y))
            .is_ok_and(|h| h.len() >= self.m)
    }

    fn instances(&self) -> WordStream<'_> {
        Box::new(self.table_space().iter().map(|t| self.with_header(t)))
    }

    fn instance_count(&self) -> Option<u128> {
        self.table_space().count()
    }

    fn sample_instance(&self, rng: &mut dyn RngCore) -> Encoded {
        self.with_header(self.table_space().sample(rng))
    }

    fn solutions<'a>(&'a self, x: &'a Encoded) -> WordStream<'a> {
        let Ok(c) = Coloring::from_encoded(self.n, self.k, x) else {
            return Box::new(std::iter::empty());
        };
        let mut words = Vec::new();
        for color in 0..self.k {
            let mut lists = Vec::new();
            homogeneous_lists(&c, color, self.m, &mut lists);
            words.extend(lists.into_iter().map(|vertices| HomSet { vertices, color }.to_encoded()));
        }
        Box::new(words.into_iter())
    }
}

/// A counted solver on instance words answering with a largest homogeneous
/// set, or nothing when that is smaller than `m`.
pub fn encoded_solver(n: usize, k: u32, m: usize) -> CountedSolver<Encoded, Encoded> {
    counted(move |x: &Encoded| {
        let c = Coloring::from_encoded(n, k, x).ok()?;
        let h = max_homogeneous(&c);
        (h.len() >= m).then(|| h.to_encoded())
    })
}

fn failed(msg: impl Into<String>) -> EvalError {
    EvalError::Failed(msg.into())
}

fn vertex_count(o: &Oracle<'_>, tape: usize) -> Result<usize, EvalError> {
    let n = o.query(tape, 0)?;
    usize::try_from(n)
        .ok()
        .filter(|&n| n <= super::coloring::MAX_VERTICES)
        .ok_or_else(|| failed("vertex count too large"))
}

/// `f(i, j)` truncated to `k` colors, read from the word on `tape`.
fn read_pair(o: &Oracle<'_>, tape: usize, vertices: usize, i: usize, j: usize, k: u32) -> Result<u32, EvalError> {
    if !(i < j && j < vertices) {
        return Err(failed(format!("pair ({i}, {j}) outside {vertices} vertices")));
    }
    Ok(truncate_color(o.query(tape, 1 + subset_rank(&[i, j], vertices))?, k))
}

/// Pair-coloring word of `f > 1` over the 4-coloring word on its input.
pub fn halving_functional() -> TrackedFunctional {
    TrackedFunctional::new("halve", 1, |o| {
        let n = vertex_count(o, 0)?;
        let mut w = vec![n as u64];
        for i in 0..n {
            for j in i + 1..n {
                w.push(u64::from(read_pair(o, 0, n, i, j, 4)? > 1));
            }
        }
        Ok(Encoded(w))
    })
}

/// `pair(g1, f)`: the first instance together with the data the
/// continuation needs.
pub fn two_step_forward() -> TrackedFunctional {
    let halve = halving_functional();
    TrackedFunctional::new("two-step-forward", 1, move |o| {
        let g1 = o.call(&halve, &[crate::functionals::Arg::Tape(0)])?;
        let n = vertex_count(o, 0)?;
        let len = 1 + binomial(n, 2).unwrap_or(0);
        let f = (0..len).map(|p| o.query(0, p)).collect::<Result<Vec<_>, _>>()?;
        Ok(Encoded::pair(&g1, &Encoded(f)))
    })
}

/// From the 4-coloring word `f` and a solution word `[c, x_1, ...]` of the
/// first instance: the coloring of `x`'s index pairs by parity of `f`.
pub fn parity_continuation() -> TrackedFunctional {
    TrackedFunctional::new("parity", 2, |o| {
        let y = o.read_all(1)?;
        let x: Vec<usize> = y.iter().skip(1).map(|&v| v as usize).collect();
        let n = vertex_count(o, 0)?;
        let mut w = vec![x.len() as u64];
        for a in 0..x.len() {
            for b in a + 1..x.len() {
                w.push(u64::from(read_pair(o, 0, n, x[a], x[b], 4)? % 2));
            }
        }
        Ok(Encoded(w))
    })
}

/// `(f, tuple(y1, y2)) ↦ [2 c1 + c2, x_m for m in y2]`.
pub fn two_step_backward_functional() -> TrackedFunctional {
    TrackedFunctional::new("two-step-backward", 2, |o| {
        let ys = o.read_all(1)?.untuple().map_err(|e| failed(e.to_string()))?;
        let [y1, y2] = &ys[..] else {
            return Err(failed("expected two solutions"));
        };
        let (Some(&c1), Some(&c2)) = (y1.first(), y2.first()) else {
            return Err(failed("empty solution word"));
        };
        let mut out = vec![2 * c1 + c2];
        for &m in &y2[1..] {
            let v = y1.get(1 + m as usize).ok_or_else(|| failed(format!("index {m} outside the first solution")))?;
            out.push(*v);
        }
        Ok(Encoded(out))
    })
}

/// Two sequential applications of the 2-color problem solve the 4-color
/// problem on pairs, packaged as a reduction.
pub fn rt24_two_step_reduction(vertices: usize, m: usize, budget: u64) -> Result<Reduction, RamseyError> {
    let source: Arc<dyn Problem> = Arc::new(ramsey_problem(2, 4, vertices, m)?);
    let base: Arc<dyn Problem> = Arc::new(ramsey_problem(2, 2, vertices, m)?);
    // The continuation data is the source coloring itself; the sequential
    // problem's own instance enumeration is not used here.
    let target: Arc<dyn Problem> = Arc::new(seq_use2(base, parity_continuation(), WordSpace::new(0, 1), budget));
    Ok(as_reduction_pair(source, target, two_step_forward(), two_step_backward_functional())
        .expect("arities are fixed"))
}
