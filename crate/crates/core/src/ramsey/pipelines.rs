use serde::Serialize;
use thiserror::Error;

use super::coloring::{Coloring, HomSet, RamseyError};
use crate::problems::CountedSolver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error("solver returned nothing at stage {stage}")]
    SolverFailed { stage: usize },
    #[error("solver output at stage {stage} is not homogeneous for its instance")]
    InvalidSolverOutput { stage: usize },
    #[error("stage {stage} produced a set of size {size}; {needed} needed")]
    Insufficient { stage: usize, size: usize, needed: usize },
}

fn require_pairs_four(f: &Coloring) -> Result<(), RamseyError> {
    if f.exponent() != 2 {
        return Err(RamseyError::WrongExponent { expected: 2, found: f.exponent() });
    }
    if f.colors() != 4 {
        return Err(RamseyError::WrongColorCount { expected: 4, found: f.colors() });
    }
    Ok(())
}

/// `g1(i, j) = 1` when `f(i, j) > 1`, else `0`.
pub fn color_halving_forward(f: &Coloring) -> Result<Coloring, RamseyError> {
    require_pairs_four(f)?;
    Coloring::from_fn(2, f.vertices(), 2, |s| u64::from(f.pair(s[0], s[1]) > 1))
}

/// On the index set of `x`: `g2(i, j)` is the parity of `f(x_i, x_j)`.
pub fn parity_forward(f: &Coloring, x: &HomSet) -> Result<Coloring, RamseyError> {
    let g1 = color_halving_forward(f)?;
    HomSet::new(&g1, x.vertices.clone(), x.color)?;
    if x.len() < 2 {
        return Err(RamseyError::TooSmall { size: x.len(), needed: 2 });
    }
    let v = &x.vertices;
    Coloring::from_fn(2, v.len(), 2, |s| u64::from(f.pair(v[s[0]], v[s[1]]) % 2))
}

/// `{x_m : m in y}`.
pub fn two_step_backward(x: &[usize], y: &[usize]) -> Result<Vec<usize>, RamseyError> {
    y.iter().map(|&m| x.get(m).copied().ok_or(RamseyError::IndexOutOfRange { index: m, len: x.len() })).collect()
}

/// Check a solver answer against the coloring it was asked about.
fn checked(g: &Coloring, answer: Option<HomSet>, stage: usize) -> Result<HomSet, PipelineError> {
    let y = answer.ok_or(PipelineError::SolverFailed { stage })?;
    HomSet::new(g, y.vertices.clone(), y.color).map_err(|_| PipelineError::InvalidSolverOutput { stage })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoStep {
    pub g1_solution: HomSet,
    pub g2_solution: HomSet,
    pub output: HomSet,
}

/// A homogeneous set for a 4-coloring of pairs from two solver calls on
/// 2-colorings: first on `g1`, then on `g2` over the first answer.
pub fn rt24_via_two_rt22(
    f: &Coloring,
    solver: &CountedSolver<Coloring, HomSet>,
    m: usize,
) -> Result<TwoStep, PipelineError> {
    let g1 = color_halving_forward(f)?;
    let x = checked(&g1, solver.solve(&g1), 1)?;
    if x.len() < m.max(2) {
        return Err(PipelineError::Insufficient { stage: 1, size: x.len(), needed: m.max(2) });
    }
    let g2 = parity_forward(f, &x)?;
    let y = checked(&g2, solver.solve(&g2), 2)?;
    if y.len() < m {
        return Err(PipelineError::Insufficient { stage: 2, size: y.len(), needed: m });
    }
    let z = two_step_backward(&x.vertices, &y.vertices)?;
    let output = HomSet::new(f, z, 2 * x.color + y.color)?;
    Ok(TwoStep { g1_solution: x, g2_solution: y, output })
}

/// Non-uniform data for the one-application reduction.
///
/// Serializes as `{"j":0,"set":[...],"a0":..,"a1":..}` or
/// `{"j":1,"threshold":..}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Advice {
    /// `set` uses only the colors `a0 < a1`.
    TwoMono { set: Vec<usize>, a0: u32, a1: u32 },
    /// No set of size `threshold` uses at most two colors.
    NoTwoMono { threshold: usize },
}

impl Serialize for Advice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Advice::TwoMono { set, a0, a1 } => {
                let mut st = s.serialize_struct("Advice", 4)?;
                st.serialize_field("j", &0)?;
                st.serialize_field("set", set)?;
                st.serialize_field("a0", a0)?;
                st.serialize_field("a1", a1)?;
                st.end()
            }
            Advice::NoTwoMono { threshold } => {
                let mut st = s.serialize_struct("Advice", 2)?;
                st.serialize_field("j", &1)?;
                st.serialize_field("threshold", threshold)?;
                st.end()
            }
        }
    }
}

impl Advice {
    pub fn branch(&self) -> u8 {
        match self {
            Advice::TwoMono { .. } => 0,
            Advice::NoTwoMono { .. } => 1,
        }
    }
}

/// Decide the advice by exhaustive search.
pub fn compute_advice(f: &Coloring, s_advice: usize) -> Advice {
    match super::search::find_2mono(f, s_advice) {
        Some((set, (a0, a1))) => Advice::TwoMono { set, a0, a1 },
        None => Advice::NoTwoMono { threshold: s_advice },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OneUseError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error("solver returned nothing")]
    SolverFailed,
    #[error("solver output is not homogeneous for its instance")]
    InvalidSolverOutput,
    #[error("solver answer of size {size}; {needed} needed")]
    Insufficient { size: usize, needed: usize },
    /// The solver found a set the advice said could not exist.
    #[error("advice contradicted: {witness:?} uses at most {colors} colors")]
    AdviceContradiction { witness: Vec<usize>, colors: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneUse {
    pub advice: Advice,
    pub solver_answer: HomSet,
    pub output: HomSet,
}

/// A homogeneous set for a 4-coloring of pairs from one solver call on a
/// 2-coloring, steered by [`compute_advice`].
///
/// With a 2-mono set `x` on colors `a0 < a1`, the call is on the coloring
/// of `x`'s index pairs by "color is `a0`" and the answer maps back through
/// `x`. Without one, the call is on the coloring of all pairs by "color is
/// at least 2"; any answer is then itself 2-mono, so it is an advice
/// contradiction when it reaches the threshold and an insufficiency report
/// otherwise.
pub fn classical_one_use_rt24(
    f: &Coloring,
    solver: &CountedSolver<Coloring, HomSet>,
    s_advice: usize,
    m: usize,
) -> Result<OneUse, OneUseError> {
    require_pairs_four(f)?;
    if s_advice < m {
        return Err(OneUseError::Precondition(format!("advice threshold {s_advice} is below m = {m}")));
    }
    if s_advice < 2 {
        return Err(OneUseError::Precondition("advice threshold must be at least 2".into()));
    }
    let advice = compute_advice(f, s_advice);
    match &advice {
        Advice::TwoMono { set, a0, a1 } => {
            let g = Coloring::from_fn(2, set.len(), 2, |s| u64::from(f.pair(set[s[0]], set[s[1]]) != *a0))?;
            let y = solver.solve(&g).ok_or(OneUseError::SolverFailed)?;
            let y = HomSet::new(&g, y.vertices, y.color).map_err(|_| OneUseError::InvalidSolverOutput)?;
            if y.len() < m {
                return Err(OneUseError::Insufficient { size: y.len(), needed: m });
            }
            let z = two_step_backward(set, &y.vertices)?;
            let color = if y.color == 0 { *a0 } else { *a1 };
            let output = HomSet::new(f, z, color)?;
            Ok(OneUse { advice, solver_answer: y, output })
        }
        Advice::NoTwoMono { .. } => {
            let g = Coloring::from_fn(2, f.vertices(), 2, |s| u64::from(f.pair(s[0], s[1]) >= 2))?;
            let y = solver.solve(&g).ok_or(OneUseError::SolverFailed)?;
            let y = HomSet::new(&g, y.vertices, y.color).map_err(|_| OneUseError::InvalidSolverOutput)?;
            if y.len() >= s_advice {
                Err(OneUseError::AdviceContradiction { witness: y.vertices, colors: 2 })
            } else {
                Err(OneUseError::Insufficient { size: y.len(), needed: s_advice })
            }
        }
    }
}

/// Level of the halving hierarchy chosen by the advice search, and the
/// class of colors surviving on the chosen set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyAdvice {
    pub level: u32,
    pub set: Vec<usize>,
    pub class: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralOneUse {
    pub advice: HierarchyAdvice,
    pub solver_answer: HomSet,
    pub output: HomSet,
}

// Lexicographically least list of exactly `size` vertices on which `f`
// takes at most `limit` distinct colors, with the colors as a bit mask.
fn least_few_colored(f: &Coloring, size: usize, limit: u32) -> Option<(Vec<usize>, u128)> {
    fn go(f: &Coloring, list: &mut Vec<usize>, mask: u128, size: usize, limit: u32) -> Option<u128> {
        if list.len() == size {
            return Some(mask);
        }
        let n = f.exponent();
        let from = list.last().map_or(0, |&v| v + 1);
        for v in from..f.vertices() {
            if list.len() + (f.vertices() - v) < size {
                break;
            }
            let mut next = mask;
            if list.len() + 1 >= n {
                let mut subset = vec![0; n];
                super::coloring::for_each_subset(list, n - 1, |t| {
                    subset[..n - 1].copy_from_slice(t);
                    subset[n - 1] = v;
                    next |= 1 << f.color(&subset);
                    true
                });
            }
            if next.count_ones() <= limit {
                list.push(v);
                if let Some(found) = go(f, list, next, size, limit) {
                    return Some(found);
                }
                list.pop();
            }
        }
        None
    }
    let mut list = Vec::with_capacity(size);
    go(f, &mut list, 0, size, limit).map(|mask| (list, mask))
}

/// Pad `used` (sorted colors, at most `size` of them) to `size` colors by
/// cyclic successors of its largest member modulo `modulus`.
fn pad_class(used: &[u32], size: u32, modulus: u32) -> Vec<u32> {
    let mut class = used.to_vec();
    let mut next = used.last().map_or(0, |&c| (c + 1) % modulus);
    while (class.len() as u32) < size {
        if !class.contains(&next) {
            class.push(next);
        }
        next = (next + 1) % modulus;
    }
    class.sort_unstable();
    class
}

/// One solver call on a 2-coloring for a `k`-coloring of `n`-subsets.
///
/// With `K` the least power of two at least `k`, level `t` of the hierarchy
/// asks for a set of `s_advice` vertices using at most `K / 2^t` colors.
/// The deepest level with such a set is chosen (level 0, the whole vertex
/// set with all `K` colors, always qualifies). Its color class is split in
/// half and the solver is called once on the induced 2-coloring of the set.
pub fn generalized_one_use(
    f: &Coloring,
    solver: &CountedSolver<Coloring, HomSet>,
    s_advice: usize,
    m: usize,
) -> Result<GeneralOneUse, OneUseError> {
    let k = f.colors();
    if k < 2 {
        return Err(OneUseError::Precondition("at least two colors are needed".into()));
    }
    if s_advice < m {
        return Err(OneUseError::Precondition(format!("advice threshold {s_advice} is below m = {m}")));
    }
    let big_k = k.next_power_of_two();
    let levels = big_k.trailing_zeros();
    let mut chosen = None;
    for level in (1..levels).rev() {
        let width = big_k >> level;
        if let Some((set, mask)) = least_few_colored(f, s_advice, width) {
            let used: Vec<u32> = (0..big_k).filter(|&c| mask >> c & 1 == 1).collect();
            chosen = Some(HierarchyAdvice { level, set, class: pad_class(&used, width, big_k) });
            break;
        }
    }
    let advice = chosen.unwrap_or_else(|| HierarchyAdvice {
        level: 0,
        set: (0..f.vertices()).collect(),
        class: (0..big_k).collect(),
    });
    let half = advice.class.len() / 2;
    let (lower, upper) = advice.class.split_at(half);
    let set = &advice.set;
    let n = f.exponent();
    let g = Coloring::from_fn(n, set.len(), 2, |s| {
        let original: Vec<usize> = s.iter().map(|&i| set[i]).collect();
        u64::from(!lower.contains(&f.color(&original)))
    })?;
    let y = solver.solve(&g).ok_or(OneUseError::SolverFailed)?;
    let y = HomSet::new(&g, y.vertices, y.color).map_err(|_| OneUseError::InvalidSolverOutput)?;
    let z = two_step_backward(set, &y.vertices)?;
    let side = if y.color == 0 { lower } else { upper };
    if side.len() > 1 {
        return if y.len() >= s_advice {
            Err(OneUseError::AdviceContradiction { witness: z, colors: side.len() })
        } else {
            Err(OneUseError::Insufficient { size: y.len(), needed: s_advice })
        };
    }
    if y.len() < m {
        return Err(OneUseError::Insufficient { size: y.len(), needed: m });
    }
    let output = HomSet::new(f, z, side[0])?;
    Ok(GeneralOneUse { advice, solver_answer: y, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::counted_run;
    use crate::ramsey::search::maximum_solver;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn halving_examples() {
        let zero = Coloring::constant(2, 5, 4, 0).unwrap();
        assert!(color_halving_forward(&zero).unwrap().table().iter().all(|&c| c == 0));
        let three = Coloring::constant(2, 5, 4, 3).unwrap();
        assert!(color_halving_forward(&three).unwrap().table().iter().all(|&c| c == 1));
        let cycle = Coloring::from_fn(2, 4, 4, |s| ((s[0] + 3 * s[1]) % 4) as u64).unwrap();
        let g1 = color_halving_forward(&cycle).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(g1.pair(i, j), u32::from((i + 3 * j) % 4 > 1));
            }
        }
        let triples = Coloring::constant(3, 4, 4, 0).unwrap();
        assert!(matches!(color_halving_forward(&triples), Err(RamseyError::WrongExponent { .. })));
    }

    #[test]
    fn parity_examples() {
        let two = Coloring::constant(2, 5, 4, 2).unwrap();
        let x = HomSet { vertices: vec![0, 2, 4], color: 1 };
        assert!(parity_forward(&two, &x).unwrap().table().iter().all(|&c| c == 0));
        let three = Coloring::constant(2, 5, 4, 3).unwrap();
        assert!(parity_forward(&three, &x).unwrap().table().iter().all(|&c| c == 1));
        let mixed = Coloring::from_fn(2, 5, 4, |s| 2 + ((s[0] * s[1]) % 2) as u64).unwrap();
        let g2 = parity_forward(&mixed, &HomSet { vertices: vec![1, 2, 3], color: 1 }).unwrap();
        assert_eq!(g2.table(), &[0, 1, 0]);
        assert!(matches!(
            parity_forward(&mixed, &HomSet { vertices: vec![1, 2], color: 0 }),
            Err(RamseyError::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn backward_map_examples() {
        assert_eq!(two_step_backward(&[2, 5, 7, 11], &[0, 2, 3]).unwrap(), vec![2, 7, 11]);
        assert_eq!(two_step_backward(&[2, 5, 7, 11], &[0, 1]).unwrap(), vec![2, 5]);
        assert_eq!(two_step_backward(&[2, 5], &[2]), Err(RamseyError::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn two_step_on_constant_coloring() {
        let f = Coloring::constant(2, 6, 4, 2).unwrap();
        let solver = maximum_solver();
        let run = counted_run(&solver, |s| rt24_via_two_rt22(&f, s, 3));
        assert_eq!(run.applications, 2);
        assert_eq!(run.value.unwrap().output, HomSet { vertices: (0..6).collect(), color: 2 });
    }

    #[test]
    fn two_step_reports_stage_of_failure() {
        let f = Coloring::constant(2, 6, 4, 2).unwrap();
        let none = crate::problems::counted(|_: &Coloring| None);
        assert_eq!(rt24_via_two_rt22(&f, &none, 2), Err(PipelineError::SolverFailed { stage: 1 }));
        let liar = crate::problems::counted(|_: &Coloring| Some(HomSet { vertices: vec![0, 1], color: 0 }));
        assert_eq!(rt24_via_two_rt22(&f, &liar, 2), Err(PipelineError::InvalidSolverOutput { stage: 1 }));
    }

    #[test]
    fn one_use_on_constant_coloring() {
        let f = Coloring::constant(2, 6, 4, 1).unwrap();
        let solver = maximum_solver();
        let run = counted_run(&solver, |s| classical_one_use_rt24(&f, s, 6, 2));
        assert_eq!(run.applications, 1);
        let out = run.value.unwrap();
        assert_eq!(out.advice, Advice::TwoMono { set: (0..6).collect(), a0: 1, a1: 2 });
        assert_eq!(out.output, HomSet { vertices: (0..6).collect(), color: 1 });
    }

    #[test]
    fn undersized_answers_are_reported_not_returned() {
        // Four colors on the pairs of a triangle rule out 2-mono triples.
        let f = Coloring::new(2, 3, 4, vec![0, 1, 2]).unwrap();
        assert_eq!(compute_advice(&f, 3), Advice::NoTwoMono { threshold: 3 });
        let tiny = crate::problems::counted(|_: &Coloring| Some(HomSet { vertices: vec![0], color: 0 }));
        assert_eq!(classical_one_use_rt24(&f, &tiny, 3, 2), Err(OneUseError::Insufficient { size: 1, needed: 3 }));
        assert_eq!(tiny.count(), 1);
    }

    #[test]
    fn general_with_two_colors_is_a_direct_call() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let f = Coloring::random(n, 6, 2, &mut rng).unwrap();
            let solver = maximum_solver();
            let out = generalized_one_use(&f, &solver, 2, 2).unwrap();
            assert_eq!(out.advice.level, 0);
            assert_eq!(out.advice.set, (0..6).collect::<Vec<_>>());
            assert_eq!(out.output.vertices, out.solver_answer.vertices);
            assert_eq!(solver.count(), 1);
        }
    }

    #[test]
    fn general_pigeonhole_with_three_colors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let f = Coloring::random(1, 7, 3, &mut rng).unwrap();
            let solver = maximum_solver();
            // Any 3 of 7 vertices under 3 colors include a pair of one
            // color, so the split of a 3-set leaves a side of size 2.
            let out = generalized_one_use(&f, &solver, 3, 2).unwrap();
            assert_eq!(out.advice.level, 1);
            assert!(out.output.len() >= 2);
            assert!(out.output.vertices.iter().all(|&v| f.color(&[v]) == out.output.color));
            assert!(out.output.vertices.iter().all(|v| out.advice.set.contains(v)));
            let class = f.table().iter().filter(|&&c| c == out.output.color).count();
            assert!(class >= out.output.len());
            assert_eq!(solver.count(), 1);
        }
    }

    #[test]
    fn class_padding() {
        assert_eq!(pad_class(&[3], 2, 4), vec![0, 3]);
        assert_eq!(pad_class(&[1], 2, 4), vec![1, 2]);
        assert_eq!(pad_class(&[0, 2], 2, 4), vec![0, 2]);
        assert_eq!(pad_class(&[], 4, 4), vec![0, 1, 2, 3]);
    }
}
