use rayon::prelude::*;
use serde::Serialize;

use super::coloring::{binomial, for_each_subset, Coloring, HomSet, RamseyError};
use crate::problems::{counted, CountedSolver, WordSpace};

// Depth-first search over strictly increasing vertex lists in lexicographic
// order. `accept(list, v)` decides whether `v` may extend `list`; the first
// list of length `size` reached is returned.
fn first_of_size(vertices: usize, size: usize, accept: &mut dyn FnMut(&[usize], usize) -> bool) -> Option<Vec<usize>> {
    fn go(
        list: &mut Vec<usize>,
        from: usize,
        vertices: usize,
        size: usize,
        accept: &mut dyn FnMut(&[usize], usize) -> bool,
    ) -> bool {
        if list.len() == size {
            return true;
        }
        for v in from..vertices {
            if list.len() + (vertices - v) < size {
                break;
            }
            if accept(list, v) {
                list.push(v);
                if go(list, v + 1, vertices, size, accept) {
                    return true;
                }
                list.pop();
            }
        }
        false
    }
    let mut list = Vec::with_capacity(size);
    go(&mut list, 0, vertices, size, accept).then_some(list)
}

/// Whether every new `n`-subset formed by adding `v` to `list` has `color`,
/// fixing `color` at the first such subset.
fn extends_homogeneously(c: &Coloring, list: &[usize], v: usize, color: &mut Option<u32>) -> bool {
    let n = c.exponent();
    if list.len() + 1 < n {
        return true;
    }
    let mut subset = vec![0; n];
    for_each_subset(list, n - 1, |t| {
        subset[..n - 1].copy_from_slice(t);
        subset[n - 1] = v;
        let col = c.color(&subset);
        match *color {
            Some(fixed) => fixed == col,
            None => {
                *color = Some(col);
                true
            }
        }
    })
}

/// The lexicographically least homogeneous vertex list of size exactly `m`,
/// ties broken by the smallest color.
///
/// Lists shorter than the exponent are homogeneous for every color, so for
/// `m < n` the answer is the first `m` vertices with color 0.
pub fn find_homogeneous(c: &Coloring, m: usize) -> Option<HomSet> {
    if m > c.vertices() {
        return None;
    }
    if m < c.exponent() {
        return Some(HomSet { vertices: (0..m).collect(), color: 0 });
    }
    // The color is fixed by the first n-subset; undo it when backtracking
    // below that depth.
    let n = c.exponent();
    let mut color: Option<u32> = None;
    let list = first_of_size(c.vertices(), m, &mut |list, v| {
        if list.len() < n {
            color = None;
        }
        let mut trial = color;
        let ok = extends_homogeneously(c, list, v, &mut trial);
        if ok {
            color = trial;
        }
        ok
    })?;
    let color = if list.len() >= n { c.color(&list[..n]) } else { 0 };
    Some(HomSet { vertices: list, color })
}

type Bits = u128;

fn bits_from(mut b: Bits) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (b != 0).then(|| {
            let i = b.trailing_zeros() as usize;
            b &= b - 1;
            i
        })
    })
}

fn max_for_color(c: &Coloring, color: u32) -> Vec<usize> {
    let n = c.exponent();
    let all: Bits = if c.vertices() == 128 { Bits::MAX } else { (1 << c.vertices()) - 1 };
    let start =
        if n == 1 { (0..c.vertices()).filter(|&v| c.color(&[v]) == color).fold(0, |b, v| b | 1 << v) } else { all };

    struct Search<'a> {
        c: &'a Coloring,
        color: u32,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn go(&mut self, current: &mut Vec<usize>, cand: Bits) {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            let n = self.c.exponent();
            let mut rest = cand;
            while rest != 0 {
                if current.len() + rest.count_ones() as usize <= self.best.len() {
                    return;
                }
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let mut next: Bits = 0;
                if n >= 2 {
                    let mut subset = vec![0; n];
                    current.push(v);
                    for w in bits_from(rest) {
                        // New constraints from adding v: every (n-1)-subset
                        // of current containing v, completed by w.
                        let ok = for_each_subset(&current[..current.len() - 1], n - 2, |t| {
                            subset[..n - 2].copy_from_slice(t);
                            subset[n - 2] = v;
                            subset[n - 1] = w;
                            self.c.color(&subset) == self.color
                        });
                        if ok {
                            next |= 1 << w;
                        }
                    }
                    current.pop();
                } else {
                    next = rest;
                }
                current.push(v);
                self.go(current, next);
                current.pop();
            }
        }
    }

    let mut s = Search { c, color, best: Vec::new() };
    s.go(&mut Vec::new(), start);
    s.best
}

/// A largest homogeneous set: the lexicographically least vertex list among
/// the largest, ties broken by the smallest color.
pub fn max_homogeneous(c: &Coloring) -> HomSet {
    let mut best = HomSet { vertices: Vec::new(), color: 0 };
    let mut found = false;
    for color in 0..c.colors() {
        let vertices = max_for_color(c, color);
        let better = !found
            || vertices.len() > best.vertices.len()
            || (vertices.len() == best.vertices.len() && vertices < best.vertices);
        if better {
            best = HomSet { vertices, color };
            found = true;
        }
    }
    best
}

/// A counted solver returning [`max_homogeneous`].
pub fn maximum_solver() -> CountedSolver<Coloring, HomSet> {
    counted(|c: &Coloring| Some(max_homogeneous(c)))
}

/// A counted solver returning [`find_homogeneous`] at size `m`.
pub fn least_solver(m: usize) -> CountedSolver<Coloring, HomSet> {
    counted(move |c: &Coloring| find_homogeneous(c, m))
}

/// The lexicographically least vertex list of size exactly `s` whose pairs
/// use at most two colors, with its color pair `(a0, a1)`, `a0 < a1`.
///
/// The pair is the two colors used; a set on which `f` is constant `c` gets
/// `{c, (c + 1) mod k}`.
pub fn find_2mono(f: &Coloring, s: usize) -> Option<(Vec<usize>, (u32, u32))> {
    if f.exponent() != 2 || f.colors() < 2 {
        return None;
    }
    let k = f.colors();
    let mut best: Option<Vec<usize>> = None;
    for a in 0..k {
        for b in a + 1..k {
            let within = |col: u32| col == a || col == b;
            let found = first_of_size(f.vertices(), s, &mut |list, v| list.iter().all(|&u| within(f.pair(u, v))));
            if let Some(set) = found {
                if best.as_ref().is_none_or(|cur| set < *cur) {
                    best = Some(set);
                }
            }
        }
    }
    let set = best?;
    let mut used: Vec<u32> = Vec::new();
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            let col = f.pair(u, v);
            if !used.contains(&col) {
                used.push(col);
            }
        }
    }
    used.sort_unstable();
    let pair = match used[..] {
        [a0, a1] => (a0, a1),
        [c] => {
            let d = (c + 1) % k;
            (c.min(d), c.max(d))
        }
        _ => (0, 1),
    };
    Some((set, pair))
}

/// Result of enumerating every pair coloring of a vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub vertices: usize,
    pub k: u32,
    pub m: usize,
    pub colorings: u64,
    /// Colorings with no homogeneous set of size `m`.
    pub without_homogeneous: u64,
    /// The first such coloring in table order.
    pub first_counterexample: Option<Coloring>,
}

/// Check every `k`-coloring of the pairs of `0..vertices` for a homogeneous
/// set of size `m`.
pub fn ramsey_oracle(vertices: usize, k: u32, m: usize, jobs: usize) -> Result<OracleReport, RamseyError> {
    let len = binomial(vertices, 2).ok_or(RamseyError::TooManyVertices(vertices))?;
    Coloring::constant(2, vertices, k, 0)?;
    let space = WordSpace::new(len, u64::from(k));
    let total = space.count().and_then(|t| u64::try_from(t).ok()).ok_or(RamseyError::TooManyVertices(vertices))?;
    let coloring_at = |index: u64| {
        let table = space.nth(u128::from(index)).expect("index below count").into_vec();
        Coloring::new(2, vertices, k, table).expect("shape checked above")
    };
    let scan = || {
        (0..total)
            .into_par_iter()
            .filter(|&i| find_homogeneous(&coloring_at(i), m).is_none())
            .fold(|| (0u64, u64::MAX), |(count, first), i| (count + 1, first.min(i)))
            .reduce(|| (0, u64::MAX), |a, b| (a.0 + b.0, a.1.min(b.1)))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RamseyError::Word(e.to_string()))?;
    let (without, first) = pool.install(scan);
    Ok(OracleReport {
        vertices,
        k,
        m,
        colorings: total,
        without_homogeneous: without,
        first_counterexample: (first != u64::MAX).then(|| coloring_at(first)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Every homogeneous list of exactly `size` vertices, in lexicographic
    // order, by plain subset enumeration.
    fn brute_homogeneous(c: &Coloring, size: usize) -> Vec<HomSet> {
        let all: Vec<usize> = (0..c.vertices()).collect();
        let mut out = Vec::new();
        for_each_subset(&all, size, |vs| {
            for color in 0..c.colors() {
                if c.is_homogeneous(vs, color) {
                    out.push(HomSet { vertices: vs.to_vec(), color });
                    break;
                }
            }
            true
        });
        out
    }

    #[test]
    fn constant_coloring_gives_first_vertices() {
        let c = Coloring::constant(2, 6, 3, 2).unwrap();
        assert_eq!(find_homogeneous(&c, 4), Some(HomSet { vertices: vec![0, 1, 2, 3], color: 2 }));
        assert_eq!(max_homogeneous(&c).vertices, (0..6).collect::<Vec<_>>());
        assert_eq!(find_homogeneous(&c, 7), None);
    }

    #[test]
    fn least_and_maximum_agree_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            for _ in 0..60 {
                let c = Coloring::random(n, 7, 2, &mut rng).unwrap();
                for m in n..=7 {
                    let brute = brute_homogeneous(&c, m);
                    assert_eq!(find_homogeneous(&c, m), brute.first().cloned(), "{c:?} m={m}");
                }
                let max = max_homogeneous(&c);
                let size = (n..=7).rev().find(|&s| !brute_homogeneous(&c, s).is_empty()).unwrap();
                assert_eq!(max.len(), size);
                let mut candidates: Vec<HomSet> = Vec::new();
                let all: Vec<usize> = (0..7).collect();
                for_each_subset(&all, size, |vs| {
                    for color in 0..2 {
                        if c.is_homogeneous(vs, color) {
                            candidates.push(HomSet { vertices: vs.to_vec(), color });
                        }
                    }
                    true
                });
                assert_eq!(
                    Some(&max),
                    candidates.iter().min_by(|a, b| a.vertices.cmp(&b.vertices).then(a.color.cmp(&b.color)))
                );
            }
        }
    }

    #[test]
    fn two_mono_on_constant_and_two_color_colorings() {
        let c = Coloring::constant(2, 5, 4, 3).unwrap();
        assert_eq!(find_2mono(&c, 3), Some((vec![0, 1, 2], (0, 3))));
        let c = Coloring::constant(2, 5, 4, 1).unwrap();
        assert_eq!(find_2mono(&c, 2), Some((vec![0, 1], (1, 2))));
        let two = Coloring::from_fn(2, 6, 4, |s| if (s[0] + s[1]) % 2 == 0 { 1 } else { 3 }).unwrap();
        assert_eq!(find_2mono(&two, 6), Some(((0..6).collect(), (1, 3))));
    }

    #[test]
    fn two_mono_absence_matches_subset_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let f = Coloring::random(2, 6, 4, &mut rng).unwrap();
            for s in 2..=6 {
                let all: Vec<usize> = (0..6).collect();
                let mut brute: Option<Vec<usize>> = None;
                for_each_subset(&all, s, |vs| {
                    let mut used = Vec::new();
                    for (i, &u) in vs.iter().enumerate() {
                        for &v in &vs[i + 1..] {
                            let col = f.pair(u, v);
                            if !used.contains(&col) {
                                used.push(col);
                            }
                        }
                    }
                    if used.len() <= 2 {
                        brute = Some(vs.to_vec());
                        return false;
                    }
                    true
                });
                assert_eq!(find_2mono(&f, s).map(|(set, _)| set), brute);
            }
        }
    }

    #[test]
    fn oracle_on_small_vertex_sets() {
        let five = ramsey_oracle(5, 2, 3, 1).unwrap();
        assert_eq!(five.colorings, 1024);
        assert!(five.without_homogeneous > 0);
        let witness = five.first_counterexample.unwrap();
        assert!(brute_homogeneous(&witness, 3).is_empty());
        let four = ramsey_oracle(4, 2, 3, 2).unwrap();
        assert_eq!(four.colorings, 64);
    }
}
