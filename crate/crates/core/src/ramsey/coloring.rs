use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problems::Encoded;

/// Largest supported exponent.
pub const MAX_EXPONENT: usize = 3;
/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamseyError {
    #[error("exponent {0} is outside 1..=3")]
    Exponent(usize),
    #[error("this operation needs exponent {expected}, not {found}")]
    WrongExponent { expected: usize, found: usize },
    #[error("at least one color is needed")]
    NoColors,
    #[error("this operation needs {expected} colors, not {found}")]
    WrongColorCount { expected: u32, found: u32 },
    #[error("{0} vertices exceed the supported {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("table has {found} entries; C(N, n) = {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("table entry {index} is {value}, not below {k}")]
    ColorOutOfRange { index: usize, value: u64, k: u32 },
    #[error("vertex list is not strictly increasing")]
    NotIncreasing,
    #[error("vertex {vertex} is not below {vertices}")]
    VertexOutOfRange { vertex: usize, vertices: usize },
    #[error("color {color} is not below {k}")]
    BadColor { color: u32, k: u32 },
    #[error("vertices {vertices:?} are not homogeneous of color {color}")]
    NotHomogeneous { vertices: Vec<usize>, color: u32 },
    #[error("set of size {size}; at least {needed} needed")]
    TooSmall { size: usize, needed: usize },
    #[error("index {index} into a list of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("malformed coloring word: {0}")]
    Word(String),
}

/// `m` when `m < k`, otherwise `0`.
pub fn truncate_color(m: u64, k: u32) -> u32 {
    if m < u64::from(k) {
        m as u32
    } else {
        0
    }
}

/// `C(n, r)`, or `None` on overflow.
pub fn binomial(n: usize, r: usize) -> Option<usize> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: usize = 1;
    for i in 0..r {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Position of the sorted `subset` in the lexicographic order of
/// `subset.len()`-subsets of `0..vertices`.
pub fn subset_rank(subset: &[usize], vertices: usize) -> usize {
    if let [i, j] = *subset {
        return i * (2 * vertices - i - 1) / 2 + (j - i - 1);
    }
    let r = subset.len();
    let mut rank = 0;
    let mut prev = 0;
    for (t, &c) in subset.iter().enumerate() {
        for v in prev..c {
            rank += binomial(vertices - 1 - v, r - 1 - t).unwrap_or(0);
        }
        prev = c + 1;
    }
    rank
}

/// Advance `combo` to the next `combo.len()`-subset of `0..limit` in
/// lexicographic order. Returns `false` after the last one.
pub(crate) fn next_combination(combo: &mut [usize], limit: usize) -> bool {
    let r = combo.len();
    for i in (0..r).rev() {
        if combo[i] < limit - r + i {
            combo[i] += 1;
            for j in i + 1..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `visit` on every `r`-subset of `items` (as a sorted list of
/// items), in lexicographic order of positions, until it returns `false`.
pub(crate) fn for_each_subset(items: &[usize], r: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if r > items.len() {
        return true;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf = vec![0; r];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = items[i];
        }
        if !visit(&buf) {
            return false;
        }
        if r == 0 || !next_combination(&mut idx, items.len()) {
            return true;
        }
    }
}

/// A coloring of the `n`-element subsets of `0..N` with colors below `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColoringFile")]
pub struct Coloring {
    n: usize,
    #[serde(rename = "N")]
    vertices: usize,
    k: u32,
    table: Vec<u32>,
}

#[derive(Deserialize)]
struct ColoringFile {
    #[serde(default = "default_exponent")]
    n: usize,
    #[serde(rename = "N")]
    vertices: usize,
    k: u32,
    table: Vec<u64>,
}

fn default_exponent() -> usize {
    2
}

impl TryFrom<ColoringFile> for Coloring {
    type Error = RamseyError;

    fn try_from(f: ColoringFile) -> Result<Self, Self::Error> {
        Coloring::new(f.n, f.vertices, f.k, f.table)
    }
}

fn check_shape(n: usize, vertices: usize, k: u32) -> Result<usize, RamseyError> {
    if !(1..=MAX_EXPONENT).contains(&n) {
        return Err(RamseyError::Exponent(n));
    }
    if k == 0 {
        return Err(RamseyError::NoColors);
    }
    if vertices > MAX_VERTICES {
        return Err(RamseyError::TooManyVertices(vertices));
    }
    Ok(binomial(vertices, n).expect("bounded by MAX_VERTICES"))
}

impl Coloring {
    pub fn new(n: usize, vertices: usize, k: u32, table: Vec<u64>) -> Result<Coloring, RamseyError> {
        let expected = check_shape(n, vertices, k)?;
        if table.len() != expected {
            return Err(RamseyError::TableLength { expected, found: table.len() });
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= u64::from(k)) {
            return Err(RamseyError::ColorOutOfRange { index, value, k });
        }
        Ok(Coloring { n, vertices, k, table: table.into_iter().map(|v| v as u32).collect() })
    }

    /// Color each subset by `f`, truncated to `k` colors.
    pub fn from_fn(
        n: usize,
        vertices: usize,
        k: u32,
        mut f: impl FnMut(&[usize]) -> u64,
    ) -> Result<Coloring, RamseyError> {
        let len = check_shape(n, vertices, k)?;
        let mut table = Vec::with_capacity(len);
        let all: Vec<usize> = (0..vertices).collect();
        for_each_subset(&all, n, |s| {
            table.push(truncate_color(f(s), k));
            true
        });
        Ok(Coloring { n, vertices, k, table })
    }

    pub fn constant(n: usize, vertices: usize, k: u32, color: u32) -> Result<Coloring, RamseyError> {
        Coloring::from_fn(n, vertices, k, |_| u64::from(color))
    }

    pub fn random(n: usize, vertices: usize, k: u32, rng: &mut dyn RngCore) -> Result<Coloring, RamseyError> {
        let len = check_shape(n, vertices, k)?;
        Ok(Coloring { n, vertices, k, table: (0..len).map(|_| rng.gen_range(0..k)).collect() })
    }

    pub fn exponent(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn colors(&self) -> u32 {
        self.k
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Color of a sorted `n`-subset.
    pub fn color(&self, subset: &[usize]) -> u32 {
        debug_assert_eq!(subset.len(), self.n);
        self.table[subset_rank(subset, self.vertices)]
    }

    /// Color of the pair `{i, j}`, `i < j`, of a pair coloring.
    pub fn pair(&self, i: usize, j: usize) -> u32 {
        debug_assert!(self.n == 2 && i < j);
        self.table[i * (2 * self.vertices - i - 1) / 2 + (j - i - 1)]
    }

    /// Instance word `[N, table...]`.
    pub fn to_encoded(&self) -> Encoded {
        let mut w = Vec::with_capacity(1 + self.table.len());
        w.push(self.vertices as u64);
        w.extend(self.table.iter().map(|&c| u64::from(c)));
        Encoded(w)
    }

    /// Read an instance word, truncating entries to `k` colors.
    pub fn from_encoded(n: usize, k: u32, word: &[u64]) -> Result<Coloring, RamseyError> {
        let (&head, rest) = word.split_first().ok_or_else(|| RamseyError::Word("empty word".into()))?;
        let vertices = usize::try_from(head)
            .ok()
            .filter(|&v| v <= MAX_VERTICES)
            .ok_or(RamseyError::TooManyVertices(usize::MAX))?;
        let expected = check_shape(n, vertices, k)?;
        if rest.len() != expected {
            return Err(RamseyError::TableLength { expected, found: rest.len() });
        }
        Ok(Coloring { n, vertices, k, table: rest.iter().map(|&v| truncate_color(v, k)).collect() })
    }

    /// Whether every `n`-subset of `vertices` (sorted) has color `color`.
    pub fn is_homogeneous(&self, vertices: &[usize], color: u32) -> bool {
        for_each_subset(vertices, self.n, |s| self.color(s) == color)
    }
}

/// A strictly increasing vertex list on which a coloring is constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomSet {
    pub vertices: Vec<usize>,
    pub color: u32,
}

impl HomSet {
    pub fn new(c: &Coloring, vertices: Vec<usize>, color: u32) -> Result<HomSet, RamseyError> {
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RamseyError::NotIncreasing);
        }
        if let Some(&vertex) = vertices.iter().find(|&&v| v >= c.vertices) {
            return Err(RamseyError::VertexOutOfRange { vertex, vertices: c.vertices });
        }
        if color >= c.k {
            return Err(RamseyError::BadColor { color, k: c.k });
        }
        if !c.is_homogeneous(&vertices, color) {
            return Err(RamseyError::NotHomogeneous { vertices, color });
        }
        Ok(HomSet { vertices, color })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Solution word `[color, v_1, ..., v_s]`.
    pub fn to_encoded(&self) -> Encoded {
        let mut w = Vec::with_capacity(1 + self.vertices.len());
        w.push(u64::from(self.color));
        w.extend(self.vertices.iter().map(|&v| v as u64));
        Encoded(w)
    }

    /// Read a solution word and check it against `c`.
    pub fn from_encoded(c: &Coloring, word: &[u64]) -> Result<HomSet, RamseyError> {
        let (&color, rest) = word.split_first().ok_or_else(|| RamseyError::Word("empty word".into()))?;
        let color = u32::try_from(color).map_err(|_| RamseyError::BadColor { color: u32::MAX, k: c.k })?;
        let vertices = rest
            .iter()
            .map(|&v| {
                usize::try_from(v)
                    .map_err(|_| RamseyError::VertexOutOfRange { vertex: usize::MAX, vertices: c.vertices })
            })
            .collect::<Result<Vec<_>, _>>()?;
        HomSet::new(c, vertices, color)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation() {
        assert_eq!(truncate_color(3, 4), 3);
        assert_eq!(truncate_color(7, 4), 0);
        assert_eq!(truncate_color(0, 1), 0);
    }

    #[test]
    fn subset_ranks_follow_enumeration_order() {
        for n in 1..=3 {
            for vertices in n..=8 {
                let all: Vec<usize> = (0..vertices).collect();
                let mut expected = 0;
                for_each_subset(&all, n, |s| {
                    assert_eq!(subset_rank(s, vertices), expected, "{s:?} of {vertices}");
                    expected += 1;
                    true
                });
                assert_eq!(expected, binomial(vertices, n).unwrap());
            }
        }
    }

    #[test]
    fn shape_is_checked() {
        assert_eq!(Coloring::new(2, 3, 2, vec![0, 1]), Err(RamseyError::TableLength { expected: 3, found: 2 }));
        assert!(matches!(Coloring::new(2, 3, 2, vec![0, 1, 2]), Err(RamseyError::ColorOutOfRange { index: 2, .. })));
        assert_eq!(Coloring::new(4, 5, 2, vec![]), Err(RamseyError::Exponent(4)));
        assert_eq!(Coloring::new(2, 3, 0, vec![]), Err(RamseyError::NoColors));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let c = Coloring::from_fn(2, 4, 4, |s| (s[0] + s[1]) as u64).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"n":2,"N":4,"k":4,"table":[1,2,3,3,0,0]}"#);
        assert_eq!(serde_json::from_str::<Coloring>(&text).unwrap(), c);
        assert!(serde_json::from_str::<Coloring>(r#"{"N":3,"k":2,"table":[0,1,5]}"#).is_err());
        let default_n: Coloring = serde_json::from_str(r#"{"N":3,"k":2,"table":[0,1,1]}"#).unwrap();
        assert_eq!(default_n.exponent(), 2);
    }

    #[test]
    fn encoded_words_truncate() {
        let c = Coloring::from_encoded(2, 4, &[3, 1, 9, 3]).unwrap();
        assert_eq!(c.table(), &[1, 0, 3]);
        assert_eq!(c.to_encoded().as_slice(), &[3, 1, 0, 3]);
        assert!(Coloring::from_encoded(2, 4, &[3, 1]).is_err());
    }

    #[test]
    fn homsets_are_checked_on_construction() {
        let c = Coloring::from_fn(2, 5, 2, |s| u64::from(s[0] % 2 == 0 && s[1] % 2 == 0)).unwrap();
        assert!(HomSet::new(&c, vec![0, 2, 4], 1).is_ok());
        assert!(matches!(HomSet::new(&c, vec![0, 1, 2], 1), Err(RamseyError::NotHomogeneous { .. })));
        assert_eq!(HomSet::new(&c, vec![2, 0], 1), Err(RamseyError::NotIncreasing));
        assert!(matches!(HomSet::new(&c, vec![0, 5], 1), Err(RamseyError::VertexOutOfRange { .. })));
        let h = HomSet::new(&c, vec![1, 3], 0).unwrap();
        assert_eq!(HomSet::from_encoded(&c, &h.to_encoded()).unwrap(), h);
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"{"vertices":[1,3],"color":0}"#);
    }

    #[test]
    fn homogeneity_is_closed_under_subsets() {
        let c = Coloring::from_fn(3, 7, 2, |s| u64::from(s.iter().sum::<usize>() % 3 == 0)).unwrap();
        let all: Vec<usize> = (0..7).collect();
        for size in 3..=7 {
            for_each_subset(&all, size, |vs| {
                for color in 0..2 {
                    if c.is_homogeneous(vs, color) {
                        for_each_subset(vs, 3.max(size - 1), |sub| {
                            assert!(c.is_homogeneous(sub, color));
                            true
                        });
                    }
                }
                true
            });
        }
    }
}
