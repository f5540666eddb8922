use std::fmt;
use std::ops::Deref;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A finite word of natural numbers: position `i` holds `u(i)`.
///
/// Finite truncation of a type-1 object. Serializes as a JSON array.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Encoded(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("tuple header missing or truncated (word length {0})")]
    TruncatedHeader(usize),
    #[error("tuple lengths sum to {declared} but {available} values follow the header")]
    LengthMismatch { declared: u64, available: usize },
}

impl Encoded {
    pub fn new(values: Vec<u64>) -> Encoded {
        Encoded(values)
    }

    pub fn zeros(len: usize) -> Encoded {
        Encoded(vec![0; len])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    /// Pack several words into one: `[k, len_1, ..., len_k, w_1..., w_k...]`.
    pub fn tuple(parts: &[&Encoded]) -> Encoded {
        let mut out = Vec::with_capacity(1 + parts.len() + parts.iter().map(|p| p.len()).sum::<usize>());
        out.push(parts.len() as u64);
        out.extend(parts.iter().map(|p| p.len() as u64));
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Encoded(out)
    }

    pub fn pair(a: &Encoded, b: &Encoded) -> Encoded {
        Encoded::tuple(&[a, b])
    }

    pub fn untuple(&self) -> Result<Vec<Encoded>, DecodeError> {
        let n = *self.0.first().ok_or(DecodeError::TruncatedHeader(0))? as usize;
        if self.0.len() < 1 + n {
            return Err(DecodeError::TruncatedHeader(self.0.len()));
        }
        let lens = &self.0[1..1 + n];
        let body = &self.0[1 + n..];
        let declared: u64 = lens.iter().sum();
        if declared != body.len() as u64 {
            return Err(DecodeError::LengthMismatch { declared, available: body.len() });
        }
        let mut at = 0;
        Ok(lens
            .iter()
            .map(|&l| {
                let part = Encoded(body[at..at + l as usize].to_vec());
                at += l as usize;
                part
            })
            .collect())
    }

    pub fn unpair(&self) -> Result<(Encoded, Encoded), DecodeError> {
        let mut parts = self.untuple()?;
        if parts.len() != 2 {
            return Err(DecodeError::TruncatedHeader(self.0.len()));
        }
        let b = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        Ok((a, b))
    }
}

impl Deref for Encoded {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for Encoded {
    fn from(v: Vec<u64>) -> Self {
        Encoded(v)
    }
}

impl fmt::Display for Encoded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All words of a fixed length with every value below `bound`, in
/// lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpace {
    pub len: usize,
    pub bound: u64,
}

impl WordSpace {
    pub fn new(len: usize, bound: u64) -> WordSpace {
        WordSpace { len, bound }
    }

    /// `bound^len`, or `None` on overflow.
    pub fn count(&self) -> Option<u128> {
        (self.bound as u128).checked_pow(u32::try_from(self.len).ok()?)
    }

    pub fn contains(&self, w: &[u64]) -> bool {
        w.len() == self.len && w.iter().all(|&v| v < self.bound)
    }

    /// The `index`-th word in lexicographic order.
    pub fn nth(&self, mut index: u128) -> Option<Encoded> {
        if index >= self.count()? {
            return None;
        }
        let mut out = vec![0; self.len];
        for slot in out.iter_mut().rev() {
            *slot = (index % self.bound as u128) as u64;
            index /= self.bound as u128;
        }
        Some(Encoded(out))
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Encoded {
        Encoded((0..self.len).map(|_| rng.gen_range(0..self.bound.max(1))).collect())
    }

    pub fn iter(&self) -> WordIter {
        let empty = self.len > 0 && self.bound == 0;
        WordIter { space: *self, next: if empty { None } else { Some(vec![0; self.len]) } }
    }
}

pub struct WordIter {
    space: WordSpace,
    next: Option<Vec<u64>>,
}

impl Iterator for WordIter {
    type Item = Encoded;

    fn next(&mut self) -> Option<Encoded> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for slot in succ.iter_mut().rev() {
            if *slot + 1 < self.space.bound {
                *slot += 1;
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Encoded(current))
    }
}
