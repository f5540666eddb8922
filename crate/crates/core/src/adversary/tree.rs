use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

type Membership = dyn Fn(&[u8]) -> bool + Send + Sync;

/// A membership test given as code.
#[derive(Clone)]
pub struct ProgramTree {
    pub name: String,
    pub depth: usize,
    member: Arc<Membership>,
}

impl fmt::Debug for ProgramTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProgramTree").field("name", &self.name).field("depth", &self.depth).finish()
    }
}

/// A set of 0/1 words, determined up to a depth bound.
///
/// Words longer than the depth are members exactly when their depth-length
/// prefix is, so every tree extends freely past its declared depth.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tree {
    Explicit {
        depth: usize,
        words: BTreeSet<Vec<u8>>,
    },
    /// Words that agree with `secret` wherever both are defined.
    Secret {
        secret: Vec<u8>,
        depth: usize,
    },
    #[serde(skip)]
    Program(ProgramTree),
}

/// Read a word of naturals as bits: zero stays zero, anything else is one.
pub fn collapse(u: &[u64]) -> Vec<u8> {
    u.iter().map(|&v| u8::from(v != 0)).collect()
}

impl Tree {
    pub fn full(depth: usize) -> Tree {
        Tree::Secret { secret: Vec::new(), depth }
    }

    pub fn explicit(depth: usize, words: impl IntoIterator<Item = Vec<u8>>) -> Tree {
        Tree::Explicit { depth, words: words.into_iter().collect() }
    }

    /// All prefixes of `0^depth`.
    pub fn zeros_spine(depth: usize) -> Tree {
        Tree::explicit(depth, (0..=depth).map(|l| vec![0; l]))
    }

    pub fn program(
        name: impl Into<String>,
        depth: usize,
        member: impl Fn(&[u8]) -> bool + Send + Sync + 'static,
    ) -> Tree {
        Tree::Program(ProgramTree { name: name.into(), depth, member: Arc::new(member) })
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Explicit { depth, .. } | Tree::Secret { depth, .. } => *depth,
            Tree::Program(p) => p.depth,
        }
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        let word = &word[..word.len().min(self.depth())];
        match self {
            Tree::Explicit { words, .. } => words.contains(word),
            Tree::Secret { secret, .. } => word.iter().zip(secret).all(|(a, b)| a == b),
            Tree::Program(p) => (p.member)(word),
        }
    }

    /// Membership of `u` read through [`collapse`].
    pub fn contains_collapsed(&self, u: &[u64]) -> bool {
        self.contains(&collapse(u))
    }

    /// Number of member words of length exactly `len`, by enumeration.
    pub fn count_at(&self, len: usize) -> u64 {
        let mut word = vec![0u8; len];
        let mut count = 0;
        for bits in 0..1u64 << len {
            for (i, slot) in word.iter_mut().enumerate() {
                *slot = ((bits >> (len - 1 - i)) & 1) as u8;
            }
            count += u64::from(self.contains(&word));
        }
        count
    }
}

/// Every prefix of a member is a member, for words of length at most
/// `depth`.
///
/// Explicit trees are checked word by word. Other trees are checked
/// exhaustively up to length 20 and on 4096 seeded random words per length
/// beyond that.
pub fn check_downward_closed(tree: &Tree, depth: usize) -> bool {
    if let Tree::Explicit { words, .. } = tree {
        return words.iter().filter(|w| w.len() <= depth).all(|w| (0..w.len()).all(|l| tree.contains(&w[..l])));
    }
    let parent_ok = |w: &[u8]| !tree.contains(w) || tree.contains(&w[..w.len() - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7EE5);
    for len in 1..=depth {
        if len <= 20 {
            let mut word = vec![0u8; len];
            for bits in 0..1u64 << len {
                for (i, slot) in word.iter_mut().enumerate() {
                    *slot = ((bits >> (len - 1 - i)) & 1) as u8;
                }
                if !parent_ok(&word) {
                    return false;
                }
            }
        } else {
            for _ in 0..4096 {
                let word: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
                if !parent_ok(&word) {
                    return false;
                }
            }
        }
    }
    true
}

/// The tree whose paths through depth `depth` are exactly the extensions
/// of `secret`.
///
/// Panics if `secret` is longer than `depth` or is not a 0/1 word.
pub fn secret_prefix_tree(secret: &[u8], depth: usize) -> Tree {
    assert!(secret.len() <= depth, "secret of length {} exceeds depth {depth}", secret.len());
    assert!(secret.iter().all(|&b| b < 2), "secret must be a 0/1 word");
    Tree::Secret { secret: secret.to_vec(), depth }
}
