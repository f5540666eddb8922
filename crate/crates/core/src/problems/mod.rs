//! Problems as instance/solution relations over finite words.
//!
//! A problem `forall x (p1(x) -> exists y p2(x, y))` is represented by its
//! two predicates together with deterministic, lexicographic enumerators
//! for instances and for the solutions of a given instance. Infinite
//! objects are replaced by words of declared length; every bound is a
//! constructor parameter.

mod counted;
mod encoded;

use rand::RngCore;
use serde_json::{json, Value};
use thiserror::Error;

use crate::adversary::{check_downward_closed, q2_verdict, Tree, Verdict};

pub use counted::{counted, counted_run, CountedSolver, Run};
pub use encoded::{DecodeError, Encoded, WordIter, WordSpace};

pub type WordStream<'a> = Box<dyn Iterator<Item = Encoded> + Send + 'a>;

pub trait Problem: Send + Sync {
    fn name(&self) -> String;

    /// Parameters that, with the name, identify the problem.
    fn params(&self) -> Value;

    /// `p1`.
    fn instance_valid(&self, x: &Encoded) -> bool;

    /// `p2`.
    fn is_solution(&self, x: &Encoded, y: &Encoded) -> bool;

    /// Every instance under the construction parameters, lexicographically.
    fn instances(&self) -> WordStream<'_>;

    /// Size of [`Problem::instances`], when it fits.
    fn instance_count(&self) -> Option<u128>;

    fn sample_instance(&self, rng: &mut dyn RngCore) -> Encoded;

    /// Solutions of `x`, lexicographically.
    fn solutions<'a>(&'a self, x: &'a Encoded) -> WordStream<'a>;

    /// Same name and parameters.
    fn same_as(&self, other: &dyn Problem) -> bool {
        self.name() == other.name() && self.params() == other.params()
    }
}

/// Every word is an instance and every word solves every instance.
#[derive(Clone, Debug)]
pub struct TrivialProblem {
    pub instances: WordSpace,
    pub solutions: WordSpace,
}

pub fn trivial_problem(instances: WordSpace, solutions: WordSpace) -> TrivialProblem {
    TrivialProblem { instances, solutions }
}

impl Problem for TrivialProblem {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn params(&self) -> Value {
        json!({
            "instance_len": self.instances.len,
            "instance_bound": self.instances.bound,
            "solution_len": self.solutions.len,
            "solution_bound": self.solutions.bound,
        })
    }

    fn instance_valid(&self, _x: &Encoded) -> bool {
        true
    }

    fn is_solution(&self, _x: &Encoded, _y: &Encoded) -> bool {
        true
    }

    fn instances(&self) -> WordStream<'_> {
        Box::new(self.instances.iter())
    }

    fn instance_count(&self) -> Option<u128> {
        self.instances.count()
    }

    fn sample_instance(&self, rng: &mut dyn RngCore) -> Encoded {
        self.instances.sample(rng)
    }

    fn solutions<'a>(&'a self, _x: &'a Encoded) -> WordStream<'a> {
        Box::new(self.solutions.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("tree is not downward closed up to depth {0}")]
    NotDownwardClosed(usize),
}

/// Every input has a solution: either `0` followed by a path through the
/// tree, or a positive `e` such that the first `e + 1` entries of the
/// input, read as bits, leave the tree.
///
/// Instances are words of length `depth + 1`. Enumerated solutions are the
/// path claims `[0, b_1, ..., b_depth]` with 0/1 entries followed by the
/// escape claims `[e, 0, ..., 0]`, all of length `depth + 1`.
#[derive(Clone, Debug)]
pub struct PathProblem {
    pub tree: Tree,
    pub depth: usize,
    pub instance_bound: u64,
}

pub fn path_problem(tree: Tree, depth: usize, instance_bound: u64) -> Result<PathProblem, ProblemError> {
    if !check_downward_closed(&tree, depth) {
        return Err(ProblemError::NotDownwardClosed(depth));
    }
    Ok(PathProblem { tree, depth, instance_bound })
}

impl PathProblem {
    fn instance_space(&self) -> WordSpace {
        WordSpace::new(self.depth + 1, self.instance_bound)
    }

    pub fn verdict(&self, u: &Encoded, v: &Encoded) -> Result<Verdict, crate::adversary::VerdictError> {
        q2_verdict(u, v, &self.tree, self.depth)
    }
}

impl Problem for PathProblem {
    fn name(&self) -> String {
        "path".into()
    }

    fn params(&self) -> Value {
        json!({
            "tree": serde_json::to_value(&self.tree).unwrap_or(Value::Null),
            "depth": self.depth,
            "instance_bound": self.instance_bound,
        })
    }

    fn instance_valid(&self, _x: &Encoded) -> bool {
        true
    }

    fn is_solution(&self, x: &Encoded, y: &Encoded) -> bool {
        matches!(self.verdict(x, y), Ok(Verdict::PassPath | Verdict::PassEscape))
    }

    fn instances(&self) -> WordStream<'_> {
        Box::new(self.instance_space().iter())
    }

    fn instance_count(&self) -> Option<u128> {
        self.instance_space().count()
    }

    fn sample_instance(&self, rng: &mut dyn RngCore) -> Encoded {
        self.instance_space().sample(rng)
    }

    fn solutions<'a>(&'a self, x: &'a Encoded) -> WordStream<'a> {
        let d = self.depth;
        let paths = WordSpace::new(d, 2).iter().map(move |tail| {
            let mut v = Vec::with_capacity(d + 1);
            v.push(0);
            v.extend_from_slice(&tail);
            Encoded(v)
        });
        let escapes = (1..=d as u64).map(move |e| {
            let mut v = vec![0; d + 1];
            v[0] = e;
            Encoded(v)
        });
        Box::new(paths.chain(escapes).filter(move |v| self.is_solution(x, v)))
    }
}

/// `1 + m` for the least `m <= depth` such that the first `m + 1` entries
/// of `u`, read as bits, leave the tree. Prefixes longer than `u` are not
/// examined.
pub fn mu_witness(u: &[u64], tree: &Tree, depth: usize) -> Option<u64> {
    (0..=depth).take_while(|&m| m < u.len()).find(|&m| !tree.contains_collapsed(&u[..m + 1])).map(|m| 1 + m as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::secret_prefix_tree;

    #[test]
    fn trivial_problem_accepts_everything() {
        let p = trivial_problem(WordSpace::new(1, 2), WordSpace::new(0, 1));
        assert!(p.instance_valid(&Encoded::new(vec![7, 7, 7])));
        assert!(p.is_solution(&Encoded::new(vec![3]), &Encoded::default()));
        let xs: Vec<_> = p.instances().collect();
        assert_eq!(xs, vec![Encoded::new(vec![0]), Encoded::new(vec![1])]);
        assert_eq!(p.instance_count(), Some(2));
    }

    #[test]
    fn path_problem_on_full_tree() {
        let p = path_problem(Tree::full(4), 4, 2).unwrap();
        let u = Encoded::new(vec![1, 1, 0, 1, 0]);
        assert!(p.is_solution(&u, &Encoded::zeros(5)));
        let mut escape = Encoded::zeros(5);
        escape.0[0] = 3;
        assert!(!p.is_solution(&u, &escape));
        // Every enumerated solution of the full tree is a path claim.
        assert_eq!(p.solutions(&u).count(), 16);
    }

    #[test]
    fn path_problem_escape_from_root_only_tree() {
        let root_only = Tree::explicit(3, [vec![]]);
        let p = path_problem(root_only.clone(), 3, 2).unwrap();
        let u = Encoded::new(vec![1, 1, 1, 1]);
        let v = Encoded::new(vec![1, 0, 0, 0]);
        // Direct membership: <1> and <1,1> are outside the tree.
        assert!(!root_only.contains(&[1]));
        assert!(!root_only.contains(&[1, 1]));
        assert!(p.is_solution(&u, &v));
        // No path claim survives; every escape claim does.
        let sols: Vec<_> = p.solutions(&u).collect();
        assert_eq!(sols.len(), 3);
        assert!(sols.iter().all(|s| s[0] > 0));
    }

    #[test]
    fn path_problem_rejects_open_trees() {
        assert_eq!(
            path_problem(Tree::explicit(2, [vec![0, 1]]), 2, 2).unwrap_err(),
            ProblemError::NotDownwardClosed(2)
        );
    }

    #[test]
    fn escape_beyond_depth_is_not_a_solution() {
        let p = path_problem(secret_prefix_tree(&[1], 3), 3, 2).unwrap();
        let u = Encoded::new(vec![0, 0, 0, 0]);
        assert!(p.verdict(&u, &Encoded::new(vec![4, 0, 0, 0])).is_err());
        assert!(!p.is_solution(&u, &Encoded::new(vec![4, 0, 0, 0])));
    }

    #[test]
    fn mu_witness_examples() {
        let u = [1, 0, 1, 1, 0];
        assert_eq!(mu_witness(&u, &Tree::explicit(4, [vec![]]), 4), Some(1));
        assert_eq!(mu_witness(&u, &Tree::full(4), 4), None);
        assert_eq!(mu_witness(&[0, 0, 1, 0, 0], &Tree::zeros_spine(4), 4), Some(3));
        // Values other than zero read as one.
        assert_eq!(mu_witness(&[0, 0, 9, 0, 0], &Tree::zeros_spine(4), 4), Some(3));
    }

    #[test]
    fn mu_witness_matches_exhaustive_membership() {
        let tree = Tree::zeros_spine(4);
        for u in WordSpace::new(5, 2).iter() {
            // Positions past the depth follow the depth-prefix.
            let brute = (1..=4).find(|&l| u[..l].iter().any(|&b| b != 0));
            assert_eq!(mu_witness(&u, &tree, 4), brute.map(|l| l as u64));
        }
    }
}
