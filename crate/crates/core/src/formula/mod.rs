//! A small two-sorted first-order language: numbers (sort `0`) and
//! number-theoretic functions (sort `1`).
//!
//! Formulas are parsed from the concrete syntax in [`parse`], printed back
//! with [`std::fmt::Display`], and classified purely syntactically:
//! [`is_exists_free`], [`is_gamma1`] and [`problem_shape`].
//!
//! Negation is sugar. `!A` parses to `A -> bot` and there is no negation
//! node in the tree.

mod classify;
mod library;
mod parse;
mod print;
mod shape;

use std::collections::BTreeSet;
use std::fmt;

pub use classify::{is_exists_free, is_gamma1, matrix};
pub use library::{ramsey_pairs, ramsey_pairs_text, trivial_problem_formula};
pub use parse::{parse, parse_with_free, ParseError, ParseErrorKind};
pub use shape::{problem_shape, reduction_predicate, ProblemShape, ShapeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// Type 0: natural numbers.
    Number,
    /// Type 1: functions from numbers to numbers.
    Function,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Number => f.write_str("0"),
            Sort::Function => f.write_str("1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Num(u64),
    /// Application of a function symbol or of a bound type-1 variable.
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prime(String, Vec<Term>),
    Bot,
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Num(_) => {}
            Term::App(name, args) => {
                out.insert(name.clone());
                for a in args {
                    a.collect_names(out);
                }
            }
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Var(_) | Term::Num(_) => self.clone(),
            Term::App(name, args) => {
                let name = if name == from { to.to_string() } else { name.clone() };
                Term::App(name, args.iter().map(|a| a.rename(from, to)).collect())
            }
        }
    }
}

impl Formula {
    pub fn prime(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Prime(name.into(), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    /// The formula `0 = 0`, used as the always-true predicate.
    pub fn truth() -> Formula {
        Formula::Eq(Term::Num(0), Term::Num(0))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `¬a`, i.e. `a -> bot`.
    pub fn negate(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bot)
    }

    pub fn forall(var: impl Into<String>, sort: Sort, body: Formula) -> Formula {
        Formula::Forall(var.into(), sort, Box::new(body))
    }

    pub fn exists(var: impl Into<String>, sort: Sort, body: Formula) -> Formula {
        Formula::Exists(var.into(), sort, Box::new(body))
    }

    /// Number of nodes on the longest root-to-leaf path. Atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Prime(..) | Formula::Bot | Formula::Eq(..) => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, _, a) | Formula::Exists(_, _, a) => 1 + a.depth(),
        }
    }

    /// Every identifier occurring in the formula, bound or free, including
    /// function and predicate symbols.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prime(name, args) => {
                out.insert(name.clone());
                for a in args {
                    a.collect_names(out);
                }
            }
            Formula::Bot => {}
            Formula::Eq(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Forall(v, _, a) | Formula::Exists(v, _, a) => {
                out.insert(v.clone());
                a.collect_names(out);
            }
        }
    }

    /// Identifiers with a free occurrence. Uninterpreted function symbols
    /// count as free names: at the syntax level they are indistinguishable
    /// from free type-1 variables.
    pub fn free_names(&self) -> BTreeSet<String> {
        match self {
            Formula::Prime(_, args) => {
                let mut out = BTreeSet::new();
                for a in args {
                    a.collect_names(&mut out);
                }
                out
            }
            Formula::Bot => BTreeSet::new(),
            Formula::Eq(a, b) => {
                let mut out = BTreeSet::new();
                a.collect_names(&mut out);
                b.collect_names(&mut out);
                out
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let mut out = a.free_names();
                out.extend(b.free_names());
                out
            }
            Formula::Forall(v, _, a) | Formula::Exists(v, _, a) => {
                let mut out = a.free_names();
                out.remove(v);
                out
            }
        }
    }

    pub fn bound_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prime(..) | Formula::Bot | Formula::Eq(..) => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_bound(out);
                b.collect_bound(out);
            }
            Formula::Forall(v, _, a) | Formula::Exists(v, _, a) => {
                out.insert(v.clone());
                a.collect_bound(out);
            }
        }
    }

    /// Replace free occurrences of `from` by `to`. The caller guarantees
    /// that `to` is not bound anywhere in `self`.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Prime(name, args) => {
                Formula::Prime(name.clone(), args.iter().map(|a| a.rename(from, to)).collect())
            }
            Formula::Bot => Formula::Bot,
            Formula::Eq(a, b) => Formula::Eq(a.rename(from, to), b.rename(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => Formula::implies(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Forall(v, s, a) if v != from => Formula::forall(v.clone(), *s, a.rename_free(from, to)),
            Formula::Exists(v, s, a) if v != from => Formula::exists(v.clone(), *s, a.rename_free(from, to)),
            Formula::Forall(..) | Formula::Exists(..) => self.clone(),
        }
    }

    /// Rename every bound variable that appears in `avoid`, choosing fresh
    /// names that clash with nothing in `avoid` or in `self`.
    pub fn rename_bound_apart(&self, avoid: &BTreeSet<String>) -> Formula {
        let mut taken: BTreeSet<String> = avoid.clone();
        taken.extend(self.names());
        self.rename_bound_inner(avoid, &mut taken)
    }

    fn rename_bound_inner(&self, avoid: &BTreeSet<String>, taken: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Prime(..) | Formula::Bot | Formula::Eq(..) => self.clone(),
            Formula::And(a, b) => Formula::and(a.rename_bound_inner(avoid, taken), b.rename_bound_inner(avoid, taken)),
            Formula::Or(a, b) => Formula::or(a.rename_bound_inner(avoid, taken), b.rename_bound_inner(avoid, taken)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_bound_inner(avoid, taken), b.rename_bound_inner(avoid, taken))
            }
            Formula::Forall(v, s, a) | Formula::Exists(v, s, a) => {
                let (v, body) = if avoid.contains(v) {
                    let fresh = fresh_name(v, taken);
                    taken.insert(fresh.clone());
                    let body = a.rename_free(v, &fresh);
                    (fresh, body)
                } else {
                    (v.clone(), (**a).clone())
                };
                let body = body.rename_bound_inner(avoid, taken);
                match self {
                    Formula::Forall(..) => Formula::forall(v, *s, body),
                    _ => Formula::exists(v, *s, body),
                }
            }
        }
    }
}

/// `base_1`, `base_2`, ... : the first one not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|candidate| !taken.contains(candidate)).expect("unbounded name supply")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_names_respect_binders() {
        let f = parse("forall u:1 . (0 = 0 -> exists v:1 . P(u, v))").unwrap();
        assert!(f.free_names().is_empty());
        let g = parse_with_free("P(u, w)", &[("u", Sort::Function), ("w", Sort::Number)]).unwrap();
        assert_eq!(g.free_names().into_iter().collect::<Vec<_>>(), vec!["u", "w"]);
    }

    #[test]
    fn renaming_bound_variables_apart() {
        let f = parse_with_free("forall x:0 . x = y", &[("y", Sort::Number)]).unwrap();
        let avoid: BTreeSet<String> = ["x".to_string()].into();
        let g = f.rename_bound_apart(&avoid);
        assert_eq!(g.to_string(), "forall x_1:0 . x_1 = y");
    }
}
