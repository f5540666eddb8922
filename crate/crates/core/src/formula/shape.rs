use std::collections::BTreeSet;

use thiserror::Error;

use super::{fresh_name, Formula, Sort};

/// The components of a statement `forall x . (p1(x) -> exists y . p2(x, y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemShape {
    pub instance_var: String,
    pub instance_sort: Sort,
    pub instance_pred: Formula,
    pub solution_var: String,
    pub solution_sort: Sort,
    pub solution_pred: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not of the form `forall x . (p1 -> exists y . p2)`: at {path} expected {expected}, found {found}")]
pub struct ShapeError {
    /// Location of the first deviating node, e.g. `root.body.consequent`.
    pub path: String,
    pub expected: &'static str,
    pub found: String,
}

pub(super) struct ShapeParts<'a> {
    pub instance_var: &'a str,
    pub instance_sort: Sort,
    pub instance_pred: &'a Formula,
    pub solution_var: &'a str,
    pub solution_sort: Sort,
    pub solution_pred: &'a Formula,
}

fn node_kind(f: &Formula) -> String {
    match f {
        Formula::Prime(name, _) => format!("prime `{name}`"),
        Formula::Bot => "bot".into(),
        Formula::Eq(..) => "equation".into(),
        Formula::And(..) => "conjunction".into(),
        Formula::Or(..) => "disjunction".into(),
        Formula::Implies(..) => "implication".into(),
        Formula::Forall(v, ..) => format!("forall {v}"),
        Formula::Exists(v, ..) => format!("exists {v}"),
    }
}

pub(super) fn shape_parts(f: &Formula) -> Result<ShapeParts<'_>, ShapeError> {
    let mismatch = |path: &str, expected, found: &Formula| ShapeError {
        path: path.to_string(),
        expected,
        found: node_kind(found),
    };
    let Formula::Forall(x, xs, body) = f else {
        return Err(mismatch("root", "a universal quantifier", f));
    };
    let Formula::Implies(p1, rest) = &**body else {
        return Err(mismatch("root.body", "an implication", body));
    };
    let Formula::Exists(y, ys, p2) = &**rest else {
        return Err(mismatch("root.body.consequent", "an existential quantifier", rest));
    };
    Ok(ShapeParts {
        instance_var: x,
        instance_sort: *xs,
        instance_pred: p1,
        solution_var: y,
        solution_sort: *ys,
        solution_pred: p2,
    })
}

/// Split a problem statement into its instance and solution predicates.
pub fn problem_shape(f: &Formula) -> Result<ProblemShape, ShapeError> {
    let parts = shape_parts(f)?;
    Ok(ProblemShape {
        instance_var: parts.instance_var.to_string(),
        instance_sort: parts.instance_sort,
        instance_pred: parts.instance_pred.clone(),
        solution_var: parts.solution_var.to_string(),
        solution_sort: parts.solution_sort,
        solution_pred: parts.solution_pred.clone(),
    })
}

impl ProblemShape {
    pub fn reassemble(&self) -> Formula {
        Formula::forall(
            self.instance_var.clone(),
            self.instance_sort,
            Formula::implies(
                self.instance_pred.clone(),
                Formula::exists(self.solution_var.clone(), self.solution_sort, self.solution_pred.clone()),
            ),
        )
    }

    fn names(&self) -> BTreeSet<String> {
        let mut out = self.instance_pred.names();
        out.extend(self.solution_pred.names());
        out.insert(self.instance_var.clone());
        out.insert(self.solution_var.clone());
        out
    }

    /// Rename the instance/solution variables away from `avoid`, and any
    /// bound variable of the predicates that collides with the resulting
    /// free variables or with `avoid`.
    fn renamed_apart(&self, avoid: &BTreeSet<String>) -> ProblemShape {
        let mut taken = avoid.clone();
        taken.extend(self.names());
        let mut shape = self.clone();
        for var in [self.instance_var.clone(), self.solution_var.clone()] {
            if avoid.contains(&var) {
                let fresh = fresh_name(&var, &taken);
                taken.insert(fresh.clone());
                shape = shape.rename_var(&var, &fresh);
            }
        }
        let mut clash = avoid.clone();
        clash.insert(shape.instance_var.clone());
        clash.insert(shape.solution_var.clone());
        shape.instance_pred = shape.instance_pred.rename_bound_apart(&clash);
        shape.solution_pred = shape.solution_pred.rename_bound_apart(&clash);
        shape
    }

    // `to` must be fresh for every name in the shape.
    fn rename_var(&self, from: &str, to: &str) -> ProblemShape {
        let rename = |v: &String| if v == from { to.to_string() } else { v.clone() };
        ProblemShape {
            instance_var: rename(&self.instance_var),
            instance_sort: self.instance_sort,
            instance_pred: self.instance_pred.rename_free(from, to),
            solution_var: rename(&self.solution_var),
            solution_sort: self.solution_sort,
            solution_pred: self.solution_pred.rename_free(from, to),
        }
    }
}

/// `q1(u) -> (p1(x) & (p2(x, y) -> q2(u, v)))` with free variables
/// `x, y` from `p` and `u, v` from `q`.
///
/// Variables of `p` are renamed apart from those of `q` when they clash.
pub fn reduction_predicate(q: &ProblemShape, p: &ProblemShape) -> Formula {
    let q_free: BTreeSet<String> = [q.instance_var.clone(), q.solution_var.clone()].into();
    let mut avoid = q.names();
    avoid.extend(q_free.iter().cloned());
    let p = p.renamed_apart(&avoid);
    let p_free: BTreeSet<String> = [p.instance_var.clone(), p.solution_var.clone()].into();
    let q1 = q.instance_pred.rename_bound_apart(&p_free);
    let q2 = q.solution_pred.rename_bound_apart(&p_free);
    Formula::implies(q1, Formula::and(p.instance_pred, Formula::implies(p.solution_pred, q2)))
}
