use super::Formula;

/// Built from prime formulas (including `bot`) with only `forall`, `&` and
/// `->`.
pub fn is_exists_free(f: &Formula) -> bool {
    match f {
        Formula::Prime(..) | Formula::Bot | Formula::Eq(..) => true,
        Formula::And(a, b) | Formula::Implies(a, b) => is_exists_free(a) && is_exists_free(b),
        Formula::Forall(_, _, a) => is_exists_free(a),
        Formula::Or(..) | Formula::Exists(..) => false,
    }
}

/// Membership in the class generated by
///
/// * prime formulas;
/// * `&`, `|`, `forall` and `exists` applied to members;
/// * `(exists xs . A) -> B` where `A` is exists-free, `B` is a member and
///   `xs` is a possibly empty block of existentials.
///
/// An antecedent block variable that also occurs free in `B` is rejected.
pub fn is_gamma1(f: &Formula) -> bool {
    match f {
        Formula::Prime(..) | Formula::Bot | Formula::Eq(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_gamma1(a) && is_gamma1(b),
        Formula::Forall(_, _, a) | Formula::Exists(_, _, a) => is_gamma1(a),
        Formula::Implies(a, b) => {
            let mut block = Vec::new();
            let mut body: &Formula = a;
            while let Formula::Exists(v, _, inner) = body {
                block.push(v);
                body = inner;
            }
            if !is_exists_free(body) || !is_gamma1(b) {
                return false;
            }
            let free_in_consequent = b.free_names();
            block.iter().all(|v| !free_in_consequent.contains(*v))
        }
    }
}

/// The part of a statement that follows its leading `forall`/`exists`
/// prefix up to and including the last existential, e.g. the `forall m`
/// part of `forall f . exists x . forall m . ...`.
///
/// Statements in problem form `forall x . (p1 -> exists y . p2)` yield
/// `p2`.
pub fn matrix(f: &Formula) -> &Formula {
    if let Ok(shape) = super::shape::shape_parts(f) {
        return shape.solution_pred;
    }
    let mut cursor = f;
    let mut after_last_exists = f;
    loop {
        match cursor {
            Formula::Forall(_, _, body) => cursor = body,
            Formula::Exists(_, _, body) => {
                cursor = body;
                after_last_exists = body;
            }
            _ => break,
        }
    }
    after_last_exists
}
