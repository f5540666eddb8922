// Ready-made statements used by the tests, the CLI and the examples in the
// README.

use super::{parse, Formula};

fn ramsey_matrix(colors: u32) -> String {
    format!(
        "forall m:0 . lt(x(m), x(S(m))) & forall i:0 . forall j:0 . \
         (lt(0, i) & lt(i, j) & lt(j, m) -> t{colors}(f(x(i), x(j))) = x(0))"
    )
}

/// Ramsey's theorem for pairs and `colors` colors, as text.
///
/// `x(0)` holds the color and `x(1) < x(2) < ...` enumerate the
/// homogeneous set; `t{colors}` truncates an arbitrary value to a color.
/// With `problem_form` the statement is written
/// `forall f . (0 = 0 -> exists x . ...)`, otherwise in prenex form
/// `forall f . exists x . ...`.
pub fn ramsey_pairs_text(colors: u32, problem_form: bool) -> String {
    let m = ramsey_matrix(colors);
    if problem_form {
        format!("forall f:1 . (0 = 0 -> exists x:1 . {m})")
    } else {
        format!("forall f:1 . exists x:1 . {m}")
    }
}

pub fn ramsey_pairs(colors: u32, problem_form: bool) -> Formula {
    parse(&ramsey_pairs_text(colors, problem_form)).expect("built-in statement parses")
}

/// The problem whose instances and solutions are all constrained by `0 = 0`.
pub fn trivial_problem_formula() -> Formula {
    parse("forall x:1 . (0 = 0 -> exists y:1 . 0 = 0)").expect("built-in statement parses")
}
