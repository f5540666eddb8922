// Printing with the minimum parentheses the parser needs to rebuild the
// same tree. A quantifier is left bare only when nothing follows it.

use std::fmt::{self, Write};

use super::{Formula, Term};

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Num(n) => write!(f, "{n}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_char(')')
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0, true)
    }
}

fn precedence(node: &Formula) -> u8 {
    match node {
        Formula::Implies(_, b) if **b == Formula::Bot => UNARY,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, node: &Formula, min: u8, tail: bool) -> fmt::Result {
    let quantifier = matches!(node, Formula::Forall(..) | Formula::Exists(..));
    if precedence(node) < min || (quantifier && !tail) {
        out.write_char('(')?;
        write_formula(out, node, 0, true)?;
        return out.write_char(')');
    }
    match node {
        Formula::Prime(name, args) => {
            out.write_str(name)?;
            if !args.is_empty() {
                out.write_char('(')?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    write!(out, "{a}")?;
                }
                out.write_char(')')?;
            }
            Ok(())
        }
        Formula::Bot => out.write_str("bot"),
        Formula::Eq(a, b) => write!(out, "{a} = {b}"),
        Formula::Implies(a, b) if **b == Formula::Bot => {
            out.write_char('!')?;
            write_formula(out, a, UNARY, tail)
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, OR, false)?;
            out.write_str(" -> ")?;
            write_formula(out, b, IMPLIES, tail)
        }
        Formula::Or(a, b) => {
            write_formula(out, a, OR, false)?;
            out.write_str(" | ")?;
            write_formula(out, b, AND, tail)
        }
        Formula::And(a, b) => {
            write_formula(out, a, AND, false)?;
            out.write_str(" & ")?;
            write_formula(out, b, UNARY, tail)
        }
        Formula::Forall(v, s, body) => {
            write!(out, "forall {v}:{s} . ")?;
            write_formula(out, body, 0, true)
        }
        Formula::Exists(v, s, body) => {
            write!(out, "exists {v}:{s} . ")?;
            write_formula(out, body, 0, true)
        }
    }
}
