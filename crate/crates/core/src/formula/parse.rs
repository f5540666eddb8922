// Recursive-descent parser for the formula syntax.
//
//   formula := quant | implies
//   quant   := ("forall" | "exists") ident ":" sort "." formula
//   implies := or ("->" formula)?
//   or      := and ("|" unary)*
//   and     := unary ("&" unary)*
//   unary   := "!" unary | quant | "(" formula ")" | "bot" | atom
//   atom    := term "=" term | ident | ident "(" terms ")"
//   term    := number | ident | ident "(" terms ")"
//
// A quantifier body extends as far to the right as possible, wherever the
// quantifier occurs.

use std::fmt;

use thiserror::Error;

use super::{Formula, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("variable `{0}` is already bound on this path")]
    Rebound(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Amp,
    Pipe,
    Arrow,
    Bang,
    Equals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn syntax(pos: usize, expected: impl Into<String>, found: &Tok) -> ParseError {
    ParseError { pos, kind: ParseErrorKind::Syntax { expected: expected.into(), found: found.to_string() } }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b':' => Tok::Colon,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'!' => Tok::Bang,
            b'=' => Tok::Equals,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let n = digits.parse().map_err(|_| ParseError {
                    pos: start,
                    kind: ParseErrorKind::Syntax {
                        expected: "a numeral that fits in 64 bits".into(),
                        found: format!("`{digits}`"),
                    },
                })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || matches!(bytes[i + 1], b'_' | b'\''))
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    pos: start,
                    kind: ParseErrorKind::Syntax { expected: "a token".into(), found: format!("`{ch}`") },
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "bot")
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    scope: Vec<(String, Sort)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), want.to_string(), self.peek()))
        }
    }

    fn lookup(&self, name: &str) -> Option<Sort> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(kw) = self.peek() {
            if kw == "forall" || kw == "exists" {
                return self.quantifier();
            }
        }
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = matches!(self.bump(), Tok::Ident(ref kw) if kw == "forall");
        let var_pos = self.pos();
        let var = match self.bump() {
            Tok::Ident(v) if !is_keyword(&v) => v,
            other => return Err(syntax(var_pos, "a variable name", &other)),
        };
        if self.lookup(&var).is_some() {
            return Err(ParseError { pos: var_pos, kind: ParseErrorKind::Rebound(var) });
        }
        self.expect(Tok::Colon)?;
        let sort_pos = self.pos();
        let sort = match self.bump() {
            Tok::Num(0) => Sort::Number,
            Tok::Num(1) => Sort::Function,
            other => return Err(syntax(sort_pos, "sort `0` or `1`", &other)),
        };
        self.expect(Tok::Dot)?;
        self.scope.push((var.clone(), sort));
        let body = self.formula();
        self.scope.pop();
        let body = body?;
        Ok(if universal { Formula::forall(var, sort, body) } else { Formula::exists(var, sort, body) })
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::negate(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => self.quantifier(),
            Tok::Ident(kw) if kw == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        // A bare predicate symbol, or one applied to arguments, that is not
        // followed by `=`.
        if let Tok::Ident(name) = self.peek().clone() {
            if self.lookup(&name).is_none() && !is_keyword(&name) {
                let save = self.at;
                self.bump();
                let args = if *self.peek() == Tok::LParen { Some(self.args()?) } else { None };
                if *self.peek() != Tok::Equals {
                    return Ok(Formula::Prime(name, args.unwrap_or_default()));
                }
                self.at = save;
            }
        }
        let (lhs, lsort) = self.term()?;
        let eq_pos = self.pos();
        if *self.peek() != Tok::Equals {
            return Err(syntax(eq_pos, "`=`", self.peek()));
        }
        self.bump();
        let (rhs, rsort) = self.term()?;
        if lsort != rsort {
            return Err(ParseError {
                pos: start,
                kind: ParseErrorKind::SortMismatch(format!("equation between sort {lsort} and sort {rsort}")),
            });
        }
        Ok(Formula::Eq(lhs, rhs))
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        Ok(self.args_sorted()?.into_iter().map(|(t, _)| t).collect())
    }

    fn term(&mut self) -> Result<(Term, Sort), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok((Term::Num(n), Sort::Number)),
            Tok::Ident(name) if !is_keyword(&name) => {
                let bound = self.lookup(&name);
                if *self.peek() == Tok::LParen {
                    let arg_pos = self.pos();
                    let args = self.args_sorted()?;
                    if let Some(sort) = bound {
                        if sort != Sort::Function {
                            return Err(ParseError {
                                pos,
                                kind: ParseErrorKind::SortMismatch(format!(
                                    "number variable `{name}` applied to arguments"
                                )),
                            });
                        }
                        if let Some((_, s)) = args.iter().find(|(_, s)| *s != Sort::Number) {
                            return Err(ParseError {
                                pos: arg_pos,
                                kind: ParseErrorKind::SortMismatch(format!(
                                    "argument of `{name}` has sort {s}, expected 0"
                                )),
                            });
                        }
                    }
                    let args = args.into_iter().map(|(t, _)| t).collect();
                    Ok((Term::App(name, args), Sort::Number))
                } else {
                    match bound {
                        Some(sort) => Ok((Term::Var(name), sort)),
                        None => Err(ParseError { pos, kind: ParseErrorKind::Unbound(name) }),
                    }
                }
            }
            other => Err(syntax(pos, "a term", &other)),
        }
    }

    fn args_sorted(&mut self) -> Result<Vec<(Term, Sort)>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                other => return Err(syntax(self.pos(), "`,` or `)`", other)),
            }
        }
    }
}

/// Parse a closed formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with_free(text, &[])
}

/// Parse a formula whose free variables are declared up front.
pub fn parse_with_free(text: &str, free: &[(&str, Sort)]) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, scope: free.iter().map(|(n, s)| (n.to_string(), *s)).collect() };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.pos(), "end of input", p.peek()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_equation() {
        assert_eq!(parse("0=0").unwrap(), Formula::truth());
    }

    #[test]
    fn negation_is_implication_to_bot() {
        assert_eq!(parse("!0=0").unwrap(), Formula::implies(Formula::truth(), Formula::Bot));
        assert_eq!(parse("!(0=0)").unwrap(), parse("0=0 -> bot").unwrap());
    }

    #[test]
    fn quantified_problem_formula() {
        let f = parse("forall u:1 . (0=0 -> exists v:1 . P(u,v))").unwrap();
        let expected = Formula::forall(
            "u",
            Sort::Function,
            Formula::implies(
                Formula::truth(),
                Formula::exists("v", Sort::Function, Formula::prime("P", vec![Term::var("u"), Term::var("v")])),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("A & B | C -> D -> E").unwrap();
        let a = || Formula::prime("A", vec![]);
        let b = || Formula::prime("B", vec![]);
        let c = || Formula::prime("C", vec![]);
        let d = || Formula::prime("D", vec![]);
        let e = || Formula::prime("E", vec![]);
        assert_eq!(f, Formula::implies(Formula::or(Formula::and(a(), b()), c()), Formula::implies(d(), e())));
        assert_eq!(parse("A & B & C").unwrap(), Formula::and(Formula::and(a(), b()), c()));
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse("A & forall x:0 . x = 0 | B").unwrap();
        match f {
            Formula::And(_, rhs) => {
                assert!(matches!(*rhs, Formula::Forall(_, _, ref b) if matches!(**b, Formula::Or(..))))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbound_variable_is_reported() {
        let err = parse("x = 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Unbound("x".into()));
        assert_eq!(err.pos, 0);
    }

    #[test]
    fn rebinding_is_rejected() {
        let err = parse("forall x:0 . exists x:0 . x = 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Rebound("x".into()));
        // Sibling scopes may reuse a name.
        assert!(parse("(forall x:0 . x = 0) & forall x:0 . x = 1").is_ok());
    }

    #[test]
    fn sort_mismatches() {
        let err = parse("forall m:0 . m(0) = 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::SortMismatch(_)));
        let err = parse("forall f:1 . f = 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::SortMismatch(_)));
        let err = parse("forall f:1 . forall g:1 . f(g) = 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::SortMismatch(_)));
        // Uninterpreted symbols accept arguments of any sort.
        assert!(parse("forall f:1 . h(f) = 0").is_ok());
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse("0 = 0 &").unwrap_err();
        assert_eq!(err.pos, 7);
        assert!(matches!(err.kind, ParseErrorKind::Syntax { .. }));
        let err = parse("forall x:2 . x = 0").unwrap_err();
        assert_eq!(err.pos, 9);
        let err = parse("0 = 0 $").unwrap_err();
        assert_eq!(err.pos, 6);
    }
}
