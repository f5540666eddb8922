use rand::{Rng, RngCore};

use super::{EvalError, Oracle, TrackedFunctional};
use crate::problems::Encoded;

/// A small expression language over oracle reads. Arithmetic wraps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(u64),
    /// `u_tape(pos mod modulus)`.
    Read {
        tape: usize,
        pos: Box<Expr>,
        modulus: u64,
    },
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Mod(Box<Expr>, u64),
    /// `then` when the condition is zero, `otherwise` when it is not.
    IfZero {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// Least `i < limit` with `u_tape(i) != 0`, or `limit`.
    FirstNonzero {
        tape: usize,
        limit: u64,
    },
}

impl Expr {
    pub fn eval(&self, o: &Oracle<'_>) -> Result<u64, EvalError> {
        o.tick()?;
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Read { tape, pos, modulus } => {
                if *modulus == 0 {
                    return Err(EvalError::Failed("read modulus is zero".into()));
                }
                let p = pos.eval(o)? % modulus;
                o.query(*tape, p as usize)
            }
            Expr::Add(a, b) => Ok(a.eval(o)?.wrapping_add(b.eval(o)?)),
            Expr::Mul(a, b) => Ok(a.eval(o)?.wrapping_mul(b.eval(o)?)),
            Expr::Mod(a, m) => {
                if *m == 0 {
                    return Err(EvalError::Failed("modulus is zero".into()));
                }
                Ok(a.eval(o)? % m)
            }
            Expr::IfZero { cond, then, otherwise } => {
                if cond.eval(o)? == 0 {
                    then.eval(o)
                } else {
                    otherwise.eval(o)
                }
            }
            Expr::FirstNonzero { tape, limit } => {
                for i in 0..*limit {
                    if o.query(*tape, i as usize)? != 0 {
                        return Ok(i);
                    }
                }
                Ok(*limit)
            }
        }
    }

    /// A random expression of at most `depth` levels whose reads stay below
    /// `input_len` on each of `arity` inputs.
    pub fn random(rng: &mut dyn RngCore, depth: usize, arity: usize, input_len: usize) -> Expr {
        let can_read = arity > 0 && input_len > 0;
        let len = input_len as u64;
        if depth == 0 || rng.gen_range(0..7) == 0 {
            return if can_read && rng.gen_bool(0.6) {
                Expr::Read {
                    tape: rng.gen_range(0..arity),
                    pos: Box::new(Expr::Const(rng.gen_range(0..len))),
                    modulus: len,
                }
            } else {
                Expr::Const(rng.gen_range(0..8))
            };
        }
        let sub = |rng: &mut dyn RngCore| Box::new(Expr::random(rng, depth - 1, arity, input_len));
        match rng.gen_range(0..6) {
            0 if can_read => Expr::Read { tape: rng.gen_range(0..arity), pos: sub(rng), modulus: len },
            1 => Expr::Mul(sub(rng), sub(rng)),
            2 => Expr::Mod(sub(rng), rng.gen_range(1..6)),
            3 => Expr::IfZero { cond: sub(rng), then: sub(rng), otherwise: sub(rng) },
            4 if can_read => Expr::FirstNonzero { tape: rng.gen_range(0..arity), limit: rng.gen_range(0..=len) },
            _ => Expr::Add(sub(rng), sub(rng)),
        }
    }
}

impl TrackedFunctional {
    /// Output position `i` is the value of `exprs[i]`.
    pub fn from_exprs(name: impl Into<String>, arity: usize, exprs: Vec<Expr>) -> TrackedFunctional {
        TrackedFunctional::new(name, arity, move |o| {
            exprs.iter().map(|e| e.eval(o)).collect::<Result<Vec<_>, _>>().map(Encoded)
        })
    }
}

/// A functional with `outputs` random expressions of the given depth.
pub fn random_functional(
    rng: &mut dyn RngCore,
    arity: usize,
    input_len: usize,
    outputs: usize,
    depth: usize,
) -> TrackedFunctional {
    let exprs = (0..outputs).map(|_| Expr::random(rng, depth, arity, input_len)).collect();
    TrackedFunctional::from_exprs("random", arity, exprs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::evaluate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn read(pos: u64) -> Box<Expr> {
        Box::new(Expr::Read { tape: 0, pos: Box::new(Expr::Const(pos)), modulus: 100 })
    }

    #[test]
    fn expressions_evaluate_and_record_reads() {
        let f = TrackedFunctional::from_exprs(
            "sample",
            1,
            vec![
                Expr::Add(read(1), read(3)),
                Expr::IfZero { cond: read(0), then: Box::new(Expr::Const(7)), otherwise: read(2) },
                Expr::FirstNonzero { tape: 0, limit: 4 },
            ],
        );
        let e = evaluate(&f, &[&Encoded::new(vec![0, 4, 9, 5])], 1000).unwrap();
        assert_eq!(e.output.as_slice(), &[9, 7, 1]);
        assert_eq!(e.use_record.positions(0), vec![0, 1, 3]);
    }

    #[test]
    fn zero_modulus_is_an_error() {
        let f = TrackedFunctional::from_exprs("bad", 1, vec![Expr::Mod(Box::new(Expr::Const(3)), 0)]);
        assert!(matches!(evaluate(&f, &[&Encoded::new(vec![])], 10), Err(EvalError::Failed(_))));
    }

    #[test]
    fn random_functionals_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = random_functional(&mut rng, 2, 6, 3, 4);
            let u = Encoded::new(vec![1, 0, 2, 0, 3, 0]);
            let v = Encoded::new(vec![0, 0, 5, 5, 0, 1]);
            evaluate(&f, &[&u, &v], 100_000).unwrap();
        }
    }
}
