//! Exact rational evaluation of term functions over the real l-group, its
//! pointed expansion, and the standard MV-algebra (with and without the
//! constant 1/2), plus satisfaction of open formulas.

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::formula::{Atom, BinOp, Constant, OpenFormula, Rel, Signature, Term, UnaryOp};
use crate::rat::{format_rat, is_in_unit_interval, parse_rat, rat, Rational};

/// Map from variable names to exact rationals.
pub type Assignment = BTreeMap<String, Rational>;

/// The structure a term is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    /// The additive real l-group (language Ab).
    R,
    /// The pointed real l-group with distinguished -1 (language pAb).
    Rminus1,
    /// The standard MV-algebra on [0,1] (language MV).
    StdMv,
    /// The standard MV-algebra expanded with 1/2 (language MV[1/2]).
    StdMvHalf,
}

impl Algebra {
    pub fn signature(self) -> Signature {
        match self {
            Algebra::R => Signature::Ab,
            Algebra::Rminus1 => Signature::PAb,
            Algebra::StdMv => Signature::Mv,
            Algebra::StdMvHalf => Signature::MvHalf,
        }
    }

    pub fn for_signature(sig: Signature) -> Algebra {
        match sig {
            Signature::Ab => Algebra::R,
            Signature::PAb => Algebra::Rminus1,
            Signature::Mv => Algebra::StdMv,
            Signature::MvHalf => Algebra::StdMvHalf,
        }
    }

    pub fn is_mv(self) -> bool {
        matches!(self, Algebra::StdMv | Algebra::StdMvHalf)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable `{0}` is unassigned")]
    Unassigned(String),
    #[error("value {1} for variable `{0}` lies outside [0,1]")]
    OutOfRange(String, String),
    #[error("operator `{op}` does not belong to the language of the algebra")]
    SignatureMismatch { op: String },
}

fn lookup(v: &Assignment, name: &str, mv: bool) -> Result<Rational, EvalError> {
    let val = v
        .get(name)
        .cloned()
        .ok_or_else(|| EvalError::Unassigned(name.to_string()))?;
    if mv && !is_in_unit_interval(&val) {
        return Err(EvalError::OutOfRange(name.to_string(), format_rat(&val)));
    }
    Ok(val)
}

/// Truncated MV addition: min(1, a + b).
pub fn mv_oplus(a: &Rational, b: &Rational) -> Rational {
    let s = a + b;
    if s > Rational::one() {
        Rational::one()
    } else {
        s
    }
}

/// Truncated MV multiplication: max(0, a + b - 1).
pub fn mv_otimes(a: &Rational, b: &Rational) -> Rational {
    let s = a + b - Rational::one();
    if s.is_negative() {
        Rational::zero()
    } else {
        s
    }
}

use num::Signed;

/// Exact value of the term function f_t at the assignment `v` in `alg`.
pub fn eval_term(t: &Term, v: &Assignment, alg: Algebra) -> Result<Rational, EvalError> {
    let sig = alg.signature();
    let mv = alg.is_mv();
    match t {
        Term::Var(name) => lookup(v, name, mv),
        Term::Const(c) => {
            if !sig.allows_const(*c) {
                return Err(EvalError::SignatureMismatch {
                    op: c.symbol().to_string(),
                });
            }
            Ok(match c {
                Constant::Zero => Rational::zero(),
                Constant::One => Rational::one(),
                Constant::MinusOne => -Rational::one(),
                Constant::Half => rat(1, 2),
            })
        }
        Term::Unary(op, inner) => {
            if !sig.allows_unary(*op) {
                return Err(EvalError::SignatureMismatch {
                    op: op.symbol().to_string(),
                });
            }
            let a = eval_term(inner, v, alg)?;
            Ok(match op {
                UnaryOp::Neg => -a,
                UnaryOp::Not => Rational::one() - a,
            })
        }
        Term::Binary(op, l, r) => {
            if !sig.allows_binary(*op) {
                return Err(EvalError::SignatureMismatch {
                    op: op.symbol().to_string(),
                });
            }
            let a = eval_term(l, v, alg)?;
            let b = eval_term(r, v, alg)?;
            Ok(match op {
                BinOp::Add => a + b,
                BinOp::Meet => a.min(b),
                BinOp::Join => a.max(b),
                BinOp::OPlus => mv_oplus(&a, &b),
                BinOp::OTimes => mv_otimes(&a, &b),
                // a -> b  is  min(1, 1 - a + b)
                BinOp::Imp => mv_oplus(&(Rational::one() - a), &b),
            })
        }
    }
}

pub fn eval_atom(a: &Atom, v: &Assignment, alg: Algebra) -> Result<bool, EvalError> {
    let l = eval_term(&a.left, v, alg)?;
    let r = eval_term(&a.right, v, alg)?;
    Ok(match a.rel {
        Rel::Eq => l == r,
        Rel::Le => l <= r,
        Rel::Lt => l < r,
    })
}

/// Truth of the boolean combination under exact comparison of atom sides.
pub fn eval_formula(f: &OpenFormula, v: &Assignment, alg: Algebra) -> Result<bool, EvalError> {
    match f {
        OpenFormula::Atom(a) => eval_atom(a, v, alg),
        OpenFormula::Not(g) => Ok(!eval_formula(g, v, alg)?),
        OpenFormula::And(l, r) => Ok(eval_formula(l, v, alg)? && eval_formula(r, v, alg)?),
        OpenFormula::Or(l, r) => Ok(eval_formula(l, v, alg)? || eval_formula(r, v, alg)?),
    }
}

/// Whether the term takes a designated value: 1 in the MV algebras, any
/// nonnegative element in R and R_{-1}.
pub fn is_designated(t: &Term, v: &Assignment, alg: Algebra) -> Result<bool, EvalError> {
    let val = eval_term(t, v, alg)?;
    Ok(if alg.is_mv() {
        val == Rational::one()
    } else {
        !val.is_negative()
    })
}

/// Parses an assignment file: lines of the form `name = p/q`, `#` comments.
pub fn parse_assignment(text: &str) -> Result<Assignment, String> {
    let mut out = Assignment::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, val) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `name = p/q`", i + 1))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(format!("line {}: empty variable name", i + 1));
        }
        let val = parse_rat(val)
            .ok_or_else(|| format!("line {}: malformed rational `{}`", i + 1, val.trim()))?;
        out.insert(name.to_string(), val);
    }
    Ok(out)
}

pub fn format_assignment(v: &Assignment) -> String {
    let mut s = String::new();
    for (name, val) in v {
        s.push_str(name);
        s.push_str(" = ");
        s.push_str(&format_rat(val));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;
    use crate::rat::int;

    fn assign(pairs: &[(&str, Rational)]) -> Assignment {
        pairs
            .iter()
            .map(|(n, v)| (n.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn otimes_example() {
        // 7/10 (*) 3/5 = 3/10
        let t = Term::otimes(Term::var("a"), Term::var("b"));
        let v = assign(&[("a", rat(7, 10)), ("b", rat(3, 5))]);
        assert_eq!(eval_term(&t, &v, Algebra::StdMv).unwrap(), rat(3, 10));
    }

    #[test]
    fn not_example() {
        let t = Term::not(Term::var("a"));
        let v = assign(&[("a", rat(1, 4))]);
        assert_eq!(eval_term(&t, &v, Algebra::StdMv).unwrap(), rat(3, 4));
    }

    #[test]
    fn pointed_lattice_example() {
        // (x \/ -1) /\ 0 at x = -3 is -1
        let t = Term::meet(
            Term::join(Term::var("x"), Term::Const(Constant::MinusOne)),
            Term::Const(Constant::Zero),
        );
        let v = assign(&[("x", int(-3))]);
        assert_eq!(eval_term(&t, &v, Algebra::Rminus1).unwrap(), int(-1));
    }

    #[test]
    fn half_oplus_half_is_one() {
        let h = Term::Const(Constant::Half);
        let t = Term::oplus(h.clone(), h);
        let v = Assignment::new();
        assert_eq!(eval_term(&t, &v, Algebra::StdMvHalf).unwrap(), int(1));
    }

    #[test]
    fn formula_examples() {
        // x = ~x at x = 1/2
        let f = OpenFormula::atom(Atom::eq(Term::var("x"), Term::not(Term::var("x"))));
        let v = assign(&[("x", rat(1, 2))]);
        assert!(eval_formula(&f, &v, Algebra::StdMv).unwrap());

        // x + x = -1 at x = -1/2
        let f = OpenFormula::atom(Atom::eq(
            Term::add(Term::var("x"), Term::var("x")),
            Term::Const(Constant::MinusOne),
        ));
        let v = assign(&[("x", rat(-1, 2))]);
        assert!(eval_formula(&f, &v, Algebra::Rminus1).unwrap());

        // !(x < 0) at x = 0
        let f = OpenFormula::not(OpenFormula::atom(Atom::lt(
            Term::var("x"),
            Term::Const(Constant::Zero),
        )));
        let v = assign(&[("x", int(0))]);
        assert!(eval_formula(&f, &v, Algebra::Rminus1).unwrap());
    }

    #[test]
    fn designated_values() {
        let v = Assignment::new();
        assert!(is_designated(&Term::Const(Constant::One), &v, Algebra::StdMv).unwrap());
        let x = Term::var("x");
        assert!(is_designated(&x, &assign(&[("x", int(0))]), Algebra::Rminus1).unwrap());
        assert!(!is_designated(&x, &assign(&[("x", rat(-1, 3))]), Algebra::Rminus1).unwrap());
    }

    #[test]
    fn errors() {
        let x = Term::var("x");
        let v = Assignment::new();
        assert!(matches!(
            eval_term(&x, &v, Algebra::R),
            Err(EvalError::Unassigned(_))
        ));
        let v = assign(&[("x", int(2))]);
        assert!(matches!(
            eval_term(&x, &v, Algebra::StdMv),
            Err(EvalError::OutOfRange(..))
        ));
        // (+) is not in the group language
        let t = Term::oplus(Term::var("x"), Term::var("x"));
        let v = assign(&[("x", int(0))]);
        assert!(matches!(
            eval_term(&t, &v, Algebra::R),
            Err(EvalError::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn defined_operations_agree_on_grid() {
        // a (+) b = ~(~a (*) ~b); a -> b = ~a (+) b; a /\ b = a (*) (a -> b);
        // a \/ b = (a -> b) -> b, checked on the 1/16 grid.
        let a = Term::var("a");
        let b = Term::var("b");
        let pairs = [
            (
                Term::oplus(a.clone(), b.clone()),
                Term::not(Term::otimes(Term::not(a.clone()), Term::not(b.clone()))),
            ),
            (
                Term::imp(a.clone(), b.clone()),
                Term::oplus(Term::not(a.clone()), b.clone()),
            ),
            (
                Term::meet(a.clone(), b.clone()),
                Term::otimes(a.clone(), Term::imp(a.clone(), b.clone())),
            ),
            (
                Term::join(a.clone(), b.clone()),
                Term::imp(Term::imp(a.clone(), b.clone()), b.clone()),
            ),
        ];
        for i in 0..=16i64 {
            for j in 0..=16i64 {
                let v = assign(&[("a", rat(i, 16)), ("b", rat(j, 16))]);
                for (lhs, rhs) in &pairs {
                    assert_eq!(
                        eval_term(lhs, &v, Algebra::StdMv).unwrap(),
                        eval_term(rhs, &v, Algebra::StdMv).unwrap(),
                        "at a={i}/16 b={j}/16"
                    );
                }
            }
        }
    }

    #[test]
    fn mv_closure_and_involution() {
        for i in 0..=8i64 {
            let v = assign(&[("x", rat(i, 8))]);
            let t = Term::not(Term::not(Term::var("x")));
            assert_eq!(
                eval_term(&t, &v, Algebra::StdMv).unwrap(),
                eval_term(&Term::var("x"), &v, Algebra::StdMv).unwrap()
            );
            let w = eval_term(
                &Term::oplus(Term::var("x"), Term::var("x")),
                &v,
                Algebra::StdMv,
            )
            .unwrap();
            assert!(is_in_unit_interval(&w));
        }
    }

    #[test]
    fn assignment_file_roundtrip() {
        let text = "x = 3/4\n# comment\ny = -2\n";
        let v = parse_assignment(text).unwrap();
        assert_eq!(v["x"], rat(3, 4));
        assert_eq!(v["y"], int(-2));
        let back = parse_assignment(&format_assignment(&v)).unwrap();
        assert_eq!(v, back);
        assert!(parse_assignment("x 3/4").is_err());
        assert!(parse_assignment("x = 1/0").is_err());
    }
}
