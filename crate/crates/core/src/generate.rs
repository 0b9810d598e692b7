//! Seeded random terms, formulas and rationals for the lemma suites.
//! All generation is deterministic for a fixed seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::formula::{Atom, BinOp, Constant, OpenFormula, Rel, Signature, Term, UnaryOp};
use crate::rat::{rat, Rational};

pub fn rng_for(seed: u64, instance: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15) ^ instance)
}

pub fn var_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{}", i + 1)).collect()
}

/// Random rational with numerator in [-num_bound, num_bound] and denominator
/// in [1, den_bound].
pub fn random_rational(rng: &mut ChaCha8Rng, num_bound: i64, den_bound: i64) -> Rational {
    let d = rng.gen_range(1..=den_bound.max(1));
    let n = rng.gen_range(-num_bound * d..=num_bound * d);
    rat(n, d)
}

/// Random rational in [0, 1] with denominator up to `den_bound`.
pub fn random_unit_rational(rng: &mut ChaCha8Rng, den_bound: i64) -> Rational {
    let d = rng.gen_range(1..=den_bound.max(1));
    let n = rng.gen_range(0..=d);
    rat(n, d)
}

fn leaf(rng: &mut ChaCha8Rng, sig: Signature, vars: &[String]) -> Term {
    let consts: &[Constant] = match sig {
        Signature::Ab => &[Constant::Zero],
        Signature::PAb => &[Constant::Zero, Constant::MinusOne],
        Signature::Mv => &[Constant::Zero, Constant::One],
        Signature::MvHalf => &[Constant::Zero, Constant::One, Constant::Half],
    };
    // bias toward variables
    if !vars.is_empty() && rng.gen_bool(0.7) {
        Term::var(vars.choose(rng).unwrap())
    } else {
        Term::Const(*consts.choose(rng).unwrap())
    }
}

/// Random reduced term of the signature with depth at most `depth`.
pub fn random_term(rng: &mut ChaCha8Rng, sig: Signature, depth: usize, vars: &[String]) -> Term {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, sig, vars);
    }
    let unary: UnaryOp = if sig.is_group() {
        UnaryOp::Neg
    } else {
        UnaryOp::Not
    };
    let bins: &[BinOp] = if sig.is_group() {
        &[BinOp::Add, BinOp::Meet, BinOp::Join]
    } else {
        &[
            BinOp::OPlus,
            BinOp::OTimes,
            BinOp::Imp,
            BinOp::Meet,
            BinOp::Join,
        ]
    };
    let t = if rng.gen_bool(0.25) {
        Term::Unary(unary, Box::new(random_term(rng, sig, depth - 1, vars)))
    } else {
        let op = *bins.choose(rng).unwrap();
        Term::bin(
            op,
            random_term(rng, sig, depth - 1, vars),
            random_term(rng, sig, depth - 1, vars),
        )
    };
    crate::formula::normalize_term(&t)
}

/// Random MV term in the {x, 0, 1, ->, (*), /\, \/} fragment.
pub fn random_core_mv_term(rng: &mut ChaCha8Rng, depth: usize, vars: &[String]) -> Term {
    if depth == 0 || rng.gen_bool(0.2) {
        return if !vars.is_empty() && rng.gen_bool(0.75) {
            Term::var(vars.choose(rng).unwrap())
        } else if rng.gen_bool(0.5) {
            Term::Const(Constant::Zero)
        } else {
            Term::Const(Constant::One)
        };
    }
    let ops = [BinOp::Imp, BinOp::OTimes, BinOp::Meet, BinOp::Join];
    let op = *ops.choose(rng).unwrap();
    Term::bin(
        op,
        random_core_mv_term(rng, depth - 1, vars),
        random_core_mv_term(rng, depth - 1, vars),
    )
}

pub fn random_atom(rng: &mut ChaCha8Rng, sig: Signature, depth: usize, vars: &[String]) -> Atom {
    let rels: &[Rel] = if sig.is_group() {
        &[Rel::Eq, Rel::Le, Rel::Lt]
    } else {
        &[Rel::Eq, Rel::Le]
    };
    Atom::new(
        random_term(rng, sig, depth, vars),
        *rels.choose(rng).unwrap(),
        random_term(rng, sig, depth, vars),
    )
}

/// Random open formula with at most `max_atoms` atom occurrences.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    sig: Signature,
    depth: usize,
    vars: &[String],
    max_atoms: usize,
) -> OpenFormula {
    let n = rng.gen_range(1..=max_atoms.max(1));
    let f = build_boolean(rng, sig, depth, vars, n);
    crate::formula::normalize_formula(&f)
}

fn build_boolean(
    rng: &mut ChaCha8Rng,
    sig: Signature,
    depth: usize,
    vars: &[String],
    atoms: usize,
) -> OpenFormula {
    if atoms <= 1 {
        let a = OpenFormula::atom(random_atom(rng, sig, depth, vars));
        return if rng.gen_bool(0.25) {
            OpenFormula::not(a)
        } else {
            a
        };
    }
    let left = rng.gen_range(1..atoms);
    let l = build_boolean(rng, sig, depth, vars, left);
    let r = build_boolean(rng, sig, depth, vars, atoms - left);
    let f = if rng.gen_bool(0.5) {
        OpenFormula::and(l, r)
    } else {
        OpenFormula::or(l, r)
    };
    if rng.gen_bool(0.15) {
        OpenFormula::not(f)
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{max_atom_term_depth, term_depth};

    #[test]
    fn deterministic_for_seed() {
        let vars = var_names(3);
        let a = random_formula(&mut rng_for(7, 0), Signature::PAb, 3, &vars, 4);
        let b = random_formula(&mut rng_for(7, 0), Signature::PAb, 3, &vars, 4);
        assert_eq!(a, b);
        let c = random_formula(&mut rng_for(7, 1), Signature::PAb, 3, &vars, 4);
        assert_ne!(a, c, "different instances should (generically) differ");
    }

    #[test]
    fn respects_signature_and_bounds() {
        let vars = var_names(4);
        for i in 0..200 {
            let mut rng = rng_for(3, i);
            let t = random_term(&mut rng, Signature::Ab, 4, &vars);
            assert!(t.respects(Signature::Ab));
            assert!(term_depth(&t) <= 4);
            assert!(crate::formula::is_reduced_term(&t));

            let f = random_formula(&mut rng, Signature::Mv, 3, &vars[..2], 3);
            assert!(f.respects(Signature::Mv));
            assert!(max_atom_term_depth(&f) <= 3);
            assert!(crate::formula::atom_count(&f) <= 3);

            let core = random_core_mv_term(&mut rng, 3, &vars[..3]);
            assert_eq!(core, crate::reduction::to_core_fragment(&core));
        }
    }

    #[test]
    fn rationals_in_range() {
        let mut rng = rng_for(11, 0);
        for _ in 0..100 {
            let v = random_rational(&mut rng, 4, 8);
            assert!(v >= crate::rat::int(-4) && v <= crate::rat::int(4));
            let u = random_unit_rational(&mut rng, 8);
            assert!(crate::rat::is_in_unit_interval(&u));
        }
    }
}
