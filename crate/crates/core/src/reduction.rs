//! The translations between the existential theories: the scaling map
//! r_{M,k}, tau/tau' and S(Phi,M,k) for pAb -> MV, and delta, tau_q,
//! sigma_q and the MV self-translation.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::One;
use thiserror::Error;

use crate::formula::{formula_size, max_atom_term_depth, Atom, Constant, OpenFormula, Term};
use crate::linear::witness_box;
use crate::rat::{pow2, rat, Rational};
use crate::semantics::{Assignment, EvalError};

/// Materialized tau/tau_q blow up as 2^depth; raw translation is for lemma
/// checks only and is capped here.
pub const TAU_DEPTH_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("tau is undefined on the constant -1; use the tau_q path")]
    TauMinusOne,
    #[error("term depth {0} exceeds the tau materialization cap of {TAU_DEPTH_CAP}")]
    TauDepth(usize),
    #[error("parameter variable `{0}` occurs in the term")]
    QOccurs(String),
}

/// M, k and the proof constant c of the S constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionParams {
    pub m: u64,
    pub k: u64,
    pub c: u64,
}

pub const DEFAULT_C: u64 = 20;

impl ReductionParams {
    pub fn new(m: u64, k: u64, c: u64) -> ReductionParams {
        ReductionParams { m, k, c }
    }

    /// k = max term depth of `f`, M from the Lemma 3.2 witness box.
    pub fn for_formula(f: &OpenFormula, c: u64) -> ReductionParams {
        let k = max_atom_term_depth(f) as u64;
        let n = formula_size(f).max(1) as u64;
        ReductionParams {
            m: witness_box(n, c).m,
            k,
            c,
        }
    }

    /// Same k, but M overridden (the caller certifies the witness box).
    pub fn with_m(self, m: u64) -> ReductionParams {
        ReductionParams { m, ..self }
    }

    pub fn chain_len(&self) -> u64 {
        self.m + self.k + 1
    }
}

/// Reserved gadget variable names z_1..z_{M+k+1}, q and (for the pAb
/// reduction) r.
#[derive(Debug, Clone)]
pub struct GadgetVars {
    pub z: Vec<String>,
    pub q: String,
    pub r: String,
}

impl GadgetVars {
    pub fn new(p: &ReductionParams) -> GadgetVars {
        GadgetVars {
            z: (1..=p.chain_len()).map(|i| format!("z{i}")).collect(),
            q: "q".to_string(),
            r: "r".to_string(),
        }
    }

    pub fn all_names(&self, with_r: bool) -> BTreeSet<String> {
        let mut s: BTreeSet<String> = self.z.iter().cloned().collect();
        s.insert(self.q.clone());
        if with_r {
            s.insert(self.r.clone());
        }
        s
    }

    fn z_term(&self, i: u64) -> Term {
        Term::var(&self.z[(i - 1) as usize])
    }
}

/// r_{M,k}(a) = a / 2^{M+k+1} + 1/2; an order-preserving bijection of R.
pub fn r_map(p: &ReductionParams, a: &Rational) -> Rational {
    a * pow2(-(p.chain_len() as i64)) + rat(1, 2)
}

/// Inverse of r_{M,k}: b -> (b - 1/2) * 2^{M+k+1}.
pub fn r_inv(p: &ReductionParams, b: &Rational) -> Rational {
    (b - rat(1, 2)) * pow2(p.chain_len() as i64)
}

fn half() -> Term {
    Term::Const(Constant::Half)
}

/// The sum clause of tau: g(A, B) = (A (+) B) (*) (1/2 (+) (A (*) B)).
fn tau_sum(a: Term, b: Term) -> Term {
    Term::otimes(
        Term::oplus(a.clone(), b.clone()),
        Term::oplus(half(), Term::otimes(a, b)),
    )
}

/// tau of §4 on Ab terms (no -1): variables map to themselves.
pub fn tau(t: &Term) -> Result<Term, ReductionError> {
    let d = crate::formula::term_depth(t);
    if d > TAU_DEPTH_CAP {
        return Err(ReductionError::TauDepth(d));
    }
    tau_inner(t)
}

fn tau_inner(t: &Term) -> Result<Term, ReductionError> {
    use crate::formula::{BinOp, UnaryOp};
    Ok(match t {
        Term::Var(v) => Term::var(v),
        Term::Const(Constant::Zero) => half(),
        Term::Const(Constant::MinusOne) => return Err(ReductionError::TauMinusOne),
        Term::Const(_) => return Err(ReductionError::TauMinusOne),
        Term::Unary(UnaryOp::Neg, s) => Term::not(tau_inner(s)?),
        Term::Unary(UnaryOp::Not, _) => return Err(ReductionError::TauMinusOne),
        Term::Binary(BinOp::Add, l, r) => tau_sum(tau_inner(l)?, tau_inner(r)?),
        Term::Binary(BinOp::Meet, l, r) => Term::meet(tau_inner(l)?, tau_inner(r)?),
        Term::Binary(BinOp::Join, l, r) => Term::join(tau_inner(l)?, tau_inner(r)?),
        Term::Binary(..) => return Err(ReductionError::TauMinusOne),
    })
}

/// tau', the atom-wise lift of tau; boolean skeleton untouched.
pub fn tau_prime(f: &OpenFormula) -> Result<OpenFormula, ReductionError> {
    map_atoms_fallible(f, &mut |a| {
        Ok(Atom::new(tau(&a.left)?, a.rel, tau(&a.right)?))
    })
}

fn map_atoms_fallible(
    f: &OpenFormula,
    g: &mut impl FnMut(&Atom) -> Result<Atom, ReductionError>,
) -> Result<OpenFormula, ReductionError> {
    Ok(match f {
        OpenFormula::Atom(a) => OpenFormula::Atom(g(a)?),
        OpenFormula::Not(h) => OpenFormula::not(map_atoms_fallible(h, g)?),
        OpenFormula::And(l, r) => {
            OpenFormula::and(map_atoms_fallible(l, g)?, map_atoms_fallible(r, g)?)
        }
        OpenFormula::Or(l, r) => {
            OpenFormula::or(map_atoms_fallible(l, g)?, map_atoms_fallible(r, g)?)
        }
    })
}

/// tau_q of §5 on pAb terms: variables are clamped into [q, 1/2], the
/// constant -1 maps to the variable q.
pub fn tau_q(t: &Term, q: &str) -> Result<Term, ReductionError> {
    let mut vars = BTreeSet::new();
    t.variables(&mut vars);
    if vars.contains(q) {
        return Err(ReductionError::QOccurs(q.to_string()));
    }
    let d = crate::formula::term_depth(t);
    if d > TAU_DEPTH_CAP {
        return Err(ReductionError::TauDepth(d));
    }
    Ok(tau_q_inner(t, q))
}

fn tau_q_inner(t: &Term, q: &str) -> Term {
    use crate::formula::{BinOp, UnaryOp};
    match t {
        Term::Var(v) => Term::meet(Term::join(Term::var(v), Term::var(q)), half()),
        Term::Const(Constant::Zero) => half(),
        Term::Const(Constant::MinusOne) => Term::var(q),
        Term::Const(_) => unreachable!("tau_q input is a pAb term"),
        Term::Unary(UnaryOp::Neg, s) => Term::not(tau_q_inner(s, q)),
        Term::Unary(UnaryOp::Not, _) => unreachable!("tau_q input is a pAb term"),
        Term::Binary(BinOp::Add, l, r) => tau_sum(tau_q_inner(l, q), tau_q_inner(r, q)),
        Term::Binary(BinOp::Meet, l, r) => Term::meet(tau_q_inner(l, q), tau_q_inner(r, q)),
        Term::Binary(BinOp::Join, l, r) => Term::join(tau_q_inner(l, q), tau_q_inner(r, q)),
        Term::Binary(..) => unreachable!("tau_q input is a pAb term"),
    }
}

/// Value of f_{tau_q(t)} computed compositionally (constant work per node),
/// avoiding the exponential materialization of tau_q.
pub fn eval_tau_q(t: &Term, v: &Assignment, qval: &Rational) -> Result<Rational, EvalError> {
    use crate::formula::{BinOp, UnaryOp};
    use crate::semantics::{mv_oplus, mv_otimes};
    let h = rat(1, 2);
    Ok(match t {
        Term::Var(name) => {
            let a = v
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::Unassigned(name.clone()))?;
            a.max(qval.clone()).min(h)
        }
        Term::Const(Constant::Zero) => h,
        Term::Const(Constant::MinusOne) => qval.clone(),
        Term::Const(c) => {
            return Err(EvalError::SignatureMismatch {
                op: c.symbol().to_string(),
            })
        }
        Term::Unary(UnaryOp::Neg, s) => Rational::one() - eval_tau_q(s, v, qval)?,
        Term::Unary(op, _) => {
            return Err(EvalError::SignatureMismatch {
                op: op.symbol().to_string(),
            })
        }
        Term::Binary(BinOp::Add, l, r) => {
            let a = eval_tau_q(l, v, qval)?;
            let b = eval_tau_q(r, v, qval)?;
            mv_otimes(&mv_oplus(&a, &b), &mv_oplus(&h, &mv_otimes(&a, &b)))
        }
        Term::Binary(BinOp::Meet, l, r) => eval_tau_q(l, v, qval)?.min(eval_tau_q(r, v, qval)?),
        Term::Binary(BinOp::Join, l, r) => eval_tau_q(l, v, qval)?.max(eval_tau_q(r, v, qval)?),
        Term::Binary(op, ..) => {
            return Err(EvalError::SignatureMismatch {
                op: op.symbol().to_string(),
            })
        }
    })
}

/// Rewrites an MV term into the {x, 0, 1, ->, (*), /\, \/} fragment using
/// the definitions ~a = a -> 0 and a (+) b = (a -> 0) -> b; pointwise equal.
pub fn to_core_fragment(t: &Term) -> Term {
    use crate::formula::{BinOp, UnaryOp};
    let zero = Term::Const(Constant::Zero);
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Unary(UnaryOp::Not, s) => Term::imp(to_core_fragment(s), zero),
        Term::Unary(UnaryOp::Neg, _) => unreachable!("MV terms have no group negation"),
        Term::Binary(BinOp::OPlus, l, r) => {
            Term::imp(Term::imp(to_core_fragment(l), zero), to_core_fragment(r))
        }
        Term::Binary(op, l, r) => Term::bin(*op, to_core_fragment(l), to_core_fragment(r)),
    }
}

/// delta of §5: MV terms to pAb terms, satisfying
/// f_{delta(t)}(a-1) + 1 = f_t(a). Negation and (+) are first rewritten into
/// the ->/(*) fragment.
pub fn delta(t: &Term) -> Term {
    delta_core(&to_core_fragment(t))
}

fn delta_core(t: &Term) -> Term {
    use crate::formula::BinOp;
    let zero = Term::Const(Constant::Zero);
    let m1 = Term::Const(Constant::MinusOne);
    match t {
        Term::Var(v) => Term::meet(Term::join(Term::var(v), m1), zero),
        Term::Const(Constant::Zero) => m1,
        Term::Const(Constant::One) => zero,
        Term::Const(_) => unreachable!("delta input is an MV term"),
        Term::Unary(..) => unreachable!("rewritten into the core fragment"),
        Term::Binary(BinOp::Imp, l, r) => {
            Term::meet(Term::add(delta_core(r), Term::neg(delta_core(l))), zero)
        }
        Term::Binary(BinOp::OTimes, l, r) => {
            Term::join(Term::add(delta_core(l), delta_core(r)), m1)
        }
        Term::Binary(BinOp::Meet, l, r) => Term::meet(delta_core(l), delta_core(r)),
        Term::Binary(BinOp::Join, l, r) => Term::join(delta_core(l), delta_core(r)),
        Term::Binary(..) => unreachable!("rewritten into the core fragment"),
    }
}

/// delta', the atom-wise lift of delta.
pub fn delta_prime(f: &OpenFormula) -> OpenFormula {
    f.map_atoms(&mut |a| Atom::new(delta(&a.left), a.rel, delta(&a.right)))
}

/// sigma_q of Lemma 5.3: a linear-size term with
/// f_{sigma_q(t)} = f_{tau_q(delta(t))} pointwise (for q <= 1/2).
/// Size bound: term_size(sigma_q(t)) <= 7 * term_size(t) on fragment input.
pub fn sigma_q(t: &Term, q: &str) -> Result<Term, ReductionError> {
    let mut vars = BTreeSet::new();
    t.variables(&mut vars);
    if vars.contains(q) {
        return Err(ReductionError::QOccurs(q.to_string()));
    }
    let out = sigma_core(&to_core_fragment(t), q);
    debug_assert!(
        crate::formula::term_size(&out) <= 7 * crate::formula::term_size(&to_core_fragment(t))
    );
    Ok(out)
}

fn sigma_core(t: &Term, q: &str) -> Term {
    use crate::formula::BinOp;
    match t {
        Term::Var(v) => Term::meet(Term::join(Term::var(v), Term::var(q)), half()),
        Term::Const(Constant::Zero) => Term::var(q),
        Term::Const(Constant::One) => half(),
        Term::Const(_) => unreachable!("sigma_q input is an MV term"),
        Term::Unary(..) => unreachable!("rewritten into the core fragment"),
        Term::Binary(BinOp::Imp, l, r) => Term::meet(
            Term::otimes(Term::imp(sigma_core(l, q), sigma_core(r, q)), half()),
            half(),
        ),
        Term::Binary(BinOp::OTimes, l, r) => Term::join(
            Term::otimes(Term::oplus(sigma_core(l, q), sigma_core(r, q)), half()),
            Term::var(q),
        ),
        Term::Binary(BinOp::Meet, l, r) => Term::meet(sigma_core(l, q), sigma_core(r, q)),
        Term::Binary(BinOp::Join, l, r) => Term::join(sigma_core(l, q), sigma_core(r, q)),
        Term::Binary(..) => unreachable!("rewritten into the core fragment"),
    }
}

/// sigma'_q, the atom-wise lift of sigma_q.
pub fn sigma_q_prime(f: &OpenFormula, q: &str) -> Result<OpenFormula, ReductionError> {
    map_atoms_fallible(f, &mut |a| {
        Ok(Atom::new(
            sigma_q(&a.left, q)?,
            a.rel,
            sigma_q(&a.right, q)?,
        ))
    })
}

/// zeta of the §4 theorem: replace the constant -1 with the variable q,
/// apply tau' (q is treated as an ordinary variable), then replace the
/// constant 1/2 with the variable z_1.
pub fn zeta_pab(f: &OpenFormula, g: &GadgetVars) -> Result<OpenFormula, ReductionError> {
    let qv = Term::var(&g.q);
    let z1 = Term::var(&g.z[0]);
    map_atoms_fallible(f, &mut |a| {
        let l = tau(&a.left.subst_const(Constant::MinusOne, &qv))?.subst_const(Constant::Half, &z1);
        let r =
            tau(&a.right.subst_const(Constant::MinusOne, &qv))?.subst_const(Constant::Half, &z1);
        Ok(Atom::new(l, a.rel, r))
    })
}

/// zeta of the §5 theorem: sigma'_q, then 1/2 -> z_1.
pub fn zeta_mv(f: &OpenFormula, g: &GadgetVars) -> Result<OpenFormula, ReductionError> {
    let z1 = Term::var(&g.z[0]);
    let s = sigma_q_prime(f, &g.q)?;
    Ok(s.map_atoms(&mut |a| a.map_terms(&mut |t| t.subst_const(Constant::Half, &z1))))
}

/// The Lemma 4.4 equations: z_1 = ~z_1, the halving chain, the q definition
/// and (when `with_r`) the r definition.
pub fn gadget_conjuncts(p: &ReductionParams, g: &GadgetVars, with_r: bool) -> Vec<OpenFormula> {
    let n = p.chain_len();
    let mut out = Vec::new();
    out.push(OpenFormula::atom(Atom::eq(
        g.z_term(1),
        Term::not(g.z_term(1)),
    )));
    if with_r {
        out.push(OpenFormula::atom(Atom::eq(
            Term::var(&g.r),
            Term::not(Term::oplus(g.z_term(1), g.z_term(p.k + 1))),
        )));
    }
    out.push(OpenFormula::atom(Atom::eq(
        Term::var(&g.q),
        Term::not(Term::oplus(g.z_term(1), g.z_term(n))),
    )));
    for i in 1..n {
        out.push(OpenFormula::atom(Atom::eq(
            Term::oplus(g.z_term(i + 1), g.z_term(i + 1)),
            g.z_term(i),
        )));
    }
    out
}

/// The unique satisfying assignment of the gadget equations:
/// z_i = 2^{-i}, q = 1/2 - 2^{-(M+k+1)}, r = 1/2 - 2^{-(k+1)}.
pub fn gadget_values(p: &ReductionParams, with_r: bool) -> Assignment {
    let g = GadgetVars::new(p);
    let mut v = Assignment::new();
    for (i, name) in g.z.iter().enumerate() {
        v.insert(name.clone(), pow2(-(i as i64 + 1)));
    }
    v.insert(g.q.clone(), rat(1, 2) - pow2(-(p.chain_len() as i64)));
    if with_r {
        v.insert(g.r.clone(), rat(1, 2) - pow2(-(p.k as i64 + 1)));
    }
    v
}

#[derive(Debug, Clone)]
pub struct TranslationReport {
    pub source_size: usize,
    pub m: u64,
    pub k: u64,
    pub c: u64,
    pub gadget_names: Vec<String>,
    /// source variable renamings (from, to) forced by gadget-name collisions
    pub renames: Vec<(String, String)>,
    pub output_size: usize,
    pub timings: Vec<(String, Duration)>,
}

impl TranslationReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("source_size={}\n", self.source_size));
        s.push_str(&format!("k={}\n", self.k));
        s.push_str(&format!("M={}\n", self.m));
        s.push_str(&format!("c={}\n", self.c));
        s.push_str(&format!("gadget={}\n", self.gadget_names.join(",")));
        for (from, to) in &self.renames {
            s.push_str(&format!("renamed={}->{}\n", from, to));
        }
        s.push_str(&format!("output_size={}\n", self.output_size));
        for (stage, d) in &self.timings {
            s.push_str(&format!("time_{}_us={}\n", stage, d.as_micros()));
        }
        s
    }
}

/// Renames source variables that collide with the reserved gadget names,
/// deterministically suffixing "_0" until fresh.
fn rename_collisions(
    f: &OpenFormula,
    reserved: &BTreeSet<String>,
) -> (OpenFormula, Vec<(String, String)>) {
    let mut out = f.clone();
    let mut renames = Vec::new();
    let mut taken: BTreeSet<String> = f.variables();
    taken.extend(reserved.iter().cloned());
    for v in f.variables() {
        if reserved.contains(&v) {
            let mut fresh = format!("{v}_0");
            while taken.contains(&fresh) {
                fresh.push_str("_0");
            }
            taken.insert(fresh.clone());
            out = out.rename_var(&v, &fresh);
            renames.push((v, fresh));
        }
    }
    (out, renames)
}

/// S(Phi, M, k) of the §4 theorem: Tseitin, zeta, the gadget with r, and the
/// range conjuncts r <= x_i <= ~r for the (renamed) source variables.
pub fn build_s_pab(
    f: &OpenFormula,
    p: &ReductionParams,
) -> Result<(OpenFormula, TranslationReport), ReductionError> {
    debug_assert!(p.k >= max_atom_term_depth(f) as u64);
    let g = GadgetVars::new(p);
    let mut timings = Vec::new();

    let t0 = Instant::now();
    let (f, renames) = rename_collisions(f, &g.all_names(true));
    timings.push(("rename".to_string(), t0.elapsed()));

    let t0 = Instant::now();
    let ts = crate::transform::tseitin(&f);
    timings.push(("tseitin".to_string(), t0.elapsed()));

    let t0 = Instant::now();
    let zeta = zeta_pab(&ts.formula, &g)?;
    timings.push(("zeta".to_string(), t0.elapsed()));

    let t0 = Instant::now();
    let mut parts = vec![zeta];
    parts.extend(gadget_conjuncts(p, &g, true));
    for x in f.variables() {
        parts.push(OpenFormula::atom(Atom::le(Term::var(&g.r), Term::var(&x))));
        parts.push(OpenFormula::atom(Atom::le(
            Term::var(&x),
            Term::not(Term::var(&g.r)),
        )));
    }
    let s = OpenFormula::conjoin(parts);
    timings.push(("assemble".to_string(), t0.elapsed()));

    let source_size = formula_size(&f);
    let output_size = formula_size(&s);
    assert!(
        output_size as u64 <= 64 * (p.m + p.k + source_size as u64),
        "size guard violated: {output_size} > 64*(M+k+size)"
    );
    let report = TranslationReport {
        source_size,
        m: p.m,
        k: p.k,
        c: p.c,
        gadget_names: g.all_names(true).into_iter().collect(),
        renames,
        output_size,
        timings,
    };
    Ok((s, report))
}

/// The §5 self-translation: zeta (sigma'_q then 1/2 -> z_1) plus the gadget
/// without r; no range conjuncts (sigma_q clamps variables internally).
pub fn build_s_mv(
    f: &OpenFormula,
    p: &ReductionParams,
) -> Result<(OpenFormula, TranslationReport), ReductionError> {
    let g = GadgetVars::new(p);
    let mut timings = Vec::new();

    let t0 = Instant::now();
    let (f, renames) = rename_collisions(f, &g.all_names(false));
    timings.push(("rename".to_string(), t0.elapsed()));

    let t0 = Instant::now();
    let zeta = zeta_mv(&f, &g)?;
    timings.push(("zeta".to_string(), t0.elapsed()));

    let t0 = Instant::now();
    let mut parts = vec![zeta];
    parts.extend(gadget_conjuncts(p, &g, false));
    let s = OpenFormula::conjoin(parts);
    timings.push(("assemble".to_string(), t0.elapsed()));

    let source_size = formula_size(&f);
    let output_size = formula_size(&s);
    assert!(
        output_size as u64 <= 64 * (p.m + p.k + 7 * source_size as u64),
        "size guard violated: {output_size} > 64*(M+k+7*size)"
    );
    let report = TranslationReport {
        source_size,
        m: p.m,
        k: p.k,
        c: p.c,
        gadget_names: g.all_names(false).into_iter().collect(),
        renames,
        output_size,
        timings,
    };
    Ok((s, report))
}

/// Maps an MV witness of S(Phi,M,k) back to a pAb witness of Phi:
/// a_i = r^{-1}(v(x_i)), undoing any collision renaming.
pub fn map_witness_back_pab(
    p: &ReductionParams,
    report: &TranslationReport,
    mv_witness: &Assignment,
    orig_vars: &BTreeSet<String>,
) -> Assignment {
    map_back(p, report, mv_witness, orig_vars, false)
}

/// Maps an MV witness of the §5 S back to a witness of the source MV
/// formula: v''(x) = r^{-1}(v(x)) + 1.
pub fn map_witness_back_mv(
    p: &ReductionParams,
    report: &TranslationReport,
    mv_witness: &Assignment,
    orig_vars: &BTreeSet<String>,
) -> Assignment {
    map_back(p, report, mv_witness, orig_vars, true)
}

fn map_back(
    p: &ReductionParams,
    report: &TranslationReport,
    mv_witness: &Assignment,
    orig_vars: &BTreeSet<String>,
    shift: bool,
) -> Assignment {
    let renamed: std::collections::HashMap<&str, &str> = report
        .renames
        .iter()
        .map(|(from, to)| (from.as_str(), to.as_str()))
        .collect();
    let mut out = Assignment::new();
    // in the §5 direction sigma_q clamps every source variable into [q, 1/2],
    // so only that slice of the MV witness carries information
    let lo = crate::rat::rat(1, 2) - crate::rat::pow2(-(p.chain_len() as i64));
    let hi = crate::rat::rat(1, 2);
    for x in orig_vars {
        let lookup = renamed.get(x.as_str()).copied().unwrap_or(x.as_str());
        if let Some(v) = mv_witness.get(lookup) {
            let v = if shift {
                v.clone().max(lo.clone()).min(hi.clone())
            } else {
                v.clone()
            };
            let mut a = r_inv(p, &v);
            if shift {
                a += Rational::one();
            }
            out.insert(x.clone(), a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{decide_mv, decide_pab, DecideConfig, Status};
    use crate::formula::Signature;
    use crate::parser::{parse_formula, parse_term, print_formula, print_term};
    use crate::rat::int;
    use crate::semantics::{eval_formula, eval_term, Algebra};

    fn pterm(s: &str) -> Term {
        parse_term(s, Signature::PAb).unwrap()
    }

    fn mvterm(s: &str) -> Term {
        parse_term(s, Signature::Mv).unwrap()
    }

    #[test]
    fn r_map_examples() {
        let p = ReductionParams::new(2, 1, DEFAULT_C);
        assert_eq!(r_map(&p, &int(0)), rat(1, 2));
        assert_eq!(r_map(&p, &int(4)), rat(3, 4));
        assert_eq!(r_map(&p, &int(-4)), rat(1, 4));
        for a in [int(-7), rat(3, 5), int(11)] {
            assert_eq!(r_inv(&p, &r_map(&p, &a)), a);
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&pterm("0")).unwrap(), half());
        assert_eq!(tau(&pterm("-x")).unwrap(), Term::not(Term::var("x")));
        assert_eq!(tau(&pterm("x /\\ y")).unwrap(), mvterm("x /\\ y"));
        assert_eq!(
            print_term(&tau(&pterm("x + y")).unwrap()),
            "((x (+) y) (*) (1/2 (+) (x (*) y)))"
        );
        assert!(matches!(
            tau(&pterm("-1")),
            Err(ReductionError::TauMinusOne)
        ));
    }

    #[test]
    fn tau_prime_examples() {
        let f = parse_formula("x + y = 0", Signature::Ab).unwrap();
        let t = tau_prime(&f).unwrap();
        assert_eq!(
            print_formula(&t),
            "((x (+) y) (*) (1/2 (+) (x (*) y))) = 1/2"
        );
        let f = parse_formula("!(!(x = 0))", Signature::Ab).unwrap();
        let t = tau_prime(&f).unwrap();
        assert_eq!(print_formula(&t), "x = 1/2");
    }

    #[test]
    fn tau_depth_cap() {
        let mut t = Term::var("x");
        for _ in 0..13 {
            t = Term::add(t.clone(), Term::var("x"));
        }
        assert!(matches!(tau(&t), Err(ReductionError::TauDepth(_))));
    }

    #[test]
    fn tau_q_examples() {
        assert_eq!(tau_q(&pterm("-1"), "q").unwrap(), Term::var("q"));
        assert_eq!(tau_q(&pterm("0"), "q").unwrap(), half());
        assert_eq!(
            print_term(&tau_q(&pterm("x"), "q").unwrap()),
            "((x \\/ q) /\\ 1/2)"
        );
        assert!(matches!(
            tau_q(&pterm("q + x"), "q"),
            Err(ReductionError::QOccurs(_))
        ));
    }

    #[test]
    fn eval_tau_q_matches_materialization() {
        let terms = ["x + y", "-(x + y)", "(x \\/ -1) /\\ 0", "x + (y + -1)"];
        let grid = [int(0), rat(1, 4), rat(3, 8), rat(1, 2)];
        let qval = rat(1, 4);
        for s in terms {
            let t = pterm(s);
            let mat = tau_q(&t, "q").unwrap();
            for a in &grid {
                for b in &grid {
                    let mut v = Assignment::new();
                    v.insert("x".into(), a.clone());
                    v.insert("y".into(), b.clone());
                    let fast = eval_tau_q(&t, &v, &qval).unwrap();
                    v.insert("q".into(), qval.clone());
                    let slow = eval_term(&mat, &v, Algebra::StdMvHalf).unwrap();
                    assert_eq!(fast, slow, "{s} at x={a} y={b}");
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&mvterm("0")), pterm("-1"));
        assert_eq!(delta(&mvterm("1")), pterm("0"));
        let d = delta(&mvterm("x -> y"));
        // (delta(y) - delta(x)) /\ 0 with delta(v) = (v \/ -1) /\ 0
        assert_eq!(
            print_term(&d),
            "((((y \\/ -1) /\\ 0) + -(((x \\/ -1) /\\ 0))) /\\ 0)"
        );
        let d = delta(&mvterm("x (*) y"));
        assert_eq!(
            print_term(&d),
            "((((x \\/ -1) /\\ 0) + ((y \\/ -1) /\\ 0)) \\/ -1)"
        );
    }

    #[test]
    fn delta_shift_identity_spot() {
        // f_{delta(t)}(a - 1) + 1 = f_t(a)
        let terms = ["x -> y", "x (*) y", "~x", "x (+) y", "(x /\\ y) (+) x"];
        let grid = [int(0), rat(1, 3), rat(1, 2), int(1)];
        for s in terms {
            let t = mvterm(s);
            let d = delta(&t);
            for a in &grid {
                for b in &grid {
                    let mut v = Assignment::new();
                    v.insert("x".into(), a.clone());
                    v.insert("y".into(), b.clone());
                    let want = eval_term(&t, &v, Algebra::StdMv).unwrap();
                    let mut vs = Assignment::new();
                    vs.insert("x".into(), a - int(1));
                    vs.insert("y".into(), b - int(1));
                    let got = eval_term(&d, &vs, Algebra::Rminus1).unwrap() + int(1);
                    assert_eq!(got, want, "{s} at x={a} y={b}");
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_q(&mvterm("1"), "q").unwrap(), half());
        assert_eq!(sigma_q(&mvterm("0"), "q").unwrap(), Term::var("q"));
        assert_eq!(
            print_term(&sigma_q(&mvterm("x -> y"), "q").unwrap()),
            "(((((x \\/ q) /\\ 1/2) -> ((y \\/ q) /\\ 1/2)) (*) 1/2) /\\ 1/2)"
        );
    }

    #[test]
    fn sigma_size_bound_on_fragment() {
        let terms = ["x -> (y (*) x)", "(x /\\ y) -> 0", "((x -> y) -> y) (*) 1"];
        for s in terms {
            let t = mvterm(s);
            let st = sigma_q(&t, "q").unwrap();
            assert!(
                crate::formula::term_size(&st) <= 7 * crate::formula::term_size(&t),
                "{s}"
            );
        }
    }

    #[test]
    fn sigma_coincides_with_tau_q_delta() {
        let terms = ["x -> y", "x (*) y", "x /\\ 1", "(x -> 0) -> y"];
        let grid: Vec<Rational> = (0..=4).map(|i| rat(i, 4)).collect();
        let qs: Vec<Rational> = (0..=4).map(|i| rat(i, 8)).collect();
        for s in terms {
            let t = mvterm(s);
            let d = delta(&t);
            let st = sigma_q(&t, "q").unwrap();
            for a in &grid {
                for b in &grid {
                    for qv in &qs {
                        let mut v = Assignment::new();
                        v.insert("x".into(), a.clone());
                        v.insert("y".into(), b.clone());
                        let lhs = eval_tau_q(&d, &v, qv).unwrap();
                        v.insert("q".into(), qv.clone());
                        let rhs = eval_term(&st, &v, Algebra::StdMvHalf).unwrap();
                        assert_eq!(lhs, rhs, "{s} at x={a} y={b} q={qv}");
                    }
                }
            }
        }
    }

    #[test]
    fn zeta_pab_examples() {
        let p = ReductionParams::new(1, 0, DEFAULT_C);
        let g = GadgetVars::new(&p);
        let f = parse_formula("x = 0", Signature::PAb).unwrap();
        let z = zeta_pab(&f, &g).unwrap();
        assert_eq!(print_formula(&z), "x = z1");
        let f = parse_formula("x = -1", Signature::PAb).unwrap();
        let z = zeta_pab(&f, &g).unwrap();
        assert_eq!(print_formula(&z), "x = q");
        // constant-free atom with +: all 1/2 occurrences become z1
        let f = parse_formula("x + y = x", Signature::PAb).unwrap();
        let z = zeta_pab(&f, &g).unwrap();
        assert!(!print_formula(&z).contains("1/2"));
        assert!(print_formula(&z).contains("z1"));
    }

    #[test]
    fn gadget_value_examples() {
        let p = ReductionParams::new(1, 0, DEFAULT_C);
        let v = gadget_values(&p, true);
        assert_eq!(v["z1"], rat(1, 2));
        assert_eq!(v["z2"], rat(1, 4));
        assert_eq!(v["q"], rat(1, 4));
        assert_eq!(v["r"], int(0));
        let conj = OpenFormula::conjoin(gadget_conjuncts(&p, &GadgetVars::new(&p), true));
        assert!(eval_formula(&conj, &v, Algebra::StdMv).unwrap());
    }

    #[test]
    fn gadget_decides_to_unique_values() {
        for (m, k) in [(1u64, 0u64), (2, 1), (4, 3)] {
            let p = ReductionParams::new(m, k, DEFAULT_C);
            let conj = OpenFormula::conjoin(gadget_conjuncts(&p, &GadgetVars::new(&p), true));
            let v = decide_mv(&conj, &DecideConfig::default()).unwrap();
            assert_eq!(v.status, Status::Sat);
            let w = v.witness.unwrap();
            for (name, val) in gadget_values(&p, true) {
                assert_eq!(w[&name], val, "{name} at M={m} k={k}");
            }
            assert_eq!(v.stats.branches, 0);
        }
    }

    #[test]
    fn build_s_pab_example() {
        let p = ReductionParams::new(1, 0, DEFAULT_C);
        let f = parse_formula("x = -1", Signature::PAb).unwrap();
        let (s, report) = build_s_pab(&f, &p).unwrap();
        let text = print_formula(&s);
        assert!(text.contains("z1 = ~z1"));
        assert!(text.contains("q = ~((z1 (+) z2))") || text.contains("q = ~(z1 (+) z2)"));
        assert!(text.contains("r = ~((z1 (+) z1))") || text.contains("r = ~(z1 (+) z1)"));
        assert!(text.contains("(z2 (+) z2) = z1"));
        assert!(text.contains("r <= x"));
        assert!(text.contains("x <= ~r"));
        assert!(report.renames.is_empty());
        assert!(s.respects(Signature::Mv), "S must be a pure MV formula");

        // equisatisfiability on this instance
        let vf = decide_pab(&f, &DecideConfig::default()).unwrap();
        let vs = decide_mv(&s, &DecideConfig::default()).unwrap();
        assert_eq!(vf.status, Status::Sat);
        assert_eq!(vs.status, Status::Sat);
        let back = map_witness_back_pab(&p, &report, &vs.witness.unwrap(), &f.variables());
        assert!(eval_formula(&f, &back, Algebra::Rminus1).unwrap());
    }

    #[test]
    fn build_s_pab_unsat_preserved() {
        let f = parse_formula("(x \\/ 0) = -1", Signature::PAb).unwrap();
        let p = ReductionParams::new(2, max_atom_term_depth(&f) as u64, DEFAULT_C);
        let (s, _) = build_s_pab(&f, &p).unwrap();
        assert_eq!(
            decide_pab(&f, &DecideConfig::default()).unwrap().status,
            Status::Unsat
        );
        assert_eq!(
            decide_mv(&s, &DecideConfig::default()).unwrap().status,
            Status::Unsat
        );
    }

    #[test]
    fn build_s_mv_examples() {
        let p = ReductionParams::new(2, 1, DEFAULT_C);
        let f = parse_formula("x = ~x", Signature::Mv).unwrap();
        let (s, report) = build_s_mv(&f, &p).unwrap();
        assert!(s.respects(Signature::Mv));
        let vs = decide_mv(&s, &DecideConfig::default()).unwrap();
        assert_eq!(vs.status, Status::Sat);
        let back = map_witness_back_mv(&p, &report, &vs.witness.unwrap(), &f.variables());
        assert!(eval_formula(&f, &back, Algebra::StdMv).unwrap());

        let f = parse_formula("0 = 1", Signature::Mv).unwrap();
        let (s, _) = build_s_mv(&f, &p).unwrap();
        assert_eq!(
            decide_mv(&s, &DecideConfig::default()).unwrap().status,
            Status::Unsat
        );
    }

    #[test]
    fn collision_renaming() {
        let f = parse_formula("(q + z1) = r", Signature::PAb).unwrap();
        let p = ReductionParams::new(1, 1, DEFAULT_C);
        let (s, report) = build_s_pab(&f, &p).unwrap();
        assert_eq!(report.renames.len(), 3);
        for (from, to) in &report.renames {
            assert_eq!(to, &format!("{from}_0"));
        }
        assert!(s.respects(Signature::Mv));
        let rendered = report.render();
        assert!(rendered.contains("renamed=q->q_0"));
    }

    #[test]
    fn params_for_formula() {
        let f = parse_formula("x + y = 0", Signature::PAb).unwrap();
        let p = ReductionParams::for_formula(&f, DEFAULT_C);
        assert_eq!(p.k, 1);
        assert_eq!(p.m, witness_box(3, 20).m);
    }
}
