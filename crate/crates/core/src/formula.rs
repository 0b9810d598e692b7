//! Term and formula ASTs for the four languages, size/depth metrics, and
//! reduced-form normalization.
//!
//! Terms are ordinary trees; equality is structural equality on the reduced
//! form (no `--` or `~~` subterms). Constants are signature symbols, not
//! numerals.

use std::collections::BTreeSet;
use std::fmt;

/// Which language a term or formula is written in.
///
/// `Ab` is the language of abelian l-groups, `PAb` adds the constant `-1`,
/// `Mv` is the language of MV-algebras and `MvHalf` adds the constant `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signature {
    Ab,
    PAb,
    Mv,
    MvHalf,
}

impl Signature {
    pub fn allows_const(self, c: Constant) -> bool {
        match c {
            Constant::Zero => true,
            Constant::MinusOne => self == Signature::PAb,
            Constant::One => matches!(self, Signature::Mv | Signature::MvHalf),
            Constant::Half => self == Signature::MvHalf,
        }
    }

    pub fn allows_unary(self, op: UnaryOp) -> bool {
        match op {
            UnaryOp::Neg => matches!(self, Signature::Ab | Signature::PAb),
            UnaryOp::Not => matches!(self, Signature::Mv | Signature::MvHalf),
        }
    }

    pub fn allows_binary(self, op: BinOp) -> bool {
        match op {
            BinOp::Meet | BinOp::Join => true,
            BinOp::Add => matches!(self, Signature::Ab | Signature::PAb),
            BinOp::OPlus | BinOp::OTimes | BinOp::Imp => {
                matches!(self, Signature::Mv | Signature::MvHalf)
            }
        }
    }

    /// Group-side signatures (values range over all of R).
    pub fn is_group(self) -> bool {
        matches!(self, Signature::Ab | Signature::PAb)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Signature::Ab => "ab",
            Signature::PAb => "pab",
            Signature::Mv => "mv",
            Signature::MvHalf => "mvhalf",
        }
    }

    pub fn from_tag(s: &str) -> Option<Signature> {
        match s {
            "ab" => Some(Signature::Ab),
            "pab" => Some(Signature::PAb),
            "mv" => Some(Signature::Mv),
            "mvhalf" => Some(Signature::MvHalf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Zero,
    One,
    MinusOne,
    Half,
}

impl Constant {
    pub fn symbol(self) -> &'static str {
        match self {
            Constant::Zero => "0",
            Constant::One => "1",
            Constant::MinusOne => "-1",
            Constant::Half => "1/2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// Group negation `-`.
    Neg,
    /// MV negation `~`.
    Not,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Not => "~",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    /// Group addition `+`.
    Add,
    /// Lattice meet `/\`.
    Meet,
    /// Lattice join `\/`.
    Join,
    /// MV strong disjunction `(+)`.
    OPlus,
    /// MV strong conjunction `(*)`.
    OTimes,
    /// MV implication `->`.
    Imp,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Meet => "/\\",
            BinOp::Join => "\\/",
            BinOp::OPlus => "(+)",
            BinOp::OTimes => "(*)",
            BinOp::Imp => "->",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Constant),
    Unary(UnaryOp, Box<Term>),
    Binary(BinOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn neg(t: Term) -> Term {
        Term::Unary(UnaryOp::Neg, Box::new(t))
    }

    pub fn not(t: Term) -> Term {
        Term::Unary(UnaryOp::Not, Box::new(t))
    }

    pub fn bin(op: BinOp, l: Term, r: Term) -> Term {
        Term::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Add, l, r)
    }

    pub fn meet(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Meet, l, r)
    }

    pub fn join(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Join, l, r)
    }

    pub fn oplus(l: Term, r: Term) -> Term {
        Term::bin(BinOp::OPlus, l, r)
    }

    pub fn otimes(l: Term, r: Term) -> Term {
        Term::bin(BinOp::OTimes, l, r)
    }

    pub fn imp(l: Term, r: Term) -> Term {
        Term::bin(BinOp::Imp, l, r)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Const(_))
    }

    /// True when every operator and constant of the term belongs to `sig`.
    pub fn respects(&self, sig: Signature) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Const(c) => sig.allows_const(*c),
            Term::Unary(op, t) => sig.allows_unary(*op) && t.respects(sig),
            Term::Binary(op, l, r) => sig.allows_binary(*op) && l.respects(sig) && r.respects(sig),
        }
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Unary(_, t) => t.variables(out),
            Term::Binary(_, l, r) => {
                l.variables(out);
                r.variables(out);
            }
        }
    }

    /// Replaces every occurrence of constant `c` with the term `to`.
    pub fn subst_const(&self, c: Constant, to: &Term) -> Term {
        match self {
            Term::Const(k) if *k == c => to.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Unary(op, t) => Term::Unary(*op, Box::new(t.subst_const(c, to))),
            Term::Binary(op, l, r) => Term::Binary(
                *op,
                Box::new(l.subst_const(c, to)),
                Box::new(r.subst_const(c, to)),
            ),
        }
    }

    pub fn rename_var(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::var(to),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Unary(op, t) => Term::Unary(*op, Box::new(t.rename_var(from, to))),
            Term::Binary(op, l, r) => Term::Binary(
                *op,
                Box::new(l.rename_var(from, to)),
                Box::new(r.rename_var(from, to)),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Le => "<=",
            Rel::Lt => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub left: Term,
    pub rel: Rel,
    pub right: Term,
}

impl Atom {
    pub fn new(left: Term, rel: Rel, right: Term) -> Atom {
        Atom { left, rel, right }
    }

    pub fn eq(left: Term, right: Term) -> Atom {
        Atom::new(left, Rel::Eq, right)
    }

    pub fn le(left: Term, right: Term) -> Atom {
        Atom::new(left, Rel::Le, right)
    }

    pub fn lt(left: Term, right: Term) -> Atom {
        Atom::new(left, Rel::Lt, right)
    }

    pub fn size(&self) -> usize {
        term_size(&self.left) + term_size(&self.right)
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Atom {
        Atom::new(f(&self.left), self.rel, f(&self.right))
    }
}

/// Boolean combination of atoms. `Not` never sits directly under `Not`
/// after normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpenFormula {
    Atom(Atom),
    Not(Box<OpenFormula>),
    And(Box<OpenFormula>, Box<OpenFormula>),
    Or(Box<OpenFormula>, Box<OpenFormula>),
}

impl OpenFormula {
    pub fn atom(a: Atom) -> OpenFormula {
        OpenFormula::Atom(a)
    }

    pub fn not(f: OpenFormula) -> OpenFormula {
        OpenFormula::Not(Box::new(f))
    }

    pub fn and(l: OpenFormula, r: OpenFormula) -> OpenFormula {
        OpenFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: OpenFormula, r: OpenFormula) -> OpenFormula {
        OpenFormula::Or(Box::new(l), Box::new(r))
    }

    /// Right-leaning conjunction of a non-empty list.
    pub fn conjoin(mut parts: Vec<OpenFormula>) -> OpenFormula {
        let last = parts.pop().expect("conjoin of empty list");
        parts
            .into_iter()
            .rev()
            .fold(last, |acc, f| OpenFormula::and(f, acc))
    }

    pub fn respects(&self, sig: Signature) -> bool {
        match self {
            OpenFormula::Atom(a) => a.left.respects(sig) && a.right.respects(sig),
            OpenFormula::Not(f) => f.respects(sig),
            OpenFormula::And(l, r) | OpenFormula::Or(l, r) => l.respects(sig) && r.respects(sig),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            OpenFormula::Atom(a) => {
                a.left.variables(out);
                a.right.variables(out);
            }
            OpenFormula::Not(f) => f.collect_variables(out),
            OpenFormula::And(l, r) | OpenFormula::Or(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            OpenFormula::Atom(a) => out.push(a),
            OpenFormula::Not(f) => f.collect_atoms(out),
            OpenFormula::And(l, r) | OpenFormula::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Rewrites every atom, keeping the boolean skeleton.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> OpenFormula {
        match self {
            OpenFormula::Atom(a) => OpenFormula::Atom(f(a)),
            OpenFormula::Not(g) => OpenFormula::not(g.map_atoms(f)),
            OpenFormula::And(l, r) => OpenFormula::and(l.map_atoms(f), r.map_atoms(f)),
            OpenFormula::Or(l, r) => OpenFormula::or(l.map_atoms(f), r.map_atoms(f)),
        }
    }

    pub fn rename_var(&self, from: &str, to: &str) -> OpenFormula {
        self.clone()
            .map_atoms(&mut |a| a.map_terms(&mut |t| t.rename_var(from, to)))
    }
}

/// Leaf count of a term: the total number of occurrences of variables and
/// constants, each at unit length.
pub fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 1,
        Term::Unary(_, t) => term_size(t),
        Term::Binary(_, l, r) => term_size(l) + term_size(r),
    }
}

pub fn term_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 0,
        Term::Unary(_, t) => term_depth(t) + 1,
        Term::Binary(_, l, r) => term_depth(l).max(term_depth(r)) + 1,
    }
}

/// Number of function-symbol occurrences (inner nodes of the term tree).
pub fn op_count(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 0,
        Term::Unary(_, t) => op_count(t) + 1,
        Term::Binary(_, l, r) => op_count(l) + op_count(r) + 1,
    }
}

/// Sum of term sizes over all atom occurrences.
pub fn formula_size(f: &OpenFormula) -> usize {
    f.atoms().iter().map(|a| a.size()).sum()
}

/// Number of atom occurrences (occurrences, not distinct atoms).
pub fn atom_count(f: &OpenFormula) -> usize {
    f.atoms().len()
}

pub fn max_atom_term_depth(f: &OpenFormula) -> usize {
    f.atoms()
        .iter()
        .map(|a| term_depth(&a.left).max(term_depth(&a.right)))
        .max()
        .unwrap_or(0)
}

/// Removes double unary negations (`--a = a`, `~~a = a`), recursing
/// everywhere. Pointwise equal to the input under evaluation.
pub fn normalize_term(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Unary(op, inner) => {
            let inner = normalize_term(inner);
            match inner {
                Term::Unary(op2, grand) if op2 == *op => *grand,
                other => Term::Unary(*op, Box::new(other)),
            }
        }
        Term::Binary(op, l, r) => Term::bin(*op, normalize_term(l), normalize_term(r)),
    }
}

pub fn is_reduced_term(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const(_) => true,
        Term::Unary(op, inner) => {
            !matches!(&**inner, Term::Unary(op2, _) if op2 == op) && is_reduced_term(inner)
        }
        Term::Binary(_, l, r) => is_reduced_term(l) && is_reduced_term(r),
    }
}

/// Reduced form of a formula: normalized terms and no `!!` in the boolean
/// skeleton.
pub fn normalize_formula(f: &OpenFormula) -> OpenFormula {
    match f {
        OpenFormula::Atom(a) => OpenFormula::Atom(Atom::new(
            normalize_term(&a.left),
            a.rel,
            normalize_term(&a.right),
        )),
        OpenFormula::Not(g) => match &**g {
            OpenFormula::Not(h) => normalize_formula(h),
            _ => OpenFormula::not(normalize_formula(g)),
        },
        OpenFormula::And(l, r) => OpenFormula::and(normalize_formula(l), normalize_formula(r)),
        OpenFormula::Or(l, r) => OpenFormula::or(normalize_formula(l), normalize_formula(r)),
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn normalize_collapses_double_negation() {
        // -(-x) -> x
        let t = Term::neg(Term::neg(x()));
        assert_eq!(normalize_term(&t), x());
        // ~~(x (+) y) -> x (+) y
        let t = Term::not(Term::not(Term::oplus(x(), y())));
        assert_eq!(normalize_term(&t), Term::oplus(x(), y()));
        // x + (-(-y)) -> x + y
        let t = Term::add(x(), Term::neg(Term::neg(y())));
        assert_eq!(normalize_term(&t), Term::add(x(), y()));
    }

    #[test]
    fn normalize_never_grows() {
        let t = Term::neg(Term::neg(Term::neg(x())));
        let n = normalize_term(&t);
        assert!(term_size(&n) <= term_size(&t));
        assert!(is_reduced_term(&n));
        assert_eq!(n, Term::neg(x()));
    }

    #[test]
    fn sizes() {
        assert_eq!(term_size(&x()), 1);
        // (x + y) /\ 0
        let t = Term::meet(Term::add(x(), y()), Term::Const(Constant::Zero));
        assert_eq!(term_size(&t), 3);
        // -1 + (x \/ -1)
        let m1 = Term::Const(Constant::MinusOne);
        let t = Term::add(m1.clone(), Term::join(x(), m1));
        assert_eq!(term_size(&t), 3);
    }

    #[test]
    fn depths() {
        assert_eq!(term_depth(&Term::Const(Constant::Zero)), 0);
        assert_eq!(term_depth(&Term::neg(x())), 1);
        let t = Term::join(Term::add(x(), y()), Term::var("z"));
        assert_eq!(term_depth(&t), 2);
    }

    #[test]
    fn reduced_op_count_bound() {
        let t = Term::neg(Term::add(Term::neg(x()), Term::neg(y())));
        assert!(is_reduced_term(&t));
        assert!(op_count(&t) <= 2 * term_size(&t));
    }

    #[test]
    fn formula_metrics() {
        let zero = Term::Const(Constant::Zero);
        let a = OpenFormula::atom(Atom::eq(x(), zero.clone()));
        assert_eq!(formula_size(&a), 2);
        assert_eq!(atom_count(&a), 1);

        // (x = 0) & (x + y = z)
        let b = OpenFormula::and(
            a.clone(),
            OpenFormula::atom(Atom::eq(Term::add(x(), y()), Term::var("z"))),
        );
        assert_eq!(formula_size(&b), 5);

        // !!(x < -1) has size 2 and one atom; normalization drops !!
        let c = OpenFormula::not(OpenFormula::not(OpenFormula::atom(Atom::lt(
            x(),
            Term::Const(Constant::MinusOne),
        ))));
        assert_eq!(formula_size(&c), 2);
        assert_eq!(atom_count(&c), 1);
        let n = normalize_formula(&c);
        assert!(matches!(n, OpenFormula::Atom(_)));

        // (x = y) | (x = y) counts occurrences
        let d = OpenFormula::or(
            OpenFormula::atom(Atom::eq(x(), y())),
            OpenFormula::atom(Atom::eq(x(), y())),
        );
        assert_eq!(atom_count(&d), 2);
    }

    #[test]
    fn signature_checks() {
        let t = Term::oplus(x(), y());
        assert!(!t.respects(Signature::Ab));
        assert!(t.respects(Signature::Mv));
        let t = Term::Const(Constant::MinusOne);
        assert!(t.respects(Signature::PAb));
        assert!(!t.respects(Signature::Ab));
        assert!(!t.respects(Signature::Mv));
    }
}
