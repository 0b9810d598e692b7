//! Exact-rational linear feasibility by Fourier-Motzkin elimination with
//! native strict inequalities, plus the witness-magnitude bound formulas.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use thiserror::Error;

use crate::formula::{Atom, BinOp, Constant, Rel, Term, UnaryOp};
use crate::rat::{pow2, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinearError {
    #[error("Fourier-Motzkin row count exceeds the cap of {cap}")]
    RowCap { cap: usize },
    #[error("term is not linear: `{0}`")]
    NonLinear(String),
}

/// One inequality `coeffs . x <= rhs` (or `<` when strict). Coefficients are
/// integers over the system's column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<BigInt>,
    pub rhs: Rational,
    pub strict: bool,
}

impl Row {
    fn reduce(&mut self) {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if g > BigInt::one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
            self.rhs /= Rational::from_integer(g);
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// A constant row holds iff 0 <= rhs (0 < rhs when strict).
    fn constant_holds(&self) -> bool {
        if self.strict {
            self.rhs.is_positive()
        } else {
            !self.rhs.is_negative()
        }
    }
}

/// System of integer-coefficient inequalities over named columns.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    pub vars: Vec<String>,
    index: HashMap<String, usize>,
    pub rows: Vec<Row>,
}

pub const DEFAULT_ROW_CAP: usize = 200_000;

impl LinearSystem {
    pub fn new() -> LinearSystem {
        LinearSystem::default()
    }

    pub fn column(&mut self, var: &str) -> usize {
        if let Some(&i) = self.index.get(var) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(var.to_string());
        self.index.insert(var.to_string(), i);
        for row in &mut self.rows {
            row.coeffs.push(BigInt::zero());
        }
        i
    }

    /// Adds `sum coeff_i * var_i (<=|<) rhs`.
    pub fn add_combo(&mut self, combo: &[(&str, i64)], strict: bool, rhs: Rational) {
        let cols: Vec<(usize, i64)> = combo.iter().map(|(v, c)| (self.column(v), *c)).collect();
        let mut coeffs = vec![BigInt::zero(); self.vars.len()];
        for (i, c) in cols {
            coeffs[i] += BigInt::from(c);
        }
        self.rows.push(Row {
            coeffs,
            rhs,
            strict,
        });
    }

    /// Adds `sum coeff_i * var_i = rhs` as two inequalities.
    pub fn add_combo_eq(&mut self, combo: &[(&str, i64)], rhs: Rational) {
        self.add_combo(combo, false, rhs.clone());
        let negated: Vec<(&str, i64)> = combo.iter().map(|(v, c)| (*v, -c)).collect();
        self.add_combo(&negated, false, -rhs);
    }

    /// Largest absolute coefficient value (the `k` of Lemma 3.1); 1 when the
    /// system is empty.
    pub fn entry_bound(&self) -> BigInt {
        let mut k = BigInt::one();
        for row in &self.rows {
            for c in &row.coeffs {
                let a = c.abs();
                if a > k {
                    k = a;
                }
            }
            // integral right-hand sides count as entries of the (A|b) tableau
            if row.rhs.denom().is_one() {
                let a = row.rhs.numer().abs();
                if a > k {
                    k = a;
                }
            }
        }
        k
    }

    /// Plain text tableau: one row per line, integer coefficients in column
    /// order, then the relation and right-hand side.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        s.push_str("# columns: ");
        s.push_str(&self.vars.join(" "));
        s.push('\n');
        for row in &self.rows {
            let cs: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
            s.push_str(&cs.join(" "));
            s.push_str(if row.strict { " < " } else { " <= " });
            s.push_str(&crate::rat::format_rat(&row.rhs));
            s.push('\n');
        }
        s
    }

    /// Appends the rows for a linear atom (no lattice operations) with terms
    /// over +, -, constants and variables.
    pub fn add_atom(&mut self, a: &Atom) -> Result<(), LinearError> {
        let mut form = LinForm::default();
        linearize(&a.left, 1, &mut form)?;
        linearize(&a.right, -1, &mut form)?;
        let combo: Vec<(&str, i64)> = form
            .coeffs
            .iter()
            .filter(|(_, c)| **c != 0)
            .map(|(v, c)| (v.as_str(), *c))
            .collect();
        let rhs = crate::rat::int(-form.constant);
        match a.rel {
            Rel::Le => self.add_combo(&combo, false, rhs),
            Rel::Lt => self.add_combo(&combo, true, rhs),
            Rel::Eq => self.add_combo_eq(&combo, rhs),
        }
        Ok(())
    }

    /// Rows for the lattice case `x = a` (plus `a <= b`) of the defining atom
    /// `x = a (/\ or \/) b` when the left argument is chosen as the extremum,
    /// or symmetrically for the right.
    pub fn add_lattice_case(&mut self, x: &str, a: &str, b: &str, meet: bool, left: bool) {
        let (ext, other) = if left { (a, b) } else { (b, a) };
        self.add_combo_eq(&[(x, 1), (ext, -1)], crate::rat::int(0));
        let (lo, hi) = if meet { (ext, other) } else { (other, ext) };
        self.add_combo(&[(lo, 1), (hi, -1)], false, crate::rat::int(0));
    }

    pub fn feasible(&self, cap: usize) -> Result<Option<HashMap<String, Rational>>, LinearError> {
        feasible(self, cap)
    }

    /// Builds the row(s) for `sum coeff_i * var_i rel rhs` in this system's
    /// column space without adding them; registers any new columns.
    pub fn make_rows(&mut self, combo: &[(&str, i64)], rel: Rel, rhs: Rational) -> Vec<Row> {
        let cols: Vec<(usize, i64)> = combo.iter().map(|(v, c)| (self.column(v), *c)).collect();
        let mut coeffs = vec![BigInt::zero(); self.vars.len()];
        for (i, c) in &cols {
            coeffs[*i] += BigInt::from(*c);
        }
        match rel {
            Rel::Le | Rel::Lt => vec![Row {
                coeffs,
                rhs,
                strict: rel == Rel::Lt,
            }],
            Rel::Eq => {
                let negated: Vec<BigInt> = coeffs.iter().map(|c| -c).collect();
                vec![
                    Row {
                        coeffs,
                        rhs: rhs.clone(),
                        strict: false,
                    },
                    Row {
                        coeffs: negated,
                        rhs: -rhs,
                        strict: false,
                    },
                ]
            }
        }
    }
}

/// The result of eliminating a system's equality pairs once up front. Case
/// rows added later must be passed through `normalize` so they cannot
/// resurrect an eliminated column, and witnesses of the residual must be
/// finished with `complete`.
pub struct Presolved {
    pub residual: LinearSystem,
    pivots: Vec<(usize, Row)>,
    pub infeasible: bool,
    pub rows_peak: usize,
}

impl Presolved {
    /// Applies the recorded pivots in order, zeroing every eliminated column.
    pub fn normalize(&self, mut row: Row) -> Row {
        row.coeffs.resize(self.residual.vars.len(), BigInt::zero());
        for (col, p) in &self.pivots {
            let b = row.coeffs[*col].clone();
            if b.is_zero() {
                continue;
            }
            let a = p.coeffs[*col].clone(); // positive by construction
            row.coeffs = row
                .coeffs
                .iter()
                .zip(&p.coeffs)
                .map(|(rc, pc)| rc * &a - pc * &b)
                .collect();
            row.rhs = &row.rhs * Rational::from_integer(a) - &p.rhs * Rational::from_integer(b);
            row.reduce();
        }
        row
    }

    /// Recovers the eliminated columns from a witness of the residual system
    /// by replaying the pivot equalities in reverse.
    pub fn complete(&self, values: &mut HashMap<String, Rational>) {
        let vars = &self.residual.vars;
        for (col, p) in self.pivots.iter().rev() {
            let a = &p.coeffs[*col];
            let mut rest = p.rhs.clone();
            for (i, c) in p.coeffs.iter().enumerate() {
                if i != *col && !c.is_zero() {
                    let v = values.get(&vars[i]).cloned().unwrap_or_default();
                    rest -= Rational::from_integer(c.clone()) * v;
                }
            }
            values.insert(vars[*col].clone(), rest / Rational::from_integer(a.clone()));
        }
    }
}

/// Gaussian elimination of all equality row-pairs of `sys`; the residual
/// keeps only genuine inequalities.
pub fn presolve(sys: &LinearSystem) -> Presolved {
    let ncols = sys.vars.len();
    let mut rows: Vec<Row> = sys.rows.clone();
    for r in &mut rows {
        r.coeffs.resize(ncols, BigInt::zero());
        r.reduce();
    }
    let mut remaining: Vec<usize> = (0..ncols).collect();
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    let mut infeasible = false;
    let rows_peak = rows.len();
    loop {
        rows = dedupe_rows(rows);
        let mut active = Vec::with_capacity(rows.len());
        for r in rows {
            if r.is_constant() {
                if !r.constant_holds() {
                    infeasible = true;
                }
            } else {
                active.push(r);
            }
        }
        rows = active;
        if infeasible {
            rows.clear();
            break;
        }
        let Some((pi, ni, col)) = find_equality_pivot(&rows, &remaining) else {
            break;
        };
        let pivot = rows[pi].clone(); // positive coefficient on col
        let a = pivot.coeffs[col].clone();
        let mut next = Vec::with_capacity(rows.len());
        for (i, s) in rows.iter().enumerate() {
            if i == pi || i == ni {
                continue;
            }
            let b = s.coeffs[col].clone();
            if b.is_zero() {
                next.push(s.clone());
                continue;
            }
            let coeffs: Vec<BigInt> = s
                .coeffs
                .iter()
                .zip(&pivot.coeffs)
                .map(|(sc, pc)| sc * &a - pc * &b)
                .collect();
            let rhs =
                &s.rhs * Rational::from_integer(a.clone()) - &pivot.rhs * Rational::from_integer(b);
            let mut row = Row {
                coeffs,
                rhs,
                strict: s.strict,
            };
            row.reduce();
            next.push(row);
        }
        pivots.push((col, pivot));
        rows = next;
        remaining.retain(|&c| c != col);
    }
    Presolved {
        residual: LinearSystem {
            vars: sys.vars.clone(),
            index: sys.index.clone(),
            rows,
        },
        pivots,
        infeasible,
        rows_peak,
    }
}

#[derive(Default)]
struct LinForm {
    coeffs: std::collections::BTreeMap<String, i64>,
    constant: i64,
}

fn linearize(t: &Term, sign: i64, out: &mut LinForm) -> Result<(), LinearError> {
    match t {
        Term::Var(v) => {
            *out.coeffs.entry(v.clone()).or_insert(0) += sign;
            Ok(())
        }
        Term::Const(Constant::Zero) => Ok(()),
        Term::Const(Constant::One) => {
            out.constant += sign;
            Ok(())
        }
        Term::Const(Constant::MinusOne) => {
            out.constant -= sign;
            Ok(())
        }
        Term::Const(Constant::Half) => Err(LinearError::NonLinear(crate::parser::print_term(t))),
        Term::Unary(UnaryOp::Neg, inner) => linearize(inner, -sign, out),
        Term::Binary(BinOp::Add, l, r) => {
            linearize(l, sign, out)?;
            linearize(r, sign, out)
        }
        _ => Err(LinearError::NonLinear(crate::parser::print_term(t))),
    }
}

/// A flat conjunction plus a full lattice-case selection: `choices[i]` says,
/// for the i-th atom of the form `x = a /\ b` or `x = a \/ b` in order,
/// whether the left argument is the extremum.
pub fn extract_system(conj: &[Atom], choices: &[bool]) -> Result<LinearSystem, LinearError> {
    let mut sys = LinearSystem::new();
    let mut ci = 0;
    for a in conj {
        match lattice_def(a) {
            Some((x, l, r, meet)) => {
                let left = choices[ci];
                ci += 1;
                sys.add_lattice_case(x, l, r, meet, left);
            }
            None => sys.add_atom(a)?,
        }
    }
    Ok(sys)
}

/// Recognizes defining atoms `x = l (/\ or \/) r` with variable arguments.
pub fn lattice_def(a: &Atom) -> Option<(&str, &str, &str, bool)> {
    if a.rel != Rel::Eq {
        return None;
    }
    let (x, body) = match (&a.left, &a.right) {
        (Term::Var(x), t @ Term::Binary(BinOp::Meet | BinOp::Join, ..)) => (x, t),
        (t @ Term::Binary(BinOp::Meet | BinOp::Join, ..), Term::Var(x)) => (x, t),
        _ => return None,
    };
    if let Term::Binary(op, l, r) = body {
        if let (Term::Var(l), Term::Var(r)) = (&**l, &**r) {
            return Some((x, l, r, *op == BinOp::Meet));
        }
    }
    None
}

pub fn lattice_atom_count(conj: &[Atom]) -> usize {
    conj.iter().filter(|a| lattice_def(a).is_some()).count()
}

struct Bounds {
    lo: Option<(Rational, bool)>,
    hi: Option<(Rational, bool)>,
}

impl Bounds {
    fn none() -> Bounds {
        Bounds { lo: None, hi: None }
    }

    fn add_lo(&mut self, v: Rational, strict: bool) {
        let better = match &self.lo {
            None => true,
            Some((cur, cs)) => v > *cur || (v == *cur && strict && !cs),
        };
        if better {
            self.lo = Some((v, strict));
        }
    }

    fn add_hi(&mut self, v: Rational, strict: bool) {
        let better = match &self.hi {
            None => true,
            Some((cur, cs)) => v < *cur || (v == *cur && strict && !cs),
        };
        if better {
            self.hi = Some((v, strict));
        }
    }

    /// A point of the (nonempty) interval nearest to zero, nudging off
    /// strict endpoints.
    fn pick(&self) -> Rational {
        let zero = Rational::zero();
        let zero_ok = match (&self.lo, &self.hi) {
            (lo, hi) => {
                lo.as_ref()
                    .map(|(v, s)| if *s { *v < zero } else { *v <= zero })
                    .unwrap_or(true)
                    && hi
                        .as_ref()
                        .map(|(v, s)| if *s { zero < *v } else { zero <= *v })
                        .unwrap_or(true)
            }
        };
        if zero_ok {
            return zero;
        }
        match (&self.lo, &self.hi) {
            (Some((lo, ls)), Some((hi, _))) if *lo > zero => {
                if *ls {
                    lo + (hi - lo) / crate::rat::int(2)
                } else {
                    lo.clone()
                }
            }
            (Some((lo, _)), Some((hi, hs))) => {
                // hi < 0 here, mirror case
                if *hs {
                    hi - (hi - lo) / crate::rat::int(2)
                } else {
                    hi.clone()
                }
            }
            (Some((lo, ls)), None) => {
                if *ls {
                    lo + Rational::one()
                } else {
                    lo.clone()
                }
            }
            (None, Some((hi, hs))) => {
                if *hs {
                    hi - Rational::one()
                } else {
                    hi.clone()
                }
            }
            (None, None) => zero,
        }
    }
}

struct Step {
    col: usize,
    rows: Vec<Row>,
}

/// Keeps only the tightest row per coefficient vector; output in coefficient
/// order to keep runs deterministic.
fn dedupe_rows(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort_unstable_by(|a, b| {
        a.coeffs
            .cmp(&b.coeffs)
            .then_with(|| a.rhs.cmp(&b.rhs))
            .then_with(|| b.strict.cmp(&a.strict))
    });
    rows.dedup_by(|second, first| second.coeffs == first.coeffs);
    rows
}

/// Finds a pair of non-strict rows that together form an equality, and a
/// still-remaining column it can eliminate. Returns (positive-coefficient
/// row, negated row, column). Rows are bucketed by a sign-normalized hash so
/// a row and its negation land in the same bucket without any cloning.
fn find_equality_pivot(rows: &[Row], remaining: &[usize]) -> Option<(usize, usize, usize)> {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let key = |r: &Row| -> (bool, u64) {
        let flip = r
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or(false);
        let mut h = DefaultHasher::new();
        for c in &r.coeffs {
            if flip {
                (-c).hash(&mut h);
            } else {
                c.hash(&mut h);
            }
        }
        (flip, h.finish())
    };
    let mut meta: Vec<(bool, u64)> = Vec::with_capacity(rows.len());
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        let k = if r.strict { (false, 0) } else { key(r) };
        if !r.strict {
            buckets.entry(k.1).or_default().push(i);
        }
        meta.push(k);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.strict {
            continue;
        }
        let (fi, h) = meta[i];
        let Some(cands) = buckets.get(&h) else {
            continue;
        };
        for &j in cands {
            if j == i || meta[j].0 == fi {
                continue;
            }
            let s = &rows[j];
            if s.rhs != -r.rhs.clone() || !r.coeffs.iter().zip(&s.coeffs).all(|(a, b)| *a == -b) {
                continue;
            }
            for &col in remaining {
                if r.coeffs[col].is_positive() {
                    return Some((i, j, col));
                }
                if r.coeffs[col].is_negative() {
                    return Some((j, i, col));
                }
            }
        }
    }
    None
}

/// Fourier-Motzkin feasibility. Returns an exact witness on SAT, `None` on
/// UNSAT, or an error when the intermediate row count exceeds `cap`.
pub fn feasible(
    sys: &LinearSystem,
    cap: usize,
) -> Result<Option<HashMap<String, Rational>>, LinearError> {
    feasible_stats(sys, cap).map(|r| r.witness)
}

/// Outcome of one Fourier-Motzkin run, with the peak intermediate row count.
pub struct FmRun {
    pub witness: Option<HashMap<String, Rational>>,
    pub rows_peak: usize,
}

pub fn feasible_stats(sys: &LinearSystem, cap: usize) -> Result<FmRun, LinearError> {
    let ncols = sys.vars.len();
    let mut rows: Vec<Row> = sys.rows.clone();
    for r in &mut rows {
        r.coeffs.resize(ncols, BigInt::zero());
        r.reduce();
    }
    let mut remaining: Vec<usize> = (0..ncols).collect();
    let mut steps: Vec<Step> = Vec::new();
    let mut rows_peak = rows.len();

    while !remaining.is_empty() {
        rows = dedupe_rows(rows);
        // check and drop rows that no longer mention any column
        let mut active = Vec::with_capacity(rows.len());
        for r in rows {
            if r.is_constant() {
                if !r.constant_holds() {
                    return Ok(FmRun {
                        witness: None,
                        rows_peak,
                    });
                }
            } else {
                active.push(r);
            }
        }
        rows = active;
        rows_peak = rows_peak.max(rows.len());

        // prefer a Gaussian pivot on an equality pair: linear, no blowup
        if let Some((pi, ni, col)) = find_equality_pivot(&rows, &remaining) {
            let pivot = rows[pi].clone(); // positive coefficient on col
            let pivot_neg = rows[ni].clone();
            let a = pivot.coeffs[col].clone();
            let mut next = Vec::with_capacity(rows.len());
            for (i, s) in rows.iter().enumerate() {
                if i == pi || i == ni {
                    continue;
                }
                let b = s.coeffs[col].clone();
                if b.is_zero() {
                    next.push(s.clone());
                    continue;
                }
                // scale s by a > 0, then subtract b times the equality
                let coeffs: Vec<BigInt> = s
                    .coeffs
                    .iter()
                    .zip(&pivot.coeffs)
                    .map(|(sc, pc)| sc * &a - pc * &b)
                    .collect();
                let rhs = &s.rhs * Rational::from_integer(a.clone())
                    - &pivot.rhs * Rational::from_integer(b);
                let mut row = Row {
                    coeffs,
                    rhs,
                    strict: s.strict,
                };
                row.reduce();
                next.push(row);
            }
            steps.push(Step {
                col,
                rows: vec![pivot, pivot_neg],
            });
            rows = next;
            remaining.retain(|&c| c != col);
            continue;
        }

        // eliminate the column with the fewest pos*neg combinations
        let (ri, &col) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| {
                let pos = rows.iter().filter(|r| r.coeffs[c].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[c].is_negative()).count();
                (pos * neg, c)
            })
            .unwrap();
        remaining.swap_remove(ri);

        let mut zero = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for r in rows {
            if r.coeffs[col].is_zero() {
                zero.push(r);
            } else if r.coeffs[col].is_positive() {
                pos.push(r);
            } else {
                neg.push(r);
            }
        }
        let mut next = zero;
        for p in &pos {
            for n in &neg {
                // (-n_c) * p + p_c * n eliminates the column
                let a = p.coeffs[col].clone();
                let b = -n.coeffs[col].clone();
                let coeffs: Vec<BigInt> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(pc, nc)| pc * &b + nc * &a)
                    .collect();
                let rhs = &p.rhs * Rational::from_integer(b) + &n.rhs * Rational::from_integer(a);
                let mut row = Row {
                    coeffs,
                    rhs,
                    strict: p.strict || n.strict,
                };
                row.reduce();
                next.push(row);
                if next.len() > cap {
                    return Err(LinearError::RowCap { cap });
                }
            }
        }
        let mut step_rows = pos;
        step_rows.extend(neg);
        steps.push(Step {
            col,
            rows: step_rows,
        });
        rows = next;
        rows_peak = rows_peak.max(rows.len());
    }

    for r in &rows {
        debug_assert!(r.is_constant());
        if !r.constant_holds() {
            return Ok(FmRun {
                witness: None,
                rows_peak,
            });
        }
    }

    // back-substitution in reverse elimination order
    let mut values: Vec<Option<Rational>> = vec![None; ncols];
    for step in steps.iter().rev() {
        let mut bounds = Bounds::none();
        for row in &step.rows {
            let a = &row.coeffs[step.col];
            let mut rest = row.rhs.clone();
            for (i, c) in row.coeffs.iter().enumerate() {
                if i != step.col && !c.is_zero() {
                    let v = values[i]
                        .as_ref()
                        .expect("later-eliminated columns are already valued");
                    rest -= Rational::from_integer(c.clone()) * v;
                }
            }
            let bound = rest / Rational::from_integer(a.clone());
            if a.is_positive() {
                bounds.add_hi(bound, row.strict);
            } else {
                bounds.add_lo(bound, row.strict);
            }
        }
        values[step.col] = Some(bounds.pick());
    }

    let mut out = HashMap::new();
    for (i, name) in sys.vars.iter().enumerate() {
        out.insert(
            name.clone(),
            values[i].clone().unwrap_or_else(Rational::zero),
        );
    }
    Ok(FmRun {
        witness: Some(out),
        rows_peak,
    })
}

/// `(mk)^m`, the Lemma 3.1 witness box for `m` columns and entry bound `k`.
pub fn small_witness_bound(m: u64, k: u64) -> Rational {
    let base = BigInt::from(m) * BigInt::from(k);
    Rational::from_integer(num::pow::pow(base, m as usize))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBox {
    pub m: u64,
    pub bound: Rational,
}

/// Exact `M = ceil(c * N * log2(3cN))`, computed as the bit-size of
/// `(3cN)^(cN)` without floating point.
pub fn witness_box(n_size: u64, c: u64) -> WitnessBox {
    let cn = c * n_size;
    let base = BigInt::from(3 * cn);
    let p = num::pow::pow(base, cn as usize);
    let bits = p.bits();
    // ceil(log2 p) = bits(p) unless p is a power of two
    let pow_of_two = (&p & (&p - 1u8)).is_zero();
    let m = if pow_of_two { bits - 1 } else { bits };
    WitnessBox {
        m,
        bound: pow2(m as i64),
    }
}
