//! Formula-level rewrites: Tseitin flattening, negation normal form via
//! trichotomy, and DNF expansion.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{atom_count, formula_size, term_size, Atom, OpenFormula, Rel, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("DNF expansion exceeds the cap of {cap} disjuncts")]
    DnfCap { cap: usize },
}

/// Result of Tseitin flattening: every atom of `formula` has terms of depth
/// at most 1, and `defmap` names the subterm each fresh variable stands for.
#[derive(Debug, Clone)]
pub struct TseitinResult {
    pub formula: OpenFormula,
    pub defmap: BTreeMap<String, Term>,
}

/// Naming state shared across several flattening calls, so identical terms
/// get the same fresh variable regardless of the disjunct they occur in.
pub struct TseitinCtx {
    names: HashMap<Term, String>,
    defs: BTreeMap<String, Term>,
    taken: BTreeSet<String>,
    next: usize,
}

impl TseitinCtx {
    /// `vars`: every variable name already in use, to keep fresh names fresh.
    pub fn new(vars: &BTreeSet<String>) -> TseitinCtx {
        TseitinCtx {
            names: HashMap::new(),
            defs: BTreeMap::new(),
            taken: vars.clone(),
            next: 0,
        }
    }

    fn fresh(&mut self) -> String {
        loop {
            let name = format!("t{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn defmap(&self) -> &BTreeMap<String, Term> {
        &self.defs
    }

    /// The variable naming `t`; original variables name themselves. Emits
    /// the defining atom for `t` (and its subterms) into `defs` on first
    /// sight.
    fn name_of(&mut self, t: &Term) -> String {
        if let Term::Var(v) = t {
            return v.clone();
        }
        if let Some(n) = self.names.get(t) {
            return n.clone();
        }
        let shallow = match t {
            Term::Var(_) => unreachable!(),
            Term::Const(c) => Term::Const(*c),
            Term::Unary(op, inner) => Term::Unary(*op, Box::new(Term::var(self.name_of(inner)))),
            Term::Binary(op, l, r) => Term::Binary(
                *op,
                Box::new(Term::var(self.name_of(l))),
                Box::new(Term::var(self.name_of(r))),
            ),
        };
        let name = self.fresh();
        self.names.insert(t.clone(), name.clone());
        self.defs.insert(name.clone(), shallow);
        name
    }

    /// Flattens one atom; pushes the defining equalities for every fresh
    /// variable it needs into `out`, in first-occurrence order.
    pub fn flatten_atom(&mut self, a: &Atom, out: &mut Vec<Atom>) {
        let before: BTreeSet<String> = self.defs.keys().cloned().collect();
        let l = Term::var(self.name_of(&a.left));
        let r = Term::var(self.name_of(&a.right));
        for (name, def) in &self.defs {
            if !before.contains(name) {
                out.push(Atom::eq(Term::var(name), def.clone()));
            }
        }
        out.push(Atom::new(l, a.rel, r));
    }

    /// Defining atoms for exactly the fresh variables (transitively) used by
    /// the terms of `atoms`, in name order.
    pub fn defs_for(&self, atoms: &[Atom]) -> Vec<Atom> {
        let mut used = BTreeSet::new();
        let mut stack: Vec<String> = Vec::new();
        for a in atoms {
            let mut vs = BTreeSet::new();
            a.left.variables(&mut vs);
            a.right.variables(&mut vs);
            stack.extend(vs);
        }
        while let Some(v) = stack.pop() {
            if self.defs.contains_key(&v) && used.insert(v.clone()) {
                let mut vs = BTreeSet::new();
                self.defs[&v].variables(&mut vs);
                stack.extend(vs);
            }
        }
        used.iter()
            .map(|v| Atom::eq(Term::var(v), self.defs[v].clone()))
            .collect()
    }
}

/// Tseitin variant of `F`: equisatisfiable, every atom of depth at most 1,
/// identical subterms share one fresh variable across the whole formula.
pub fn tseitin(f: &OpenFormula) -> TseitinResult {
    let mut ctx = TseitinCtx::new(&f.variables());
    let skeleton = f.map_atoms(&mut |a| {
        Atom::new(
            Term::var(ctx.name_of(&a.left)),
            a.rel,
            Term::var(ctx.name_of(&a.right)),
        )
    });
    let defs: Vec<OpenFormula> = ctx
        .defs
        .iter()
        .map(|(name, def)| OpenFormula::atom(Atom::eq(Term::var(name), def.clone())))
        .collect();
    let formula = if defs.is_empty() {
        skeleton
    } else {
        let mut parts = vec![skeleton];
        parts.extend(defs);
        OpenFormula::conjoin(parts)
    };
    let input_size = formula_size(f);
    debug_assert!(ctx.defs.len() <= 3 * input_size);
    debug_assert!(atom_count(&formula) <= atom_count(f) + ctx.defs.len());
    TseitinResult {
        formula,
        defmap: ctx.defs,
    }
}

/// Canonical extension of a witness of `F` to a witness of `tseitin(F)`:
/// each fresh variable gets the value of the subterm it names.
pub fn extend_witness(
    defmap: &BTreeMap<String, Term>,
    v: &crate::semantics::Assignment,
    alg: crate::semantics::Algebra,
) -> Result<crate::semantics::Assignment, crate::semantics::EvalError> {
    let mut out = v.clone();
    // defs may reference earlier fresh variables; iterate until closed
    let mut pending: Vec<(&String, &Term)> = defmap.iter().collect();
    while !pending.is_empty() {
        let mut still = Vec::new();
        let mut progressed = false;
        for (name, def) in pending {
            match crate::semantics::eval_term(def, &out, alg) {
                Ok(val) => {
                    out.insert(name.clone(), val);
                    progressed = true;
                }
                Err(crate::semantics::EvalError::Unassigned(_)) => still.push((name, def)),
                Err(e) => return Err(e),
            }
        }
        if !progressed {
            if let Some((name, _)) = still.first() {
                return Err(crate::semantics::EvalError::Unassigned((*name).clone()));
            }
        }
        pending = still;
    }
    Ok(out)
}

/// Negation-free form over ordered structures: `!(l = r)` becomes
/// `(l < r) | (r < l)` by trichotomy, `!(l <= r)` becomes `(r < l)`,
/// `!(l < r)` becomes `(r <= l)`.
pub fn nnf_trichotomy(f: &OpenFormula) -> OpenFormula {
    fn pos(f: &OpenFormula) -> OpenFormula {
        match f {
            OpenFormula::Atom(_) => f.clone(),
            OpenFormula::Not(g) => neg(g),
            OpenFormula::And(l, r) => OpenFormula::and(pos(l), pos(r)),
            OpenFormula::Or(l, r) => OpenFormula::or(pos(l), pos(r)),
        }
    }
    fn neg(f: &OpenFormula) -> OpenFormula {
        match f {
            OpenFormula::Atom(a) => match a.rel {
                Rel::Eq => OpenFormula::or(
                    OpenFormula::atom(Atom::lt(a.left.clone(), a.right.clone())),
                    OpenFormula::atom(Atom::lt(a.right.clone(), a.left.clone())),
                ),
                Rel::Le => OpenFormula::atom(Atom::lt(a.right.clone(), a.left.clone())),
                Rel::Lt => OpenFormula::atom(Atom::le(a.right.clone(), a.left.clone())),
            },
            OpenFormula::Not(g) => pos(g),
            OpenFormula::And(l, r) => OpenFormula::or(neg(l), neg(r)),
            OpenFormula::Or(l, r) => OpenFormula::and(neg(l), neg(r)),
        }
    }
    let out = pos(f);
    debug_assert!(atom_count(&out) <= 2 * atom_count(f));
    out
}

/// DNF of a negation-free formula as a list of flat conjunctions of atoms.
/// Errors when the disjunct count exceeds `cap`.
pub fn dnf(f: &OpenFormula, cap: usize) -> Result<Vec<Vec<Atom>>, TransformError> {
    fn go(f: &OpenFormula, cap: usize) -> Result<Vec<Vec<Atom>>, TransformError> {
        match f {
            OpenFormula::Atom(a) => Ok(vec![vec![a.clone()]]),
            OpenFormula::Not(_) => {
                unreachable!("dnf requires a negation-free input")
            }
            OpenFormula::Or(l, r) => {
                let mut ds = go(l, cap)?;
                ds.extend(go(r, cap)?);
                if ds.len() > cap {
                    return Err(TransformError::DnfCap { cap });
                }
                Ok(ds)
            }
            OpenFormula::And(l, r) => {
                let ls = go(l, cap)?;
                let rs = go(r, cap)?;
                if ls.len().saturating_mul(rs.len()) > cap {
                    return Err(TransformError::DnfCap { cap });
                }
                let mut out = Vec::with_capacity(ls.len() * rs.len());
                for a in &ls {
                    for b in &rs {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        out.push(c);
                    }
                }
                Ok(out)
            }
        }
    }
    go(f, cap)
}

pub const DEFAULT_DNF_CAP: usize = 4096;

/// Flattens each disjunct with fresh variables shared across all of them;
/// every disjunct carries exactly the defining atoms its terms need.
pub fn tseitin_disjuncts(disjuncts: &[Vec<Atom>]) -> (Vec<Vec<Atom>>, BTreeMap<String, Term>) {
    let mut vars = BTreeSet::new();
    for d in disjuncts {
        for a in d {
            a.left.variables(&mut vars);
            a.right.variables(&mut vars);
        }
    }
    let mut ctx = TseitinCtx::new(&vars);
    let flat_tops: Vec<Vec<Atom>> = disjuncts
        .iter()
        .map(|d| {
            d.iter()
                .map(|a| {
                    Atom::new(
                        Term::var(ctx.name_of(&a.left)),
                        a.rel,
                        Term::var(ctx.name_of(&a.right)),
                    )
                })
                .collect()
        })
        .collect();
    let out = flat_tops
        .into_iter()
        .map(|tops| {
            let mut atoms = ctx.defs_for(&tops);
            atoms.extend(tops);
            atoms
        })
        .collect();
    (out, ctx.defs.clone())
}

/// Max leaf count over the terms of a flat conjunction; used for the
/// entry-bound sanity assertions downstream.
pub fn conjunction_size(atoms: &[Atom]) -> usize {
    atoms
        .iter()
        .map(|a| term_size(&a.left) + term_size(&a.right))
        .sum()
}
