//! Conversion of fixpoint-free formulas into the disjunctive fragment.

use crate::syntax::{is_df, nnf, Formula};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DnfError {
    #[error("formula contains a fixpoint; only fixpoint-free formulas are converted")]
    FixpointPresent,
    #[error("formula contains a refinement quantifier")]
    QuantifierPresent,
    #[error("not in the disjunctive fragment and not convertible: {0}")]
    NotDisjunctive(Formula),
}

/// A conjunction of literals and at most one cover per action.
#[derive(Debug, Clone, Default)]
struct Clause {
    literals: BTreeSet<Formula>,
    covers: BTreeMap<String, Vec<Formula>>,
}

impl Clause {
    fn literal(l: Formula) -> Clause {
        Clause {
            literals: BTreeSet::from([l]),
            ..Clause::default()
        }
    }

    fn cover(action: &str, members: Vec<Formula>) -> Option<Clause> {
        if members.contains(&Formula::Bot) {
            return None;
        }
        Some(Clause {
            covers: BTreeMap::from([(action.to_string(), members)]),
            ..Clause::default()
        })
    }

    fn contradictory(&self) -> bool {
        self.literals.iter().any(|l| match l {
            Formula::Neg(x) => self.literals.contains(x),
            _ => false,
        })
    }

    fn to_formula(&self) -> Formula {
        let mut lits: Vec<&Formula> = self.literals.iter().collect();
        lits.sort_by_cached_key(|l| l.to_string());
        Formula::conj(
            lits.into_iter().cloned().chain(
                self.covers
                    .iter()
                    .map(|(b, ms)| Formula::cover(b.clone(), ms.iter().cloned())),
            ),
        )
    }
}

/// An equivalent formula in the disjunctive fragment.
///
/// Boxes and diamonds become covers (`[b]g` as `nabla_b {} | nabla_b {g}`,
/// `<b>g` as `nabla_b {g, true}`), conjunction is distributed over
/// disjunction, and two covers for the same action are merged with
///
/// `nabla_b Φ & nabla_b Ψ  =  ⋁_R nabla_b {φ & ψ : (φ, ψ) ∈ R}`
///
/// over the relations `R ⊆ Φ × Ψ` that are total on both sides. Members are
/// converted recursively. Contradictory clauses are dropped; the result is
/// not otherwise minimised.
pub fn to_df(f: &Formula) -> Result<Formula, DnfError> {
    if f.has_quantifier() {
        return Err(DnfError::QuantifierPresent);
    }
    if f.has_fixpoint() {
        return Err(DnfError::FixpointPresent);
    }
    Ok(convert(&nnf(f)))
}

fn convert(f: &Formula) -> Formula {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in clauses(f) {
        let g = c.to_formula();
        if seen.insert(g.to_string()) {
            out.push(g);
        }
    }
    Formula::disj(out)
}

fn clauses(f: &Formula) -> Vec<Clause> {
    match f {
        Formula::Top => vec![Clause::default()],
        Formula::Bot => vec![],
        Formula::Atom(_) | Formula::Neg(_) => vec![Clause::literal(f.clone())],
        Formula::Or(l, r) => {
            let mut out = clauses(l);
            out.extend(clauses(r));
            out
        }
        Formula::And(l, r) => {
            let (ls, rs) = (clauses(l), clauses(r));
            let mut out = Vec::new();
            for a in &ls {
                for b in &rs {
                    out.extend(meet(a, b));
                }
            }
            out
        }
        Formula::Boxed(b, g) => {
            let mut out = vec![Clause::default()];
            out[0].covers.insert(b.clone(), Vec::new());
            out.extend(Clause::cover(b, vec![convert(g)]));
            out
        }
        Formula::Diamond(b, g) => Clause::cover(b, canonical(vec![convert(g), Formula::Top]))
            .into_iter()
            .collect(),
        Formula::Cover(b, members) => {
            Clause::cover(b, canonical(members.iter().map(convert).collect()))
                .into_iter()
                .collect()
        }
        Formula::Exists(..) | Formula::Forall(..) | Formula::Mu(..) | Formula::Nu(..) => {
            unreachable!("rejected by to_df")
        }
    }
}

fn canonical(members: Vec<Formula>) -> Vec<Formula> {
    match Formula::cover("_", members) {
        Formula::Cover(_, ms) => ms,
        _ => unreachable!(),
    }
}

/// Conjunction of two clauses, as a disjunction of clauses.
fn meet(a: &Clause, b: &Clause) -> Vec<Clause> {
    let mut base = Clause {
        literals: a.literals.union(&b.literals).cloned().collect(),
        covers: BTreeMap::new(),
    };
    if base.contradictory() {
        return vec![];
    }
    let mut partial = vec![];
    for (action, phi) in &a.covers {
        match b.covers.get(action) {
            None => {
                base.covers.insert(action.clone(), phi.clone());
            }
            Some(psi) => partial.push((action.clone(), cover_meet(phi, psi))),
        }
    }
    for (action, psi) in &b.covers {
        if !a.covers.contains_key(action) {
            base.covers.insert(action.clone(), psi.clone());
        }
    }
    let mut out = vec![base];
    for (action, options) in partial {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for c in &out {
            for members in &options {
                let mut d = c.clone();
                d.covers.insert(action.clone(), members.clone());
                next.push(d);
            }
        }
        out = next;
    }
    out
}

/// Member sets of the covers equivalent to `nabla Φ & nabla Ψ`.
fn cover_meet(phi: &[Formula], psi: &[Formula]) -> Vec<Vec<Formula>> {
    if phi.is_empty() || psi.is_empty() {
        return if phi.is_empty() && psi.is_empty() {
            vec![vec![]]
        } else {
            vec![]
        };
    }
    let (n, k) = (phi.len(), psi.len());
    let cells = n * k;
    assert!(cells < 32, "cover meet of {n} x {k} members is too large");
    let products: Vec<Formula> = (0..cells)
        .map(|c| convert(&nnf(&Formula::and(phi[c / k].clone(), psi[c % k].clone()))))
        .collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for mask in 1u32..(1 << cells) {
        let rows_total = (0..n).all(|i| (0..k).any(|j| mask >> (i * k + j) & 1 == 1));
        let cols_total = (0..k).all(|j| (0..n).any(|i| mask >> (i * k + j) & 1 == 1));
        if !rows_total || !cols_total {
            continue;
        }
        let members: Vec<Formula> = (0..cells)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| products[c].clone())
            .collect();
        if members.contains(&Formula::Bot) {
            continue;
        }
        let members = canonical(members);
        if seen.insert(members.clone()) {
            out.push(members);
        }
    }
    out
}

/// `f` itself when it is already disjunctive, its conversion when it is
/// fixpoint-free, and an error otherwise.
pub fn ensure_df(f: &Formula) -> Result<Formula, DnfError> {
    match is_df(f) {
        Err(_) => Err(DnfError::QuantifierPresent),
        Ok(true) => Ok(f.clone()),
        Ok(false) if !f.has_fixpoint() => to_df(f),
        Ok(false) => Err(DnfError::NotDisjunctive(f.clone())),
    }
}
