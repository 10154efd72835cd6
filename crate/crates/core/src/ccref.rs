//! Covariant-contravariant refinement relations between finite models.
//!
//! A relation `Z` between the states of a specification `M` and an
//! implementation `N` is a `P`-restricted `(A1, A2)`-refinement when every
//! related pair agrees on the atoms outside `P`, every `M`-transition on an
//! action outside `A2` is matched in `N` (forth) and every `N`-transition on an
//! action outside `A1` is matched in `M` (back). Bisimulation, simulation
//! and plain refinement are the signatures `(∅,∅)`, `(B,∅)` and `(∅,B)`.

use crate::lts::{LtsError, Model, PointedModel};
use crate::stateset::StateSet;
use crate::syntax::{QuantifierSignature, SignatureError};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcrefError {
    #[error("models are over different alphabets")]
    AlphabetMismatch,
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Which clauses apply to which action, by action index.
#[derive(Debug, Clone)]
struct Clauses {
    forth: Vec<usize>,
    back: Vec<usize>,
}

impl Clauses {
    fn new(m: &Model, n: &Model, sig: &QuantifierSignature) -> Result<Clauses, CcrefError> {
        if m.alphabet() != n.alphabet() {
            return Err(CcrefError::AlphabetMismatch);
        }
        sig.check_alphabet(m.alphabet())?;
        let actions = m.alphabet().actions();
        Ok(Clauses {
            forth: (0..actions.len())
                .filter(|&a| !sig.is_contravariant(&actions[a]))
                .collect(),
            back: (0..actions.len())
                .filter(|&a| !sig.is_covariant(&actions[a]))
                .collect(),
        })
    }
}

/// For each state of `m`, the states of `n` that agree with it on every
/// atom outside `restrict`.
fn atom_agreement(m: &Model, n: &Model, restrict: &BTreeSet<String>) -> Vec<StateSet> {
    let atoms: BTreeSet<&str> = m
        .atoms()
        .chain(n.atoms())
        .filter(|x| !restrict.contains(*x))
        .collect();
    let empty_m = StateSet::empty(m.len());
    let empty_n = StateSet::empty(n.len());
    let mut rows = vec![StateSet::full(n.len()); m.len()];
    for x in atoms {
        let in_m = m.atom_set(x).unwrap_or(&empty_m);
        let in_n = n.atom_set(x).unwrap_or(&empty_n);
        let out_n = in_n.complement(n.len());
        for (u, row) in rows.iter_mut().enumerate() {
            row.intersect_with(if in_m.contains(u) { in_n } else { &out_n });
        }
    }
    rows
}

/// Do the forth and back clauses hold at `(u, v)` against `rows`?
fn transfer_ok(m: &Model, n: &Model, c: &Clauses, rows: &[StateSet], u: usize, v: usize) -> bool {
    for &a in &c.forth {
        let targets = n.successors(a, v);
        if m.successors(a, u).iter().any(|u2| !rows[u2].intersects(targets)) {
            return false;
        }
    }
    for &a in &c.back {
        let targets = n.successors(a, v);
        if targets.is_empty() {
            continue;
        }
        let mut matched = StateSet::empty(n.len());
        for u2 in m.successors(a, u) {
            matched.union_with(&rows[u2]);
        }
        if !targets.is_subset(&matched) {
            return false;
        }
    }
    true
}

/// The greatest refinement relation, as one row of `n`-states per state of
/// `m`. Starts from atom agreement and deletes violating pairs in state
/// order until nothing changes.
pub fn largest_refinement_rows(
    m: &Model,
    n: &Model,
    restrict: &BTreeSet<String>,
    sig: &QuantifierSignature,
) -> Result<Vec<StateSet>, CcrefError> {
    let clauses = Clauses::new(m, n, sig)?;
    let mut rows = atom_agreement(m, n, restrict);
    loop {
        let mut changed = false;
        for u in 0..m.len() {
            for v in rows[u].clone().iter() {
                if !transfer_ok(m, n, &clauses, &rows, u, v) {
                    rows[u].remove(v);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(rows);
        }
    }
}

/// Checks the three clauses at every pair of an index-level relation.
pub fn verify_rows(
    rows: &[StateSet],
    m: &Model,
    n: &Model,
    restrict: &BTreeSet<String>,
    sig: &QuantifierSignature,
) -> Result<bool, CcrefError> {
    let clauses = Clauses::new(m, n, sig)?;
    let agree = atom_agreement(m, n, restrict);
    Ok(rows.iter().enumerate().all(|(u, row)| {
        row.is_subset(&agree[u]) && row.iter().all(|v| transfer_ok(m, n, &clauses, rows, u, v))
    }))
}

/// A refinement relation between two named models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementRelation {
    spec_states: Vec<String>,
    impl_states: Vec<String>,
    rows: Vec<StateSet>,
    pub restrict: BTreeSet<String>,
    pub signature: QuantifierSignature,
}

impl RefinementRelation {
    pub fn contains(&self, spec_state: &str, impl_state: &str) -> bool {
        let u = self.spec_states.iter().position(|s| s == spec_state);
        let v = self.impl_states.iter().position(|s| s == impl_state);
        matches!((u, v), (Some(u), Some(v)) if self.rows[u].contains(v))
    }

    pub fn contains_index(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn rows(&self) -> &[StateSet] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(StateSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(StateSet::is_empty)
    }

    /// Related pairs by name, in state order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter()
                    .map(move |v| (self.spec_states[u].clone(), self.impl_states[v].clone()))
            })
            .collect()
    }

    /// The pairs as a JSON list of two-element arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.pairs()).expect("pairs serialise")
    }
}

pub fn largest_refinement(
    m: &Model,
    n: &Model,
    restrict: &BTreeSet<String>,
    sig: &QuantifierSignature,
) -> Result<RefinementRelation, CcrefError> {
    let rows = largest_refinement_rows(m, n, restrict, sig)?;
    Ok(RefinementRelation {
        spec_states: m.states().map(str::to_string).collect(),
        impl_states: n.states().map(str::to_string).collect(),
        rows,
        restrict: restrict.clone(),
        signature: sig.clone(),
    })
}

/// Is `pn` a `restrict`-restricted `sig`-refinement of `pm`?
pub fn refines(
    pm: &PointedModel,
    pn: &PointedModel,
    restrict: &BTreeSet<String>,
    sig: &QuantifierSignature,
) -> Result<bool, CcrefError> {
    let rows = largest_refinement_rows(&pm.model, &pn.model, restrict, sig)?;
    Ok(rows[pm.point()].contains(pn.point()))
}

/// Checks a relation given by state names.
pub fn verify_relation<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    m: &Model,
    n: &Model,
    restrict: &BTreeSet<String>,
    sig: &QuantifierSignature,
) -> Result<bool, CcrefError> {
    let mut rows = vec![StateSet::empty(n.len()); m.len()];
    for (u, v) in pairs {
        rows[m.state_index(u)?].insert(n.state_index(v)?);
    }
    verify_rows(&rows, m, n, restrict, sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ActionAlphabet;

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    fn none() -> BTreeSet<String> {
        BTreeSet::new()
    }

    fn single(name: &str) -> Model {
        Model::new(ab(), [name]).unwrap()
    }

    fn edge(from: &str, action: &str, to: &str) -> Model {
        let mut m = Model::new(ab(), [from, to]).unwrap();
        m.add_transition(from, action, to).unwrap();
        m
    }

    #[test]
    fn empty_and_identity_relations_verify() {
        let m = edge("s", "a", "t");
        let sig = QuantifierSignature::singleton("a", "b");
        assert!(verify_relation([], &m, &m, &none(), &sig).unwrap());
        let id = [("s", "s"), ("t", "t")];
        assert!(verify_relation(id, &m, &m, &none(), &sig).unwrap());
    }

    #[test]
    fn forth_fails_for_an_unmatched_covariant_step() {
        let m = edge("s", "a", "t");
        let n = single("u");
        let sig = QuantifierSignature::singleton("a", "b");
        assert!(!verify_relation([("s", "u")], &m, &n, &none(), &sig).unwrap());
    }

    #[test]
    fn contravariant_steps_may_be_dropped_but_not_added() {
        let sig = QuantifierSignature::singleton("a", "b");
        let m = edge("s", "b", "t");
        let n = single("u");
        assert!(largest_refinement(&m, &n, &none(), &sig).unwrap().contains("s", "u"));
        let m = single("s");
        let n = edge("u", "b", "v");
        assert!(!largest_refinement(&m, &n, &none(), &sig).unwrap().contains("s", "u"));
    }

    #[test]
    fn covariant_steps_may_be_added() {
        let mut m = single("s0");
        m.set_atom("p", ["s0"]).unwrap();
        let mut n = edge("u", "a", "v");
        n.set_atom("p", ["u"]).unwrap();
        let pm = PointedModel::new(m, "s0").unwrap();
        let pn = PointedModel::new(n, "u").unwrap();
        assert!(refines(&pm, &pn, &none(), &QuantifierSignature::singleton("a", "b")).unwrap());
        assert!(!refines(&pm, &pn, &none(), &QuantifierSignature::bisimulation()).unwrap());
    }

    #[test]
    fn restricted_atoms_are_ignored() {
        let mut m = single("s");
        m.set_atom("p", ["s"]).unwrap();
        let n = single("u");
        let sig = QuantifierSignature::bisimulation();
        assert!(!largest_refinement(&m, &n, &none(), &sig).unwrap().contains("s", "u"));
        let p = BTreeSet::from(["p".to_string()]);
        assert!(largest_refinement(&m, &n, &p, &sig).unwrap().contains("s", "u"));
    }

    #[test]
    fn largest_relation_verifies_and_lists_pairs() {
        let mut m = Model::new(ab(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.add_transition("t", "a", "t").unwrap();
        let sig = QuantifierSignature::bisimulation();
        let r = largest_refinement(&m, &m, &none(), &sig).unwrap();
        assert_eq!(r.len(), 4);
        let pairs = r.pairs();
        let refs = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()));
        assert!(verify_relation(refs, &m, &m, &none(), &sig).unwrap());
        assert!(r.to_json().contains("\"t\""));
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let m = single("s");
        let n = Model::new(ActionAlphabet::new(["a"]).unwrap(), ["u"]).unwrap();
        assert_eq!(
            largest_refinement(&m, &n, &none(), &QuantifierSignature::bisimulation()),
            Err(CcrefError::AlphabetMismatch)
        );
    }
}
