//! Bounded enumeration of small models, and witness search for the
//! refinement quantifier by brute force.

use crate::ccref::{largest_refinement, CcrefError, RefinementRelation};
use crate::elim::{eliminate, Caps, ElimError};
use crate::lts::{Model, PointedModel};
use crate::mc;
use crate::stateset::StateSet;
use crate::syntax::{ActionAlphabet, Formula, QuantifierSignature};
use std::collections::BTreeSet;
use thiserror::Error;

/// A model on states `0..k` packed into bit masks: transition `(a, s, t)`
/// is bit `a·k² + s·k + t`, atom `x` holds at `s` when bit `x·k + s` of
/// `val` is set. Atom indices follow the enumeration's atom list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawModel {
    pub k: usize,
    pub trans: u64,
    pub val: u64,
}

impl RawModel {
    #[inline]
    pub fn has_edge(&self, a: usize, s: usize, t: usize) -> bool {
        self.trans >> (a * self.k * self.k + s * self.k + t) & 1 == 1
    }

    #[inline]
    pub fn holds(&self, atom: usize, s: usize) -> bool {
        self.val >> (atom * self.k + s) & 1 == 1
    }

    /// Successor mask of `s` under action `a`.
    #[inline]
    pub fn successor_mask(&self, a: usize, s: usize) -> u64 {
        let k = self.k;
        (self.trans >> (a * k * k + s * k)) & ((1u64 << k) - 1)
    }

    /// Mask of the states where `atom` holds.
    #[inline]
    pub fn atom_mask(&self, atom: usize) -> u64 {
        (self.val >> (atom * self.k)) & ((1u64 << self.k) - 1)
    }

    pub fn to_model(&self, alphabet: &ActionAlphabet, atoms: &[String]) -> Model {
        let k = self.k;
        let succ = (0..alphabet.len())
            .map(|a| {
                (0..k)
                    .map(|s| StateSet::from_mask(k, self.successor_mask(a, s)))
                    .collect()
            })
            .collect();
        let valuation = atoms
            .iter()
            .enumerate()
            .map(|(x, name)| (name.clone(), StateSet::from_mask(k, self.atom_mask(x))))
            .collect();
        let states = (0..k).map(|i| format!("s{i}")).collect();
        Model::from_parts(alphabet.clone(), states, succ, valuation).expect("k >= 1")
    }

    fn reachable_from_root(&self, actions: usize) -> u64 {
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let s = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let mut next = 0;
            for a in 0..actions {
                next |= self.successor_mask(a, s);
            }
            frontier |= next & !seen;
            seen |= next;
        }
        seen
    }

    fn permuted(&self, perm: &[usize], actions: usize, atoms: usize) -> RawModel {
        let k = self.k;
        let mut trans = 0u64;
        let mut bits = self.trans;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (a, s, t) = (i / (k * k), i / k % k, i % k);
            trans |= 1 << (a * k * k + perm[s] * k + perm[t]);
        }
        let mut val = 0u64;
        for x in 0..atoms {
            for s in 0..k {
                if self.holds(x, s) {
                    val |= 1 << (x * k + perm[s]);
                }
            }
        }
        debug_assert!(actions * k * k <= 64);
        RawModel { k, trans, val }
    }
}

/// Filters applied while enumerating. Neither affects which models are
/// represented up to isomorphism and generated submodels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Skip models where some state is unreachable from the root.
    pub root_generated: bool,
    /// Emit only the first model of each isomorphism class (fixing the root)
    /// in enumeration order.
    pub dedup_isomorphs: bool,
}

impl EnumerationOptions {
    pub fn pruned() -> Self {
        EnumerationOptions {
            root_generated: true,
            dedup_isomorphs: true,
        }
    }
}

/// Every model with `1..=max_states` states, by size, then transition mask,
/// then valuation mask. The root is state 0.
#[derive(Debug, Clone)]
pub struct RawEnumeration {
    actions: usize,
    atoms: usize,
    max_states: usize,
    options: EnumerationOptions,
    k: usize,
    trans: u64,
    val: u64,
    perms: Vec<Vec<usize>>,
    trans_ok: bool,
    done: bool,
}

impl RawEnumeration {
    pub fn new(actions: usize, atoms: usize, max_states: usize, options: EnumerationOptions) -> Self {
        assert!(max_states >= 1, "at least one state");
        assert!(
            actions * max_states * max_states <= 63 && atoms * max_states <= 63,
            "model too large for packed enumeration"
        );
        let mut e = RawEnumeration {
            actions,
            atoms,
            max_states,
            options,
            k: 1,
            trans: 0,
            val: 0,
            perms: root_fixing_permutations(1),
            trans_ok: false,
            done: false,
        };
        e.trans_ok = e.transitions_pass();
        e
    }

    fn trans_limit(&self) -> u64 {
        1 << (self.actions * self.k * self.k)
    }

    fn val_limit(&self) -> u64 {
        1 << (self.atoms * self.k)
    }

    fn transitions_pass(&self) -> bool {
        if !self.options.root_generated {
            return true;
        }
        let raw = RawModel {
            k: self.k,
            trans: self.trans,
            val: 0,
        };
        raw.reachable_from_root(self.actions) == (1u64 << self.k) - 1
    }

    fn is_canonical(&self, raw: &RawModel) -> bool {
        self.perms.iter().skip(1).all(|perm| {
            let p = raw.permuted(perm, self.actions, self.atoms);
            (raw.trans, raw.val) <= (p.trans, p.val)
        })
    }

    fn advance(&mut self) {
        self.val += 1;
        if self.val < self.val_limit() {
            return;
        }
        self.val = 0;
        loop {
            self.trans += 1;
            if self.trans >= self.trans_limit() {
                self.trans = 0;
                self.k += 1;
                if self.k > self.max_states {
                    self.done = true;
                    return;
                }
                self.perms = root_fixing_permutations(self.k);
            }
            self.trans_ok = self.transitions_pass();
            if self.trans_ok {
                return;
            }
        }
    }
}

impl Iterator for RawEnumeration {
    type Item = RawModel;

    fn next(&mut self) -> Option<RawModel> {
        while !self.done {
            let raw = RawModel {
                k: self.k,
                trans: self.trans,
                val: self.val,
            };
            let ok = self.trans_ok && (!self.options.dedup_isomorphs || self.is_canonical(&raw));
            self.advance();
            if ok {
                return Some(raw);
            }
        }
        None
    }
}

/// Permutations of `0..k` that fix 0; the identity comes first.
pub fn root_fixing_permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0], &mut (1..k).collect(), &mut out);
    out
}

/// Every pointed model with `1..=max_states` states over the given alphabet
/// and atoms, rooted at its first state `s0`.
pub fn enumerate_models<'a>(
    alphabet: &'a ActionAlphabet,
    atoms: &'a [String],
    max_states: usize,
    options: EnumerationOptions,
) -> impl Iterator<Item = PointedModel> + 'a {
    RawEnumeration::new(alphabet.len(), atoms.len(), max_states, options)
        .map(move |raw| PointedModel::at_index(raw.to_model(alphabet, atoms), 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Relation(#[from] CcrefError),
    #[error("cannot evaluate the formula on candidates: {0}")]
    Undetermined(#[from] ElimError),
    #[error("{0} states are too many for packed enumeration over this alphabet")]
    TooLarge(usize),
}

/// A refinement of the searched pointed model satisfying the formula,
/// together with the largest relation that certifies it.
#[derive(Debug, Clone)]
pub struct Witness {
    pub model: PointedModel,
    pub relation: RefinementRelation,
}

/// The first enumerated `(N, s0)` with at most `max_states` states that
/// `sig`-refines `pm` and satisfies `f`.
///
/// Candidates are enumerated over `pm`'s alphabet and the atoms of `pm` and
/// `f`, keeping only root-generated models and one model per isomorphism
/// class. `None` only says no witness exists within the bound. A formula
/// with quantifiers is translated once up front; failure to translate is an
/// error.
pub fn witness_search(
    pm: &PointedModel,
    sig: &QuantifierSignature,
    f: &Formula,
    max_states: usize,
) -> Result<Option<Witness>, SearchError> {
    let alphabet = pm.model.alphabet();
    sig.check_alphabet(alphabet).map_err(CcrefError::from)?;
    let g = if f.has_quantifier() {
        eliminate(f, &Caps::default())?
    } else {
        f.clone()
    };
    let atoms: Vec<String> = pm
        .model
        .atoms()
        .map(str::to_string)
        .chain(g.free_atoms())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if alphabet.len() * max_states * max_states > 63 || atoms.len() * max_states > 63 {
        return Err(SearchError::TooLarge(max_states));
    }
    let mut spec = pm.model.clone();
    for x in &atoms {
        spec.declare_atom(x);
    }
    let root_atoms: Vec<bool> = atoms
        .iter()
        .map(|x| spec.atom_set(x).is_some_and(|s| s.contains(pm.point())))
        .collect();
    let restrict = BTreeSet::new();
    let candidates = RawEnumeration::new(
        alphabet.len(),
        atoms.len(),
        max_states,
        EnumerationOptions::pruned(),
    );
    for raw in candidates {
        // the atoms clause at the root, before building anything
        if (0..atoms.len()).any(|x| raw.holds(x, 0) != root_atoms[x]) {
            continue;
        }
        let candidate = raw.to_model(alphabet, &atoms);
        let relation = largest_refinement(&spec, &candidate, &restrict, sig)?;
        if !relation.contains_index(pm.point(), 0) {
            continue;
        }
        let pn = PointedModel::at_index(candidate, 0);
        if mc::check(&pn, &g).expect("atoms are declared and g is quantifier-free") {
            return Ok(Some(Witness {
                model: pn,
                relation,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccref::verify_rows;
    use crate::syntax::parse;

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    fn count(actions: &[&str], atoms: usize, n: usize) -> usize {
        let alphabet = ActionAlphabet::new(actions.iter().copied()).unwrap();
        let atoms: Vec<String> = (0..atoms).map(|i| format!("p{i}")).collect();
        enumerate_models(&alphabet, &atoms, n, EnumerationOptions::default()).count()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(count(&["a"], 0, 1), 2);
        assert_eq!(count(&["a", "b"], 1, 1), 8);
        assert_eq!(count(&["a", "b"], 0, 2) - count(&["a", "b"], 0, 1), 256);
    }

    #[test]
    fn pruning_keeps_one_model_per_class() {
        // one action, two states: the edge 0 -> 1 is forced, the other
        // three are free
        let raw = RawEnumeration::new(1, 0, 2, EnumerationOptions::pruned());
        assert_eq!(raw.filter(|r| r.k == 2).count(), 8);
        // three unlabelled states, root fixed: isomorphic copies collapse
        let all = RawEnumeration::new(1, 0, 3, EnumerationOptions {
            root_generated: true,
            dedup_isomorphs: false,
        })
        .filter(|r| r.k == 3)
        .count();
        let dedup = RawEnumeration::new(1, 0, 3, EnumerationOptions::pruned())
            .filter(|r| r.k == 3)
            .count();
        assert!(dedup < all && 2 * dedup >= all);
    }

    fn m0() -> PointedModel {
        let mut m = Model::new(ab(), ["s0"]).unwrap();
        m.set_atom("p", ["s0"]).unwrap();
        PointedModel::new(m, "s0").unwrap()
    }

    #[test]
    fn witness_for_an_atom_is_the_model_itself() {
        let f = parse("p", &ab()).unwrap();
        let w = witness_search(&m0(), &QuantifierSignature::singleton("a", "b"), &f, 2)
            .unwrap()
            .unwrap();
        assert_eq!(w.model.model.len(), 1);
    }

    #[test]
    fn atoms_at_the_root_cannot_change() {
        let f = parse("!p", &ab()).unwrap();
        let sig = QuantifierSignature::singleton("a", "b");
        assert!(witness_search(&m0(), &sig, &f, 3).unwrap().is_none());
    }

    #[test]
    fn covariant_steps_can_be_added() {
        let f = parse("<a>true", &ab()).unwrap();
        let sig = QuantifierSignature::singleton("a", "b");
        let w = witness_search(&m0(), &sig, &f, 2).unwrap().unwrap();
        // the smallest witness is an a-loop at the root
        assert_eq!(w.model.model.len(), 1);
        assert!(w.model.model.successors(0, 0).contains(0));
        assert!(verify_rows(w.relation.rows(), &m0().model, &w.model.model, &BTreeSet::new(), &sig).unwrap());
        let g = parse("<b>true", &ab()).unwrap();
        assert!(witness_search(&m0(), &sig, &g, 3).unwrap().is_none());
    }
}
