//! Exhaustive model universes, grouped into bisimulation classes, and the
//! batched witness table for the refinement quantifier.

use crate::oracle::{bisimulation_classes, refinement_rows, refinement_rows_into, subset_extension_k, Clauses, Masks};
use ccmu::lts::disjoint_union;
use ccmu::search::{EnumerationOptions, RawEnumeration, RawModel};
use ccmu::{refines, ActionAlphabet, Formula, Model, PointedModel, QuantifierSignature};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Every model with at most `max_states` states over an alphabet and atom
/// list, rooted at its first state, with the bisimulation class of each of
/// its states.
pub struct Universe {
    pub alphabet: ActionAlphabet,
    pub atoms: Vec<String>,
    pub models: Vec<Model>,
    pub masks: Vec<Masks>,
    /// `class_of[i][s]` for state `s` of `models[i]`.
    pub class_of: Vec<Vec<usize>>,
    /// One representative per class, all side by side in one model.
    pub reps: Model,
    /// The representative state of each class in `reps`.
    pub class_root: Vec<usize>,
    /// The representative of each class as `(model, state)`.
    pub class_rep: Vec<(usize, usize)>,
    /// Representatives grouped by model: `(model, [(state, class)])`.
    pub rep_groups: Vec<(usize, Vec<(usize, usize)>)>,
}

impl Universe {
    pub fn new(alphabet: &ActionAlphabet, atoms: &[String], max_states: usize) -> Universe {
        let models: Vec<Model> = RawEnumeration::new(
            alphabet.len(),
            atoms.len(),
            max_states,
            EnumerationOptions::default(),
        )
        .map(|raw| raw.to_model(alphabet, atoms))
        .collect();
        let refs: Vec<&Model> = models.iter().collect();
        let blocks = bisimulation_classes(&refs);

        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut source: Vec<(usize, usize)> = Vec::new();
        let mut class_of = Vec::with_capacity(models.len());
        let mut offset = 0;
        for (i, m) in models.iter().enumerate() {
            let row = (0..m.len())
                .map(|s| {
                    let b = blocks[offset + s];
                    *renumber.entry(b).or_insert_with(|| {
                        source.push((i, s));
                        source.len() - 1
                    })
                })
                .collect();
            class_of.push(row);
            offset += m.len();
        }

        // place each source model once, then point at the representative
        let mut placed: BTreeMap<usize, usize> = BTreeMap::new();
        let mut reps: Option<Model> = None;
        for &(i, _) in &source {
            if placed.contains_key(&i) {
                continue;
            }
            let copy = models[i].renamed(|s| format!("m{i}.{s}"));
            let at = reps.as_ref().map_or(0, Model::len);
            placed.insert(i, at);
            reps = Some(match reps {
                None => copy,
                Some(r) => disjoint_union(&r, &copy).expect("fresh names"),
            });
        }
        let reps = reps.expect("at least one model");
        let class_root = source.iter().map(|&(i, s)| placed[&i] + s).collect();
        let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (c, &(i, s)) in source.iter().enumerate() {
            groups.entry(i).or_default().push((s, c));
        }
        let masks = models.iter().map(|m| Masks::from_model(m, atoms)).collect();
        Universe {
            alphabet: alphabet.clone(),
            atoms: atoms.to_vec(),
            models,
            masks,
            class_of,
            reps,
            class_root,
            class_rep: source,
            rep_groups: groups.into_iter().collect(),
        }
    }

    pub fn classes(&self) -> usize {
        self.class_root.len()
    }

    /// Every state is bisimilar to its class representative according to
    /// the refinement checker with the `(∅, ∅)` signature. Returns the
    /// offending `(model, state)` pairs.
    pub fn check_classes(&self) -> Vec<(usize, usize)> {
        let bis = QuantifierSignature::bisimulation();
        let none = BTreeSet::new();
        let mut bad = Vec::new();
        for (i, m) in self.models.iter().enumerate() {
            for s in 0..m.len() {
                let c = self.class_of[i][s];
                let rep = PointedModel::at_index(self.reps.clone(), self.class_root[c]);
                let here = PointedModel::at_index(m.clone(), s);
                if !refines(&here, &rep, &none, &bis).expect("same alphabet") {
                    bad.push((i, s));
                }
            }
        }
        bad
    }
}

/// Root-generated models with at most `max_states` states in which no two
/// states are bisimilar, one per isomorphism class. Every pointed model of
/// that size is bisimilar to one of these, so refinement and formula truth
/// questions over all of them reduce to this list.
pub fn minimal_models(alphabet: &ActionAlphabet, atoms: &[String], max_states: usize) -> Vec<RawModel> {
    let bis = QuantifierSignature::bisimulation();
    RawEnumeration::new(alphabet.len(), atoms.len(), max_states, EnumerationOptions::pruned())
        .filter(|raw| {
            let m = Masks::from_raw(raw, alphabet.actions(), atoms);
            let rows = refinement_rows(&m, &m, &bis);
            rows.iter().enumerate().all(|(u, &r)| r == 1 << u)
        })
        .collect()
}

/// Every model with at most `max_states` states, one per isomorphism class
/// (all permutations, not only those fixing the root). Suited to suites that
/// compare whole extensions.
pub fn models_up_to_iso(actions: usize, atoms: usize, max_states: usize) -> impl Iterator<Item = RawModel> {
    let mut perms: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for k in 1..=max_states {
        perms.push(permutations(k));
    }
    RawEnumeration::new(actions, atoms, max_states, EnumerationOptions::default())
        .filter(move |raw| perms[raw.k].iter().skip(1).all(|p| *raw <= permute(raw, p, actions, atoms)))
}

/// Root-generated models with exactly `k` states and at most `max_edges`
/// transitions, every valuation, without symmetry reduction. A cheap slice
/// of the size-`k` models, for witnesses too large for the exhaustive list.
pub fn sparse_models(actions: usize, atoms: usize, k: usize, max_edges: usize) -> Vec<RawModel> {
    let slots = actions * k * k;
    assert!(slots < 64 && atoms * k < 64);
    let mut masks = Vec::new();
    let mut stack = vec![(0u64, 0usize, 0usize)];
    while let Some((trans, next, used)) = stack.pop() {
        masks.push(trans);
        if used < max_edges {
            for bit in next..slots {
                stack.push((trans | 1 << bit, bit + 1, used + 1));
            }
        }
    }
    masks.sort_unstable();
    let mut out = Vec::new();
    for trans in masks {
        let probe = RawModel { k, trans, val: 0 };
        if !root_generated(&probe, actions) {
            continue;
        }
        out.extend((0..1u64 << (atoms * k)).map(|val| RawModel { k, trans, val }));
    }
    out
}

fn root_generated(raw: &RawModel, actions: usize) -> bool {
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let s = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        for a in 0..actions {
            let new = raw.successor_mask(a, s) & !seen;
            seen |= new;
            frontier |= new;
        }
    }
    seen == (1 << raw.k) - 1
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..k {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    // identity first
    out.sort();
    out
}

fn permute(raw: &RawModel, p: &[usize], actions: usize, atoms: usize) -> RawModel {
    let k = raw.k;
    let mut trans = 0u64;
    for a in 0..actions {
        for s in 0..k {
            for t in 0..k {
                if raw.has_edge(a, s, t) {
                    trans |= 1 << (a * k * k + p[s] * k + p[t]);
                }
            }
        }
    }
    let mut val = 0u64;
    for x in 0..atoms {
        for s in 0..k {
            if raw.holds(x, s) {
                val |= 1 << (x * k + p[s]);
            }
        }
    }
    RawModel { k, trans, val }
}

/// A set of classes as a bit vector.
#[derive(Debug, Clone)]
struct ClassSet(Vec<u64>);

impl ClassSet {
    fn empty(n: usize) -> ClassSet {
        ClassSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> ClassSet {
        let mut s = ClassSet::empty(n);
        for c in 0..n {
            s.insert(c);
        }
        s
    }

    fn insert(&mut self, c: usize) {
        self.0[c / 64] |= 1 << (c % 64);
    }

    fn intersects(&self, other: &ClassSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn remove_all(&mut self, other: &ClassSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| (0..64).filter(move |i| bits >> i & 1 == 1).map(move |i| w * 64 + i))
    }
}

/// For every class of a universe and every `(signature, formula)` key: the
/// size of the smallest candidate that refines the class representative
/// and satisfies the formula at its root, or `None`.
pub struct WitnessTable {
    pub bound: usize,
    keys: HashMap<(QuantifierSignature, Formula), usize>,
    size: Vec<Vec<Option<u8>>>,
    pub candidates: usize,
}

impl WitnessTable {
    /// `candidates` must be ordered by size; those above `bound` states are
    /// skipped. Formulas must be closed and quantifier-free. Truth at a
    /// candidate is decided by the subset semantics and refinement by
    /// [`refinement_rows`], so the table shares nothing with the
    /// elimination it is compared against.
    pub fn build(
        universe: &Universe,
        candidates: &[RawModel],
        keys: &[(QuantifierSignature, Formula)],
        bound: usize,
    ) -> WitnessTable {
        let mut index = HashMap::new();
        let mut formulas: Vec<&Formula> = Vec::new();
        let mut by_sig: BTreeMap<&QuantifierSignature, Vec<(usize, usize)>> = BTreeMap::new();
        for (sig, f) in keys {
            assert!(!f.has_quantifier(), "witness keys are quantifier-free");
            if index.contains_key(&(sig.clone(), f.clone())) {
                continue;
            }
            let key = index.len();
            index.insert((sig.clone(), f.clone()), key);
            let fi = match formulas.iter().position(|g| *g == f) {
                Some(i) => i,
                None => {
                    formulas.push(f);
                    formulas.len() - 1
                }
            };
            by_sig.entry(sig).or_default().push((key, fi));
        }
        let actions = universe.alphabet.actions();
        let classes = universe.classes();
        let mut size = vec![vec![None; index.len()]; classes];
        // classes still without a witness, per key
        let mut open = vec![ClassSet::full(classes); index.len()];
        let clauses: Vec<Clauses> = by_sig.keys().map(|sig| Clauses::new(actions, sig)).collect();
        let mut rows = [0u64; 64];
        let mut used = 0;
        for raw in candidates.iter().filter(|r| r.k <= bound) {
            used += 1;
            let n = Masks::from_raw(raw, actions, &universe.atoms);
            let mut truth: Vec<Option<bool>> = vec![None; formulas.len()];
            for ((_, ks), clauses) in by_sig.iter().zip(&clauses) {
                let mut refined = ClassSet::empty(classes);
                for (i, group) in &universe.rep_groups {
                    let m = &universe.masks[*i];
                    if group.iter().all(|&(s, _)| m.label(s) != n.label(0)) {
                        continue;
                    }
                    refinement_rows_into(m, &n, clauses, &mut rows[..m.n]);
                    for &(s, c) in group {
                        if rows[s] & 1 == 1 {
                            refined.insert(c);
                        }
                    }
                }
                for &(k, fi) in ks {
                    if !refined.intersects(&open[k]) {
                        continue;
                    }
                    let holds = *truth[fi].get_or_insert_with(|| subset_extension_k(&n, formulas[fi]) & 1 == 1);
                    if holds {
                        for c in refined.iter() {
                            size[c][k].get_or_insert(raw.k as u8);
                        }
                        open[k].remove_all(&refined);
                    }
                }
            }
        }
        WitnessTable {
            bound,
            keys: index,
            size,
            candidates: used,
        }
    }

    /// Smallest witness size, `None` when there is none within the bound.
    /// Panics on a key the table was not built for.
    pub fn lookup(&self, class: usize, sig: &QuantifierSignature, f: &Formula) -> Option<usize> {
        let k = self
            .keys
            .get(&(sig.clone(), f.clone()))
            .unwrap_or_else(|| panic!("no witness column for {f}"));
        self.size[class][*k].map(usize::from)
    }

    pub fn has(&self, sig: &QuantifierSignature, f: &Formula) -> bool {
        self.keys.contains_key(&(sig.clone(), f.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccmu::search::witness_search;

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn one_state_universe() {
        let u = Universe::new(&ab(), &["p".to_string()], 1);
        assert_eq!(u.models.len(), 8);
        // the loops and the atom separate all eight
        assert_eq!(u.classes(), 8);
        assert!(u.check_classes().is_empty());
    }

    #[test]
    fn sparse_models_are_rooted_and_sparse() {
        let all = sparse_models(2, 1, 3, 2);
        // two edges reach both other states only as a path or a fork
        assert!(all.iter().all(|r| r.trans.count_ones() <= 2 && root_generated(r, 2)));
        let shapes: std::collections::BTreeSet<u64> = all.iter().map(|r| r.trans).collect();
        // fork: 4 action choices; path 0 -> x -> y: 2 orders times 4
        assert_eq!(shapes.len(), 4 + 8);
        assert_eq!(all.len(), shapes.len() * 8);
    }

    #[test]
    fn iso_classes_of_unlabelled_two_state_graphs() {
        // one action, no atoms: 2 one-state graphs and 10 two-state graphs
        // up to swapping the states
        assert_eq!(models_up_to_iso(1, 0, 2).count(), 2 + 10);
    }

    #[test]
    fn table_agrees_with_single_searches() {
        let atoms = vec!["p".to_string()];
        let u = Universe::new(&ab(), &atoms, 1);
        let cands = minimal_models(&ab(), &atoms, 2);
        // two-state minimal candidates include the a-chain s0 -> s1
        assert!(cands.iter().any(|r| r.k == 2));
        let sig = QuantifierSignature::singleton("a", "b");
        let fs: Vec<Formula> = ["<a>true", "p & <b>true", "nabla_a {p, !p}"]
            .iter()
            .map(|t| ccmu::parse(t, &ab()).unwrap())
            .collect();
        let keys: Vec<_> = fs.iter().map(|f| (sig.clone(), f.clone())).collect();
        let table = WitnessTable::build(&u, &cands, &keys, 2);
        for (i, m) in u.models.iter().enumerate() {
            let pm = PointedModel::at_index(m.clone(), 0);
            for f in &fs {
                let single = witness_search(&pm, &sig, f, 2).unwrap().map(|w| w.model.model.len());
                assert_eq!(table.lookup(u.class_of[i][0], &sig, f), single, "{f} on model {i}");
            }
        }
    }
}
