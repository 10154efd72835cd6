use super::{LtsError, Model, PointedModel};
use crate::stateset::StateSet;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// Why a model fails to be tree-like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    /// Some state reaches itself.
    Cycle(String),
    /// One pair of states is linked by two different actions.
    SharedEdge { from: String, to: String },
    /// A non-root state has several parents (or none).
    Parents(String),
    /// No single state reaches every other state.
    NoUniqueRoot,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::Cycle(s) => write!(f, "state {s:?} lies on a cycle"),
            TreeViolation::SharedEdge { from, to } => {
                write!(f, "{from:?} -> {to:?} is labelled by more than one action")
            }
            TreeViolation::Parents(s) => write!(f, "state {s:?} does not have exactly one parent"),
            TreeViolation::NoUniqueRoot => write!(f, "no unique root reaching every state"),
        }
    }
}

fn check_alphabets(m: &Model, n: &Model) -> Result<(), LtsError> {
    if m.alphabet != n.alphabet {
        return Err(LtsError::AlphabetMismatch);
    }
    Ok(())
}

/// Juxtaposition of two models with disjoint state names. States of `m`
/// keep their indices; those of `n` follow.
pub fn disjoint_union(m: &Model, n: &Model) -> Result<Model, LtsError> {
    check_alphabets(m, n)?;
    if let Some(s) = n.states().find(|s| m.states.contains(*s)) {
        return Err(LtsError::StateClash(s.to_string()));
    }
    let total = m.len() + n.len();
    let shift = |set: &StateSet, offset: usize| {
        StateSet::from_indices(total, set.iter().map(|i| i + offset))
    };
    let mut succ = Vec::with_capacity(m.alphabet.len());
    for a in 0..m.alphabet.len() {
        let mut rows: Vec<StateSet> = m.succ[a].iter().map(|r| shift(r, 0)).collect();
        rows.extend(n.succ[a].iter().map(|r| shift(r, m.len())));
        succ.push(rows);
    }
    let mut valuation: BTreeMap<String, StateSet> = BTreeMap::new();
    for (atom, set) in &m.valuation {
        valuation.insert(atom.clone(), shift(set, 0));
    }
    for (atom, set) in &n.valuation {
        valuation
            .entry(atom.clone())
            .or_insert_with(|| StateSet::empty(total))
            .union_with(&shift(set, m.len()));
    }
    let states = m.states().chain(n.states()).map(str::to_string).collect();
    Model::from_parts(m.alphabet.clone(), states, succ, valuation)
}

/// An isomorphic copy whose state names carry `suffix`.
pub fn copy_rename(pm: &PointedModel, suffix: &str) -> PointedModel {
    let model = pm.model.renamed(|s| format!("{s}{suffix}"));
    PointedModel::at_index(model, pm.point)
}

/// Restriction of `m` to a set of kept states (in original order).
fn restrict(m: &Model, keep: &StateSet) -> Model {
    let index: Vec<usize> = keep.iter().collect();
    let mut position = vec![usize::MAX; m.len()];
    for (new, &old) in index.iter().enumerate() {
        position[old] = new;
    }
    let k = index.len();
    let project = |set: &StateSet| {
        StateSet::from_indices(
            k,
            set.iter().filter(|&i| keep.contains(i)).map(|i| position[i]),
        )
    };
    let succ = m
        .succ
        .iter()
        .map(|rows| index.iter().map(|&s| project(&rows[s])).collect())
        .collect();
    let valuation = m
        .valuation
        .iter()
        .map(|(atom, set)| (atom.clone(), project(set)))
        .collect();
    let states = index.iter().map(|&i| m.states[i].clone()).collect();
    Model::from_parts(m.alphabet.clone(), states, succ, valuation)
        .expect("restriction keeps at least one state")
}

/// The submodel generated by `w`: every state reachable from `w` in zero or
/// more steps.
pub fn generated_submodel(m: &Model, w: &str) -> Result<Model, LtsError> {
    let start = StateSet::singleton(m.len(), m.state_index(w)?);
    let keep = m.reachable_plus(&start).union(&start);
    Ok(restrict(m, &keep))
}

/// Unfolds the part of the model reachable from the point into a tree of
/// paths. A path state is named by its alternating state/action sequence
/// joined with `/`, e.g. `s/a/t`. With `depth` the paths stop after that
/// many transitions; without it a reachable cycle is an error.
pub fn unravel(pm: &PointedModel, depth: Option<usize>) -> Result<PointedModel, LtsError> {
    let m = &pm.model;
    if depth.is_none() {
        let start = StateSet::singleton(m.len(), pm.point);
        let reach = m.reachable_plus(&start).union(&start);
        for s in &reach {
            if m.reachable_plus(&StateSet::singleton(m.len(), s)).contains(s) {
                return Err(LtsError::CyclicWithoutBound(m.state_name(s).to_string()));
            }
        }
    }
    // (path name, end state)
    let mut nodes: Vec<(String, usize)> = vec![(m.state_name(pm.point).to_string(), pm.point)];
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((node, len)) = queue.pop_front() {
        if depth.is_some_and(|d| len >= d) {
            continue;
        }
        let end = nodes[node].1;
        for a in 0..m.alphabet.len() {
            for t in &m.succ[a][end] {
                let name = format!(
                    "{}/{}/{}",
                    nodes[node].0,
                    m.alphabet.actions()[a],
                    m.state_name(t)
                );
                nodes.push((name, t));
                let child = nodes.len() - 1;
                edges.push((node, a, child));
                queue.push_back((child, len + 1));
            }
        }
    }
    let k = nodes.len();
    let mut succ = vec![vec![StateSet::empty(k); k]; m.alphabet.len()];
    for (from, a, to) in edges {
        succ[a][from].insert(to);
    }
    let valuation = m
        .valuation
        .iter()
        .map(|(atom, set)| {
            let ext = nodes
                .iter()
                .enumerate()
                .filter(|(_, (_, end))| set.contains(*end))
                .map(|(i, _)| i);
            (atom.clone(), StateSet::from_indices(k, ext))
        })
        .collect();
    let states = nodes.into_iter().map(|(name, _)| name).collect();
    let model = Model::from_parts(m.alphabet.clone(), states, succ, valuation)?;
    Ok(PointedModel::at_index(model, 0))
}

/// The first violated tree condition, checked in the order: acyclicity,
/// disjoint action relations, unique parents, unique root.
pub fn tree_like_violation(m: &Model) -> Option<TreeViolation> {
    tree_root(m).err()
}

pub fn is_tree_like(m: &Model) -> bool {
    tree_root(m).is_ok()
}

/// The root of a tree-like model.
pub(crate) fn tree_root(m: &Model) -> Result<usize, TreeViolation> {
    let n = m.len();
    let reach: Vec<StateSet> = (0..n)
        .map(|s| m.reachable_plus(&StateSet::singleton(n, s)))
        .collect();
    if let Some(s) = (0..n).find(|&s| reach[s].contains(s)) {
        return Err(TreeViolation::Cycle(m.state_name(s).to_string()));
    }
    let mut parents = vec![StateSet::empty(n); n];
    for s in 0..n {
        let mut seen = StateSet::empty(n);
        for a in 0..m.alphabet.len() {
            let row = &m.succ[a][s];
            if let Some(t) = row.intersection(&seen).first() {
                return Err(TreeViolation::SharedEdge {
                    from: m.state_name(s).to_string(),
                    to: m.state_name(t).to_string(),
                });
            }
            seen.union_with(row);
        }
        for t in &seen {
            parents[t].insert(s);
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&s| parents[s].is_empty()).collect();
    if let Some(t) = (0..n).find(|&t| parents[t].len() > 1) {
        return Err(TreeViolation::Parents(m.state_name(t).to_string()));
    }
    match roots.as_slice() {
        [r] if reach[*r].len() == n - 1 => Ok(*r),
        _ => Err(TreeViolation::NoUniqueRoot),
    }
}

/// Removes every state strictly below `t`; the states of `t` themselves stay.
pub fn prune(m: &Model, t: &BTreeSet<String>) -> Result<Model, LtsError> {
    let below = m.reachable_plus(&m.state_set(t.iter().map(String::as_str))?);
    let keep = below.complement(m.len());
    Ok(restrict(m, &keep))
}

/// Same states and transitions, and the same atoms at every state outside `t`.
pub fn eq_modulo(m: &Model, n: &Model, t: &BTreeSet<String>) -> bool {
    if m.alphabet != n.alphabet
        || m.len() != n.len()
        || m.states().any(|s| n.state_index(s).is_err())
        || m.transition_triples() != n.transition_triples()
    {
        return false;
    }
    m.states()
        .filter(|s| !t.contains(*s))
        .all(|s| m.label(m.state_index(s).unwrap()) == n.label(n.state_index(s).unwrap()))
}

/// Replaces the subtree below each `u` in `w` with the tree `parts[u]`,
/// whose root is merged into `u`. The valuation of `u` becomes that of the
/// part's root.
///
/// Edges into a state removed by the pruning are dropped, as are the extra
/// edges of a graft point that itself lies below another graft point.
pub fn graft(
    pm: &PointedModel,
    w: &BTreeSet<String>,
    parts: &BTreeMap<String, PointedModel>,
) -> Result<Model, LtsError> {
    let m = &pm.model;
    let root = tree_root(m).map_err(LtsError::NotTreeLike)?;
    if root != pm.point {
        return Err(LtsError::NotTreeLike(TreeViolation::NoUniqueRoot));
    }
    let mut names: BTreeSet<&str> = m.states().collect();
    for u in w {
        m.state_index(u)?;
        let part = parts.get(u).ok_or_else(|| LtsError::MissingPart(u.clone()))?;
        check_alphabets(m, &part.model)?;
        let part_root = tree_root(&part.model).map_err(LtsError::NotTreeLike)?;
        if part_root != part.point {
            return Err(LtsError::NotTreeLike(TreeViolation::NoUniqueRoot));
        }
        for s in part.model.states() {
            if !names.insert(s) {
                return Err(LtsError::NotDisjoint(s.to_string()));
            }
        }
    }
    let base = prune(m, w)?;

    let mut states: Vec<String> = base.states().map(str::to_string).collect();
    // offset of each part's states in the new numbering (root excluded)
    let mut offsets: BTreeMap<&str, Vec<Option<usize>>> = BTreeMap::new();
    for u in w {
        let part = &parts[u];
        let mut map = vec![None; part.model.len()];
        for (i, s) in part.model.states().enumerate() {
            if i != part.point {
                map[i] = Some(states.len());
                states.push(s.to_string());
            }
        }
        offsets.insert(u.as_str(), map);
    }
    let k = states.len();
    let actions = m.alphabet.len();
    let mut succ = vec![vec![StateSet::empty(k); k]; actions];
    for (s, a, t) in base.transitions() {
        succ[a][s].insert(t);
    }
    let mut valuation: BTreeMap<String, StateSet> = BTreeMap::new();
    for (atom, set) in &base.valuation {
        let mut ext = StateSet::empty(k);
        for s in set {
            if !w.contains(base.state_name(s)) {
                ext.insert(s);
            }
        }
        valuation.insert(atom.clone(), ext);
    }
    for u in w {
        let part = &parts[u];
        let map = &offsets[u.as_str()];
        let here = base.state_index(u).ok();
        for (s, a, t) in part.model.transitions() {
            let to = map[t].expect("tree-like parts have no edge into their root");
            match map[s] {
                Some(from) => {
                    succ[a][from].insert(to);
                }
                None => {
                    if let Some(h) = here {
                        succ[a][h].insert(to);
                    }
                }
            }
        }
        for (atom, set) in &part.model.valuation {
            let ext = valuation
                .entry(atom.clone())
                .or_insert_with(|| StateSet::empty(k));
            for s in set {
                match map[s] {
                    Some(i) => {
                        ext.insert(i);
                    }
                    None => {
                        if let Some(h) = here {
                            ext.insert(h);
                        }
                    }
                }
            }
        }
    }
    Model::from_parts(m.alphabet.clone(), states, succ, valuation)
}

/// `m` with the extension of `atom` replaced by `t`.
pub fn override_valuation(m: &Model, atom: &str, t: &BTreeSet<String>) -> Result<Model, LtsError> {
    let set = m.state_set(t.iter().map(String::as_str))?;
    let mut out = m.clone();
    out.valuation.insert(atom.to_string(), set);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ActionAlphabet;

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn chain() -> Model {
        let mut m = Model::new(ab(), ["s", "t", "u"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.add_transition("t", "b", "u").unwrap();
        m.set_atom("p", ["u"]).unwrap();
        m
    }

    #[test]
    fn union_and_clash() {
        let m = chain();
        let n = m.renamed(|s| format!("{s}2"));
        let u = disjoint_union(&m, &n).unwrap();
        assert_eq!(u.len(), 6);
        assert_eq!(u.names_of(u.atom_set("p").unwrap()), names(&["u", "u2"]));
        assert_eq!(
            disjoint_union(&m, &m).unwrap_err(),
            LtsError::StateClash("s".into())
        );
    }

    #[test]
    fn generated_submodel_keeps_reachable_part() {
        let m = chain();
        let g = generated_submodel(&m, "t").unwrap();
        assert_eq!(g.states().collect::<Vec<_>>(), ["t", "u"]);
        assert_eq!(g.transition_triples().len(), 1);
    }

    #[test]
    fn unravelling_a_loop() {
        let mut m = Model::new(ActionAlphabet::new(["a"]).unwrap(), ["s"]).unwrap();
        m.add_transition("s", "a", "s").unwrap();
        let pm = PointedModel::new(m, "s").unwrap();
        assert_eq!(
            unravel(&pm, None).unwrap_err(),
            LtsError::CyclicWithoutBound("s".into())
        );
        let u = unravel(&pm, Some(2)).unwrap();
        assert_eq!(
            u.model.states().collect::<Vec<_>>(),
            ["s", "s/a/s", "s/a/s/a/s"]
        );
        assert!(is_tree_like(&u.model));
    }

    #[test]
    fn tree_conditions() {
        assert!(is_tree_like(&chain()));
        let mut two_cycle = Model::new(ab(), ["s", "t"]).unwrap();
        two_cycle.add_transition("s", "a", "t").unwrap();
        two_cycle.add_transition("t", "a", "s").unwrap();
        assert!(matches!(
            tree_like_violation(&two_cycle),
            Some(TreeViolation::Cycle(_))
        ));
        let mut shared = Model::new(ab(), ["s", "t"]).unwrap();
        shared.add_transition("s", "a", "t").unwrap();
        shared.add_transition("s", "b", "t").unwrap();
        assert!(matches!(
            tree_like_violation(&shared),
            Some(TreeViolation::SharedEdge { .. })
        ));
        let mut diamond = Model::new(ab(), ["s", "t", "u", "v"]).unwrap();
        diamond.add_transition("s", "a", "t").unwrap();
        diamond.add_transition("s", "a", "u").unwrap();
        diamond.add_transition("t", "a", "v").unwrap();
        diamond.add_transition("u", "a", "v").unwrap();
        assert_eq!(
            tree_like_violation(&diamond),
            Some(TreeViolation::Parents("v".into()))
        );
        let forest = Model::new(ab(), ["s", "t"]).unwrap();
        assert_eq!(tree_like_violation(&forest), Some(TreeViolation::NoUniqueRoot));
    }

    #[test]
    fn prune_and_equality_modulo() {
        let m = chain();
        let p = prune(&m, &names(&["t"])).unwrap();
        assert_eq!(p.states().collect::<Vec<_>>(), ["s", "t"]);
        let mut n = m.clone();
        n.set_atom("p", []).unwrap();
        assert!(eq_modulo(&m, &n, &names(&["u"])));
        assert!(!eq_modulo(&m, &n, &names(&["t"])));
        assert!(eq_modulo(&m, &m, &BTreeSet::new()));
        assert!(!eq_modulo(&m, &p, &BTreeSet::new()));
    }

    #[test]
    fn grafting_replaces_a_subtree() {
        let m = chain();
        let pm = PointedModel::new(m, "s").unwrap();
        let mut part = Model::new(ab(), ["r", "x"]).unwrap();
        part.add_transition("r", "a", "x").unwrap();
        part.set_atom("q", ["r", "x"]).unwrap();
        let parts = BTreeMap::from([("t".to_string(), PointedModel::new(part, "r").unwrap())]);
        let g = graft(&pm, &names(&["t"]), &parts).unwrap();
        assert_eq!(g.states().collect::<Vec<_>>(), ["s", "t", "x"]);
        assert_eq!(
            g.transition_triples(),
            [("s", "a", "t"), ("t", "a", "x")]
                .iter()
                .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
                .collect()
        );
        assert_eq!(g.names_of(g.atom_set("q").unwrap()), names(&["t", "x"]));
        assert!(g.atom_set("p").unwrap().is_empty());
        assert!(is_tree_like(&g));
    }

    #[test]
    fn graft_rejects_overlap_and_non_trees() {
        let pm = PointedModel::new(chain(), "s").unwrap();
        let part = Model::new(ab(), ["u"]).unwrap();
        let parts = BTreeMap::from([("t".to_string(), PointedModel::new(part, "u").unwrap())]);
        assert_eq!(
            graft(&pm, &names(&["t"]), &parts).unwrap_err(),
            LtsError::NotDisjoint("u".into())
        );
        assert_eq!(
            graft(&pm, &names(&["u"]), &BTreeMap::new()).unwrap_err(),
            LtsError::MissingPart("u".into())
        );
    }

    #[test]
    fn override_then_restore() {
        let m = chain();
        let o = override_valuation(&m, "p", &names(&["s"])).unwrap();
        assert_ne!(o, m);
        assert_eq!(override_valuation(&o, "p", &names(&["u"])).unwrap(), m);
    }
}
