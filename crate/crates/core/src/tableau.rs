//! Tableaux and markings for fixpoint-free disjunctive formulas.
//!
//! A tableau decomposes a formula into a tree of formula sets with the rules
//! (and), (or) and (mod); (mod) applies only once the label consists of
//! literals, constants and covers. A marking relates model states to tableau
//! nodes; a consistent marking rooted at the point exists exactly when the
//! point satisfies the formula.

use crate::lts::PointedModel;
use crate::stateset::StateSet;
use crate::syntax::{is_df, Formula};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("formula contains a fixpoint")]
    FixpointPresent,
    #[error("formula contains a refinement quantifier")]
    QuantifierPresent,
    #[error("formula is not in the disjunctive fragment")]
    NotDisjunctive,
    #[error("label holds two covers for action {0:?}")]
    NonUniqueCover(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    And,
    Or,
    Mod,
    /// No rule applies.
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauNode {
    pub label: BTreeSet<Formula>,
    pub rule: Rule,
    pub children: Vec<usize>,
    /// The action of the cover that produced this node, for children of
    /// (mod) nodes.
    pub action: Option<String>,
    pub parent: Option<usize>,
}

impl TableauNode {
    /// Leaves and (mod) nodes.
    pub fn is_modal(&self) -> bool {
        matches!(self.rule, Rule::Mod | Rule::Leaf)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    nodes: Vec<TableauNode>,
    /// Children of each modal node grouped by cover action, including
    /// covers with no members.
    groups: Vec<Vec<(String, Vec<usize>)>>,
}

impl Tableau {
    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[TableauNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &TableauNode {
        &self.nodes[i]
    }

    /// The root and the children of modal nodes.
    pub fn is_choice(&self, i: usize) -> bool {
        match self.nodes[i].parent {
            None => true,
            Some(p) => self.nodes[p].is_modal(),
        }
    }

    /// Graphviz rendering; modal nodes are boxes, edges from (mod) nodes
    /// carry their action.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tableau {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let label: Vec<String> = node.label.iter().map(|f| f.to_string()).collect();
            let shape = if node.is_modal() { "box" } else { "ellipse" };
            let text = format!("{{{}}}", label.join(", ")).replace('"', "\\\"");
            let _ = writeln!(out, "  n{i} [shape={shape}, label=\"{text}\"];");
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                match &self.nodes[c].action {
                    Some(b) => {
                        let _ = writeln!(out, "  n{i} -> n{c} [label=\"{b}\"];");
                    }
                    None => {
                        let _ = writeln!(out, "  n{i} -> n{c};");
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }

    fn group(&self, v: usize) -> Vec<(String, Vec<usize>)> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for f in &self.nodes[v].label {
            if let Formula::Cover(b, _) = f {
                out.entry(b.as_str()).or_default();
            }
        }
        for &c in &self.nodes[v].children {
            if let Some(b) = self.nodes[c].action.as_deref() {
                out.get_mut(b).expect("child of a listed cover").push(c);
            }
        }
        out.into_iter().map(|(b, cs)| (b.to_string(), cs)).collect()
    }
}

/// Builds the tableau of a fixpoint-free disjunctive formula. The first
/// conjunction or disjunction of a label (in formula order) is decomposed
/// first.
pub fn build_tableau(f: &Formula) -> Result<Tableau, TableauError> {
    if f.has_quantifier() {
        return Err(TableauError::QuantifierPresent);
    }
    if f.has_fixpoint() {
        return Err(TableauError::FixpointPresent);
    }
    if !is_df(f).map_err(|_| TableauError::QuantifierPresent)? {
        return Err(TableauError::NotDisjunctive);
    }
    let mut t = Tableau {
        nodes: Vec::new(),
        groups: Vec::new(),
    };
    grow(&mut t, BTreeSet::from([f.clone()]), None, None)?;
    t.groups = (0..t.nodes.len()).map(|v| t.group(v)).collect();
    Ok(t)
}

fn grow(
    t: &mut Tableau,
    label: BTreeSet<Formula>,
    parent: Option<usize>,
    action: Option<String>,
) -> Result<usize, TableauError> {
    let id = t.nodes.len();
    t.nodes.push(TableauNode {
        label: label.clone(),
        rule: Rule::Leaf,
        children: Vec::new(),
        action,
        parent,
    });
    let pick = label
        .iter()
        .find(|g| matches!(g, Formula::And(..) | Formula::Or(..)))
        .cloned();
    let mut children = Vec::new();
    let rule = match pick {
        Some(g) => {
            let mut rest = label.clone();
            rest.remove(&g);
            match g {
                Formula::And(l, r) => {
                    rest.insert(*l);
                    rest.insert(*r);
                    children.push(grow(t, rest, Some(id), None)?);
                    Rule::And
                }
                Formula::Or(l, r) => {
                    let mut left = rest.clone();
                    left.insert(*l);
                    rest.insert(*r);
                    children.push(grow(t, left, Some(id), None)?);
                    children.push(grow(t, rest, Some(id), None)?);
                    Rule::Or
                }
                _ => unreachable!(),
            }
        }
        None => {
            let mut seen = BTreeSet::new();
            let mut any = false;
            for g in &label {
                if let Formula::Cover(b, members) = g {
                    if !seen.insert(b.clone()) {
                        return Err(TableauError::NonUniqueCover(b.clone()));
                    }
                    any = true;
                    for m in members {
                        children.push(grow(t, BTreeSet::from([m.clone()]), Some(id), Some(b.clone()))?);
                    }
                }
            }
            if any {
                Rule::Mod
            } else {
                Rule::Leaf
            }
        }
    };
    t.nodes[id].rule = rule;
    t.nodes[id].children = children;
    Ok(id)
}

/// A relation between model states and tableau nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Marking {
    /// `[state, node]` pairs with state names, as JSON.
    pub fn to_json(&self, pm: &PointedModel) -> String {
        let pairs: Vec<(&str, usize)> = self
            .pairs
            .iter()
            .map(|&(s, v)| (pm.model.state_name(s), v))
            .collect();
        serde_json::to_string(&pairs).expect("pairs serialise")
    }
}

/// Literals and constants of a modal label hold at `s`.
fn locally_consistent(t: &Tableau, pm: &PointedModel, s: usize, v: usize) -> bool {
    t.nodes[v].label.iter().all(|f| match f {
        Formula::Bot => false,
        Formula::Atom(x) => pm.model.atom_set(x).is_some_and(|set| set.contains(s)),
        Formula::Neg(g) => match &**g {
            Formula::Atom(x) => !pm.model.atom_set(x).is_some_and(|set| set.contains(s)),
            Formula::Top => false,
            _ => true,
        },
        _ => true,
    })
}

struct Search<'a> {
    t: &'a Tableau,
    pm: &'a PointedModel,
    /// Indexed by `s * nodes + v`.
    memo: Vec<Option<bool>>,
}

impl Search<'_> {
    /// Can `(s, v)` belong to a consistent marking of the subtree at `v`?
    fn ok(&mut self, s: usize, v: usize) -> bool {
        let key = s * self.t.nodes.len() + v;
        if let Some(r) = self.memo[key] {
            return r;
        }
        let node = &self.t.nodes[v];
        let r = match node.rule {
            Rule::And => self.ok(s, node.children[0]),
            Rule::Or => {
                let (l, r) = (node.children[0], node.children[1]);
                self.ok(s, l) || self.ok(s, r)
            }
            Rule::Mod | Rule::Leaf => {
                let t = self.t;
                locally_consistent(t, self.pm, s, v)
                    && t.groups[v].iter().all(|(b, kids)| {
                        let succ = self.successors(b, s);
                        kids.iter().all(|&c| succ.iter().any(|s2| self.ok(s2, c)))
                            && succ.iter().all(|s2| kids.iter().any(|&c| self.ok(s2, c)))
                    })
            }
        };
        self.memo[key] = Some(r);
        r
    }

    fn successors(&self, b: &str, s: usize) -> StateSet {
        match self.pm.model.alphabet().index_of(b) {
            Some(a) => self.pm.model.successors(a, s).clone(),
            None => StateSet::empty(self.pm.model.len()),
        }
    }

    fn collect(&mut self, s: usize, v: usize, out: &mut BTreeSet<(usize, usize)>) {
        if !out.insert((s, v)) {
            return;
        }
        let node = &self.t.nodes[v];
        match node.rule {
            Rule::And => self.collect(s, node.children[0], out),
            Rule::Or => {
                let c = if self.ok(s, node.children[0]) {
                    node.children[0]
                } else {
                    node.children[1]
                };
                self.collect(s, c, out);
            }
            Rule::Mod | Rule::Leaf => {
                let t = self.t;
                for (b, kids) in &t.groups[v] {
                    for s2 in &self.successors(b, s) {
                        for &c in kids {
                            if self.ok(s2, c) {
                                self.collect(s2, c, out);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// A consistent marking of `t` with respect to `pm`, if one exists.
pub fn find_marking(t: &Tableau, pm: &PointedModel) -> Option<Marking> {
    let mut search = Search {
        t,
        pm,
        memo: vec![None; pm.model.len() * t.nodes.len()],
    };
    if !search.ok(pm.point(), t.root()) {
        return None;
    }
    let mut pairs = BTreeSet::new();
    search.collect(pm.point(), t.root(), &mut pairs);
    Some(Marking { pairs })
}

/// Checks the marking conditions and local consistency directly.
pub fn is_consistent_marking(t: &Tableau, pm: &PointedModel, marking: &Marking) -> bool {
    let has = |s: usize, v: usize| marking.pairs.contains(&(s, v));
    if !has(pm.point(), t.root()) {
        return false;
    }
    let succ = |b: &str, s: usize| match pm.model.alphabet().index_of(b) {
        Some(a) => pm.model.successors(a, s).clone(),
        None => StateSet::empty(pm.model.len()),
    };
    marking.pairs.iter().all(|&(s, v)| {
        let node = &t.nodes[v];
        if !node.is_modal() {
            return node.children.iter().any(|&c| has(s, c));
        }
        locally_consistent(t, pm, s, v)
            && t.groups[v].iter().all(|(b, kids)| {
                let next = succ(b, s);
                kids.iter().all(|&c| next.iter().any(|s2| has(s2, c)))
                    && next.iter().all(|s2| kids.iter().any(|&c| has(s2, c)))
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::Model;
    use crate::syntax::{parse, ActionAlphabet};

    fn ab() -> ActionAlphabet {
        ActionAlphabet::new(["a", "b"]).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse(s, &ab()).unwrap()
    }

    fn m0() -> PointedModel {
        let mut m = Model::new(ab(), ["s0"]).unwrap();
        m.set_atom("p", ["s0"]).unwrap();
        PointedModel::new(m, "s0").unwrap()
    }

    fn m1() -> PointedModel {
        let mut m = Model::new(ab(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.set_atom("p", ["t"]).unwrap();
        PointedModel::new(m, "s").unwrap()
    }

    #[test]
    fn shapes() {
        let t = build_tableau(&f("p")).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert!(t.node(0).is_modal());

        let t = build_tableau(&f("p | q")).unwrap();
        assert_eq!(t.node(0).rule, Rule::Or);
        let labels: Vec<_> = t.node(0).children.iter().map(|&c| t.node(c).label.clone()).collect();
        assert_eq!(labels, [BTreeSet::from([f("p")]), BTreeSet::from([f("q")])]);

        let t = build_tableau(&f("nabla_a {p}")).unwrap();
        assert_eq!(t.node(0).rule, Rule::Mod);
        let child = t.node(0).children[0];
        assert_eq!(t.node(child).label, BTreeSet::from([f("p")]));
        assert_eq!(t.node(child).action.as_deref(), Some("a"));
        assert!(t.is_choice(child));
    }

    #[test]
    fn preconditions() {
        assert_eq!(build_tableau(&f("[a]p")), Err(TableauError::NotDisjunctive));
        assert_eq!(build_tableau(&f("nu q. p")), Err(TableauError::FixpointPresent));
    }

    #[test]
    fn markings() {
        let t = build_tableau(&f("p")).unwrap();
        let mk = find_marking(&t, &m0()).unwrap();
        assert_eq!(mk.pairs, BTreeSet::from([(0, 0)]));

        let t = build_tableau(&f("p & !p")).unwrap();
        assert!(find_marking(&t, &m0()).is_none());

        let t = build_tableau(&f("nabla_a {p}")).unwrap();
        let pm = m1();
        let mk = find_marking(&t, &pm).unwrap();
        assert_eq!(mk.pairs, BTreeSet::from([(0, 0), (1, 1)]));
        assert!(is_consistent_marking(&t, &pm, &mk));
        assert!(t.to_dot().contains("n0 -> n1 [label=\"a\"]"));
    }
}
