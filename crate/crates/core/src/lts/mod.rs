//! Finite labelled transition systems and the constructions used on them.

mod construct;
mod json;

pub use construct::{
    copy_rename, disjoint_union, eq_modulo, generated_submodel, graft, is_tree_like,
    override_valuation, prune, tree_like_violation, unravel, TreeViolation,
};
pub use json::{ModelFile, TransitionRecord};

use crate::stateset::StateSet;
use crate::syntax::ActionAlphabet;
use indexmap::IndexSet;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("a model needs at least one state")]
    NoStates,
    #[error("duplicate state {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("state {0:?} occurs in both models")]
    StateClash(String),
    #[error("models are over different alphabets")]
    AlphabetMismatch,
    #[error("model is not tree-like: {0}")]
    NotTreeLike(TreeViolation),
    #[error("grafted models share state {0:?}")]
    NotDisjoint(String),
    #[error("no part given for graft point {0:?}")]
    MissingPart(String),
    #[error("model has a cycle reachable from {0:?}; pass a depth bound to unravel it")]
    CyclicWithoutBound(String),
    #[error("invalid model file: {0}")]
    Format(String),
}

/// A finite model: states, one transition relation per action and a
/// valuation of atoms. States are kept in insertion order; that order keys
/// every [`StateSet`] over the model.
#[derive(Clone)]
pub struct Model {
    alphabet: ActionAlphabet,
    states: IndexSet<String>,
    // succ[action][state]
    succ: Vec<Vec<StateSet>>,
    valuation: BTreeMap<String, StateSet>,
}

impl Model {
    pub fn new<I, S>(alphabet: ActionAlphabet, states: I) -> Result<Model, LtsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = IndexSet::new();
        for s in states {
            let s = s.into();
            if !set.insert(s.clone()) {
                return Err(LtsError::DuplicateState(s));
            }
        }
        if set.is_empty() {
            return Err(LtsError::NoStates);
        }
        let n = set.len();
        Ok(Model {
            succ: vec![vec![StateSet::empty(n); n]; alphabet.len()],
            alphabet,
            states: set,
            valuation: BTreeMap::new(),
        })
    }

    /// Assembles a model from index-based parts. `succ` is indexed by action
    /// then state; every set must be over `states.len()` states.
    pub fn from_parts(
        alphabet: ActionAlphabet,
        states: Vec<String>,
        succ: Vec<Vec<StateSet>>,
        valuation: BTreeMap<String, StateSet>,
    ) -> Result<Model, LtsError> {
        let mut m = Model::new(alphabet, states)?;
        debug_assert_eq!(succ.len(), m.alphabet.len());
        m.succ = succ;
        m.valuation = valuation;
        Ok(m)
    }

    pub fn alphabet(&self) -> &ActionAlphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.states.iter().map(String::as_str)
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn state_index(&self, name: &str) -> Result<usize, LtsError> {
        self.states
            .get_index_of(name)
            .ok_or_else(|| LtsError::UnknownState(name.to_string()))
    }

    pub fn action_index(&self, action: &str) -> Result<usize, LtsError> {
        self.alphabet
            .index_of(action)
            .ok_or_else(|| LtsError::UnknownAction(action.to_string()))
    }

    pub fn state_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<StateSet, LtsError> {
        let mut s = StateSet::empty(self.len());
        for name in names {
            s.insert(self.state_index(name)?);
        }
        Ok(s)
    }

    pub fn names_of(&self, set: &StateSet) -> BTreeSet<String> {
        set.iter().map(|i| self.states[i].clone()).collect()
    }

    pub fn add_transition(&mut self, from: &str, action: &str, to: &str) -> Result<(), LtsError> {
        let a = self.action_index(action)?;
        let (f, t) = (self.state_index(from)?, self.state_index(to)?);
        self.succ[a][f].insert(t);
        Ok(())
    }

    /// Declares `atom` (if needed) and makes it true at the given states.
    pub fn set_atom<'a>(
        &mut self,
        atom: &str,
        states: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), LtsError> {
        let set = self.state_set(states)?;
        self.valuation.insert(atom.to_string(), set);
        Ok(())
    }

    pub fn declare_atom(&mut self, atom: &str) {
        let n = self.len();
        self.valuation
            .entry(atom.to_string())
            .or_insert_with(|| StateSet::empty(n));
    }

    /// Successors of state `s` under the action with index `a`.
    #[inline]
    pub fn successors(&self, a: usize, s: usize) -> &StateSet {
        &self.succ[a][s]
    }

    pub fn successor_sets(&self) -> &[Vec<StateSet>] {
        &self.succ
    }

    /// States with at least one outgoing transition, any action.
    pub fn all_successors(&self, s: usize) -> StateSet {
        let mut out = StateSet::empty(self.len());
        for per_action in &self.succ {
            out.union_with(&per_action[s]);
        }
        out
    }

    /// States reachable from `from` in one or more steps.
    pub fn reachable_plus(&self, from: &StateSet) -> StateSet {
        let mut seen = StateSet::empty(self.len());
        let mut frontier: Vec<usize> = from.iter().collect();
        while let Some(s) = frontier.pop() {
            for t in &self.all_successors(s) {
                if seen.insert(t) {
                    frontier.push(t);
                }
            }
        }
        seen
    }

    /// Declared atoms, in name order.
    pub fn atoms(&self) -> impl Iterator<Item = &str> + '_ {
        self.valuation.keys().map(String::as_str)
    }

    pub fn atom_set(&self, atom: &str) -> Option<&StateSet> {
        self.valuation.get(atom)
    }

    pub fn valuation(&self) -> &BTreeMap<String, StateSet> {
        &self.valuation
    }

    /// The atoms true at a state (the dual view of the valuation).
    pub fn label(&self, s: usize) -> BTreeSet<String> {
        self.valuation
            .iter()
            .filter(|(_, set)| set.contains(s))
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(s, set)| set.iter().map(move |t| (s, a, t)))
        })
    }

    /// `(from, action, to)` by name.
    pub fn transition_triples(&self) -> BTreeSet<(String, String, String)> {
        self.transitions()
            .map(|(s, a, t)| {
                (
                    self.states[s].clone(),
                    self.alphabet.actions()[a].clone(),
                    self.states[t].clone(),
                )
            })
            .collect()
    }

    /// Valuation by name with empty extensions dropped.
    pub fn valuation_by_name(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.valuation
            .iter()
            .filter(|(_, set)| !set.is_empty())
            .map(|(a, set)| (a.clone(), self.names_of(set)))
            .collect()
    }

    /// Index-preserving map of state names.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Model {
        let states: IndexSet<String> = self.states.iter().map(|s| f(s)).collect();
        assert_eq!(states.len(), self.states.len(), "renaming must be injective");
        Model {
            alphabet: self.alphabet.clone(),
            states,
            succ: self.succ.clone(),
            valuation: self.valuation.clone(),
        }
    }
}

impl PartialEq for Model {
    /// Equality of the named structure, independent of state order and of
    /// atoms declared with empty extensions.
    fn eq(&self, other: &Model) -> bool {
        self.alphabet == other.alphabet
            && self.states.len() == other.states.len()
            && self.states.iter().all(|s| other.states.contains(s))
            && self.transition_triples() == other.transition_triples()
            && self.valuation_by_name() == other.valuation_by_name()
    }
}

impl Eq for Model {}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("alphabet", &self.alphabet.actions())
            .field("states", &self.states)
            .field("transitions", &self.transition_triples())
            .field("valuation", &self.valuation_by_name())
            .finish()
    }
}

/// A model with a designated current state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedModel {
    pub model: Model,
    point: usize,
}

impl PointedModel {
    pub fn new(model: Model, point: &str) -> Result<PointedModel, LtsError> {
        let point = model.state_index(point)?;
        Ok(PointedModel { model, point })
    }

    pub fn at_index(model: Model, point: usize) -> PointedModel {
        assert!(point < model.len(), "point out of range");
        PointedModel { model, point }
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn point_name(&self) -> &str {
        self.model.state_name(self.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_equality_ignores_state_order_and_empty_atoms() {
        let ab = ActionAlphabet::new(["a"]).unwrap();
        let mut m = Model::new(ab.clone(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.set_atom("p", ["t"]).unwrap();
        let mut n = Model::new(ab, ["t", "s"]).unwrap();
        n.add_transition("s", "a", "t").unwrap();
        n.set_atom("p", ["t"]).unwrap();
        n.declare_atom("q");
        assert_eq!(m, n);
    }

    #[test]
    fn unknown_names_are_errors() {
        let ab = ActionAlphabet::new(["a"]).unwrap();
        let mut m = Model::new(ab.clone(), ["s"]).unwrap();
        assert_eq!(
            m.add_transition("s", "b", "s"),
            Err(LtsError::UnknownAction("b".into()))
        );
        assert_eq!(
            m.set_atom("p", ["x"]),
            Err(LtsError::UnknownState("x".into()))
        );
        assert_eq!(
            Model::new(ab.clone(), ["s", "s"]).unwrap_err(),
            LtsError::DuplicateState("s".into())
        );
        assert_eq!(Model::new(ab, Vec::<String>::new()).unwrap_err(), LtsError::NoStates);
    }
}
