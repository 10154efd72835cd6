//! Model checking of quantifier-free formulas on finite models.

use crate::lts::{Model, PointedModel};
use crate::stateset::StateSet;
use crate::syntax::Formula;
use std::collections::BTreeMap;
use thiserror::Error;

/// Interpretation of free letters beyond the model's own valuation.
/// Entries shadow atoms of the same name.
pub type Environment = BTreeMap<String, StateSet>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("formula contains a refinement quantifier; translate it first")]
    QuantifierPresent,
    #[error("letter {0:?} is neither an atom of the model nor bound by the environment")]
    UnboundVariable(String),
    #[error("fixpoint variable {0:?} occurs negatively")]
    NotPositive(String),
}

/// The set of states satisfying `f`.
///
/// Least fixpoints are iterated upward from the empty set and greatest
/// fixpoints downward from the full set; positivity makes both converge in
/// at most `|S|` rounds.
pub fn extension(m: &Model, f: &Formula, env: &Environment) -> Result<StateSet, McError> {
    if f.has_quantifier() {
        return Err(McError::QuantifierPresent);
    }
    f.check_positivity().map_err(McError::NotPositive)?;
    for x in f.free_atoms() {
        if !env.contains_key(&x) && m.atom_set(&x).is_none() {
            return Err(McError::UnboundVariable(x));
        }
    }
    let mut ev = Evaluator {
        m,
        env,
        bound: Vec::new(),
    };
    Ok(ev.eval(f))
}

/// Does the point satisfy `f`?
pub fn check(pm: &PointedModel, f: &Formula) -> Result<bool, McError> {
    Ok(extension(&pm.model, f, &Environment::new())?.contains(pm.point()))
}

struct Evaluator<'a> {
    m: &'a Model,
    env: &'a Environment,
    bound: Vec<(&'a str, StateSet)>,
}

impl<'a> Evaluator<'a> {
    fn n(&self) -> usize {
        self.m.len()
    }

    fn action(&self, a: &str) -> Option<usize> {
        self.m.alphabet().index_of(a)
    }

    fn eval(&mut self, f: &'a Formula) -> StateSet {
        let n = self.n();
        match f {
            Formula::Top => StateSet::full(n),
            Formula::Bot => StateSet::empty(n),
            Formula::Atom(x) => {
                if let Some((_, set)) = self.bound.iter().rev().find(|(name, _)| name == x) {
                    return set.clone();
                }
                self.env
                    .get(x)
                    .or_else(|| self.m.atom_set(x))
                    .cloned()
                    .unwrap_or_else(|| StateSet::empty(n))
            }
            Formula::Neg(g) => self.eval(g).complement(n),
            Formula::And(l, r) => {
                let mut x = self.eval(l);
                if !x.is_empty() {
                    x.intersect_with(&self.eval(r));
                }
                x
            }
            Formula::Or(l, r) => {
                let mut x = self.eval(l);
                x.union_with(&self.eval(r));
                x
            }
            Formula::Boxed(a, g) => {
                let x = self.eval(g);
                self.boxed(a, &x)
            }
            Formula::Diamond(a, g) => {
                let x = self.eval(g);
                self.diamond(a, &x)
            }
            Formula::Cover(a, members) => {
                // □_a ⋁Φ ∧ ⋀ ◇_a φ
                let mut some = StateSet::empty(n);
                let mut out = StateSet::full(n);
                for g in members {
                    let x = self.eval(g);
                    out.intersect_with(&self.diamond(a, &x));
                    some.union_with(&x);
                }
                out.intersect_with(&self.boxed(a, &some));
                out
            }
            Formula::Mu(q, body) => self.fixpoint(q, body, StateSet::empty(n)),
            Formula::Nu(q, body) => self.fixpoint(q, body, StateSet::full(n)),
            Formula::Exists(..) | Formula::Forall(..) => {
                unreachable!("quantifiers are rejected before evaluation")
            }
        }
    }

    fn fixpoint(&mut self, q: &'a str, body: &'a Formula, start: StateSet) -> StateSet {
        let mut x = start;
        loop {
            self.bound.push((q, x.clone()));
            let y = self.eval(body);
            self.bound.pop();
            if y == x {
                return x;
            }
            x = y;
        }
    }

    fn boxed(&self, a: &str, x: &StateSet) -> StateSet {
        let n = self.n();
        match self.action(a) {
            Some(ai) => StateSet::from_indices(
                n,
                (0..n).filter(|&s| self.m.successors(ai, s).is_subset(x)),
            ),
            None => StateSet::full(n),
        }
    }

    fn diamond(&self, a: &str, x: &StateSet) -> StateSet {
        let n = self.n();
        match self.action(a) {
            Some(ai) => StateSet::from_indices(
                n,
                (0..n).filter(|&s| self.m.successors(ai, s).intersects(x)),
            ),
            None => StateSet::empty(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn m2() -> Model {
        let mut m = Model::new(ab(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        m.add_transition("t", "a", "s").unwrap();
        m.set_atom("p", ["t"]).unwrap();
        m
    }

    #[test]
    fn atoms_and_tautologies() {
        let pm = m0();
        assert_eq!(
            extension(&pm.model, &f("p"), &Environment::new()).unwrap(),
            StateSet::singleton(1, 0)
        );
        assert!(check(&pm, &f("p | !p")).unwrap());
    }

    #[test]
    fn diamonds_on_a_single_edge() {
        let mut m = Model::new(ab(), ["s", "t"]).unwrap();
        m.add_transition("s", "a", "t").unwrap();
        assert!(check(&PointedModel::new(m.clone(), "s").unwrap(), &f("<a>true")).unwrap());
        assert!(!check(&PointedModel::new(m, "t").unwrap(), &f("<a>true")).unwrap());
    }

    #[test]
    fn fixpoints_on_a_cycle() {
        let m = m2();
        let env = Environment::new();
        assert!(extension(&m, &f("mu q. <a>q"), &env).unwrap().is_empty());
        assert_eq!(extension(&m, &f("nu q. <a>q"), &env).unwrap(), StateSet::full(2));
        let reach = f("mu q. (p | <a>q)");
        assert!(check(&PointedModel::new(m, "s").unwrap(), &reach).unwrap());
    }

    #[test]
    fn cover_semantics() {
        let m = m2();
        let env = Environment::new();
        // every a-successor is p, and some is p
        assert_eq!(
            extension(&m, &f("nabla_a {p}"), &env).unwrap(),
            StateSet::singleton(2, 0)
        );
        assert_eq!(extension(&m, &f("nabla_b {}"), &env).unwrap(), StateSet::full(2));
        assert!(extension(&m, &f("nabla_a {}"), &env).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let pm = m0();
        assert_eq!(check(&pm, &f("E{a;b} p")), Err(McError::QuantifierPresent));
        assert_eq!(check(&pm, &f("q")), Err(McError::UnboundVariable("q".into())));
        let env = Environment::from([("q".to_string(), StateSet::full(1))]);
        assert!(extension(&pm.model, &f("q & p"), &env).unwrap().contains(0));
    }
}
