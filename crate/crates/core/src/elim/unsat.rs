use super::{Caps, ElimError, UndeterminedReason, Verdict};
use crate::lts::{Model, PointedModel};
use crate::mc;
use crate::search::{EnumerationOptions, RawEnumeration};
use crate::stateset::StateSet;
use crate::syntax::{nnf, ActionAlphabet, Formula};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::simplify::simplify;

/// Unsatisfiability in the quantifier-free logic: `True` means no pointed
/// model satisfies `f`, `False` that one does.
///
/// Free letters count as atoms. Fixpoint-free formulas are decided exactly
/// by a modal tableau, which builds a tree model of bounded depth when one
/// exists (the model is re-checked with [`mc`]); formulas deeper than
/// `caps.depth` are left undetermined. Formulas with fixpoints are only ever
/// shown satisfiable, by enumerating models up to `caps.states` states and
/// at most `caps.models` candidates.
pub fn unsat_k(f: &Formula, caps: &Caps) -> Result<Verdict, ElimError> {
    if f.has_quantifier() {
        return Err(ElimError::QuantifierPresent);
    }
    if simplify(f) == Formula::Bot {
        return Ok(Verdict::True);
    }
    if !f.has_fixpoint() {
        if f.modal_depth() > caps.depth {
            return Ok(Verdict::Undetermined(UndeterminedReason::BoundExhausted));
        }
        return Ok(match satisfying_tree(f) {
            Some(_) => Verdict::False,
            None => Verdict::True,
        });
    }
    Ok(match small_model(f, caps) {
        Some(_) => Verdict::False,
        None => Verdict::Undetermined(UndeterminedReason::BoundExhausted),
    })
}

fn alphabet_for(f: &Formula) -> ActionAlphabet {
    let actions = f.actions();
    if actions.is_empty() {
        ActionAlphabet::new(["a"]).expect("valid")
    } else {
        ActionAlphabet::new(actions).expect("formula actions are identifiers")
    }
}

/// A pointed model of a fixpoint-free formula, if there is one.
pub fn satisfying_tree(f: &Formula) -> Option<PointedModel> {
    let mut t = Tableau::default();
    let root = t.sat(BTreeSet::from([nnf(f)]))?;
    let alphabet = alphabet_for(f);
    let atoms = f.free_atoms();
    let n = t.nodes.len();
    let states: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let mut succ = vec![vec![StateSet::empty(n); n]; alphabet.len()];
    let mut valuation: BTreeMap<String, StateSet> = atoms
        .iter()
        .map(|x| (x.clone(), StateSet::empty(n)))
        .collect();
    for (i, node) in t.nodes.iter().enumerate() {
        for x in &node.atoms {
            valuation.get_mut(x).expect("atom of f").insert(i);
        }
        for (b, j) in &node.edges {
            succ[alphabet.index_of(b).expect("action of f")][i].insert(*j);
        }
    }
    let model = Model::from_parts(alphabet, states, succ, valuation).expect("non-empty");
    let pm = PointedModel::at_index(model, root);
    assert!(
        mc::check(&pm, f).expect("closed over its atoms"),
        "tableau model does not satisfy {f}"
    );
    Some(pm)
}

#[derive(Default)]
struct Node {
    atoms: BTreeSet<String>,
    edges: Vec<(String, usize)>,
}

#[derive(Default)]
struct Tableau {
    nodes: Vec<Node>,
    memo: HashMap<BTreeSet<Formula>, Option<usize>>,
}

impl Tableau {
    /// A node satisfying every formula of `set` (all in negation normal
    /// form), or `None`.
    fn sat(&mut self, set: BTreeSet<Formula>) -> Option<usize> {
        if let Some(r) = self.memo.get(&set) {
            return *r;
        }
        let r = self.expand(&set);
        self.memo.insert(set, r);
        r
    }

    fn expand(&mut self, set: &BTreeSet<Formula>) -> Option<usize> {
        let pick = set.iter().find(|g| {
            matches!(
                g,
                Formula::Top | Formula::Bot | Formula::And(..) | Formula::Or(..) | Formula::Cover(..)
            )
        });
        if let Some(g) = pick {
            let mut rest = set.clone();
            rest.remove(g);
            return match g {
                Formula::Bot => None,
                Formula::Top => self.sat(rest),
                Formula::And(l, r) => {
                    rest.insert((**l).clone());
                    rest.insert((**r).clone());
                    self.sat(rest)
                }
                Formula::Or(l, r) => {
                    let mut left = rest.clone();
                    left.insert((**l).clone());
                    if let Some(i) = self.sat(left) {
                        return Some(i);
                    }
                    rest.insert((**r).clone());
                    self.sat(rest)
                }
                Formula::Cover(b, members) => {
                    rest.insert(Formula::boxed(b.clone(), Formula::disj(members.iter().cloned())));
                    for m in members {
                        rest.insert(Formula::diamond(b.clone(), m.clone()));
                    }
                    self.sat(rest)
                }
                _ => unreachable!(),
            };
        }
        // only literals and modal formulas remain
        let mut atoms = BTreeSet::new();
        for g in set {
            match g {
                Formula::Atom(x) => {
                    atoms.insert(x.clone());
                }
                Formula::Neg(x) if set.contains(x) => return None,
                _ => {}
            }
        }
        let mut edges = Vec::new();
        for g in set {
            if let Formula::Diamond(b, body) = g {
                let mut child = BTreeSet::from([(**body).clone()]);
                for h in set {
                    if let Formula::Boxed(c, inner) = h {
                        if c == b {
                            child.insert((**inner).clone());
                        }
                    }
                }
                edges.push((b.clone(), self.sat(child)?));
            }
        }
        self.nodes.push(Node { atoms, edges });
        Some(self.nodes.len() - 1)
    }
}

/// A small model of `f` found by enumeration, with a satisfying state.
pub fn small_model(f: &Formula, caps: &Caps) -> Option<(Model, usize)> {
    let alphabet = alphabet_for(f);
    let atoms: Vec<String> = f.free_atoms().into_iter().collect();
    let mut states = caps.states.max(1);
    while states > 1 && (alphabet.len() * states * states > 63 || atoms.len() * states > 63) {
        states -= 1;
    }
    let candidates = RawEnumeration::new(alphabet.len(), atoms.len(), states, EnumerationOptions::pruned());
    for raw in candidates.take(caps.models) {
        let m = raw.to_model(&alphabet, &atoms);
        let ext = mc::extension(&m, f, &mc::Environment::new()).ok()?;
        if let Some(s) = ext.first() {
            return Some((m, s));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn f(s: &str) -> Formula {
        parse(s, &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    fn verdict(s: &str) -> Verdict {
        unsat_k(&f(s), &Caps::default()).unwrap()
    }

    #[test]
    fn exact_fragment() {
        assert_eq!(verdict("false"), Verdict::True);
        assert_eq!(verdict("<a>true"), Verdict::False);
        assert_eq!(verdict("<a>p & [a]!p"), Verdict::True);
        assert_eq!(verdict("nabla_a {p, !p} & [a]p"), Verdict::True);
        assert_eq!(verdict("nabla_a {p, q} & [a]!(p & q)"), Verdict::False);
        assert_eq!(verdict("<a><b>p & [a][b]!p"), Verdict::True);
    }

    #[test]
    fn fixpoints_are_only_shown_satisfiable() {
        assert_eq!(verdict("nu q. (p & <a>q)"), Verdict::False);
        assert_eq!(
            verdict("mu q. <a>q"),
            Verdict::Undetermined(UndeterminedReason::BoundExhausted)
        );
        assert_eq!(verdict("mu q. false"), Verdict::True);
    }

    #[test]
    fn depth_cap() {
        let caps = Caps {
            depth: 1,
            ..Caps::default()
        };
        assert_eq!(
            unsat_k(&f("<a><a>p"), &caps).unwrap(),
            Verdict::Undetermined(UndeterminedReason::BoundExhausted)
        );
    }

    #[test]
    fn tableau_models_are_checked() {
        let pm = satisfying_tree(&f("<a>p & <a>!p & [b]false & nabla_b {}")).unwrap();
        assert!(pm.model.len() >= 3);
    }
}
