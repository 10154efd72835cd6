use super::{eliminate, Caps, UndeterminedReason, Verdict};
use crate::lts::{Model, PointedModel};
use crate::mc;
use crate::search::witness_search;
use crate::stateset::StateSet;
use crate::syntax::{nnf, Formula, QuantifierSignature};

/// Model checking with refinement quantifiers.
///
/// The formula is translated with [`eliminate`] and checked exactly. When
/// translation fails and `fallback_bound` is given, quantified subformulas
/// are instead settled state by state with [`witness_search`] up to that
/// many states: a witness for `E` (or a refuting witness for `A`) is
/// conclusive, an exhausted search is not, and the answer is then
/// `Undetermined(BoundExhausted)` unless the rest of the formula decides it.
///
/// Atoms of `f` that the model does not declare are false everywhere.
pub fn check_cc(pm: &PointedModel, f: &Formula, fallback_bound: Option<usize>, caps: &Caps) -> Verdict {
    let mut model = pm.model.clone();
    for x in f.free_atoms() {
        model.declare_atom(&x);
    }
    let pm = PointedModel::at_index(model, pm.point());
    match eliminate(f, caps) {
        Ok(g) => match mc::check(&pm, &g) {
            Ok(b) => Verdict::from_bool(b),
            Err(_) => Verdict::Undetermined(UndeterminedReason::Unsupported),
        },
        Err(e) => match fallback_bound {
            None => Verdict::Undetermined(e.reason()),
            Some(bound) => {
                if f.check_positivity().is_err() {
                    return Verdict::Undetermined(UndeterminedReason::Unsupported);
                }
                let mut ev = Bounds {
                    pm: &pm,
                    bound,
                    caps,
                    stack: Vec::new(),
                };
                let (lo, hi) = ev.eval(f);
                if lo.contains(pm.point()) {
                    Verdict::True
                } else if !hi.contains(pm.point()) {
                    Verdict::False
                } else {
                    Verdict::Undetermined(UndeterminedReason::BoundExhausted)
                }
            }
        },
    }
}

/// Three-valued evaluation: every formula gets a pair `(lo, hi)` of the
/// states where it certainly holds and where it possibly holds.
struct Bounds<'a> {
    pm: &'a PointedModel,
    bound: usize,
    caps: &'a Caps,
    stack: Vec<(&'a str, (StateSet, StateSet))>,
}

impl<'a> Bounds<'a> {
    fn model(&self) -> &'a Model {
        &self.pm.model
    }

    fn eval(&mut self, f: &'a Formula) -> (StateSet, StateSet) {
        let m = self.model();
        let n = m.len();
        let exact = |s: StateSet| (s.clone(), s);
        match f {
            Formula::Top => exact(StateSet::full(n)),
            Formula::Bot => exact(StateSet::empty(n)),
            Formula::Atom(x) => {
                if let Some((_, v)) = self.stack.iter().rev().find(|(q, _)| q == x) {
                    return v.clone();
                }
                exact(m.atom_set(x).cloned().unwrap_or_else(|| StateSet::empty(n)))
            }
            Formula::Neg(g) => {
                let (lo, hi) = self.eval(g);
                (hi.complement(n), lo.complement(n))
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let (l1, h1) = self.eval(l);
                let (l2, h2) = self.eval(r);
                if matches!(f, Formula::And(..)) {
                    (l1.intersection(&l2), h1.intersection(&h2))
                } else {
                    (l1.union(&l2), h1.union(&h2))
                }
            }
            Formula::Boxed(..) | Formula::Diamond(..) | Formula::Cover(..) => {
                // evaluate each bound separately through the exact checker
                let (b, members) = match f {
                    Formula::Boxed(b, g) | Formula::Diamond(b, g) => (b, std::slice::from_ref(&**g)),
                    Formula::Cover(b, ms) => (b, ms.as_slice()),
                    _ => unreachable!(),
                };
                let sets: Vec<(StateSet, StateSet)> = members.iter().map(|g| self.eval(g)).collect();
                let side = |pick: fn(&(StateSet, StateSet)) -> &StateSet| {
                    let xs: Vec<&StateSet> = sets.iter().map(pick).collect();
                    modal(m, f, b, &xs)
                };
                (side(|p| &p.0), side(|p| &p.1))
            }
            Formula::Mu(q, g) | Formula::Nu(q, g) => {
                let start = if matches!(f, Formula::Mu(..)) {
                    StateSet::empty(n)
                } else {
                    StateSet::full(n)
                };
                let mut cur = (start.clone(), start);
                loop {
                    self.stack.push((q, cur.clone()));
                    let next = self.eval(g);
                    self.stack.pop();
                    if next == cur {
                        return cur;
                    }
                    cur = next;
                }
            }
            Formula::Exists(sig, g) => self.quantified(f, sig, g, false),
            Formula::Forall(sig, g) => self.quantified(f, sig, g, true),
        }
    }

    fn quantified(
        &mut self,
        f: &'a Formula,
        sig: &QuantifierSignature,
        g: &Formula,
        universal: bool,
    ) -> (StateSet, StateSet) {
        let m = self.model();
        let n = m.len();
        let closed = !self.stack.iter().any(|(q, _)| f.occurs_free(q));
        if !closed {
            return (StateSet::empty(n), StateSet::full(n));
        }
        if let Ok(h) = eliminate(f, self.caps) {
            if let Ok(s) = mc::extension(m, &h, &mc::Environment::new()) {
                return (s.clone(), s);
            }
        }
        let target = if universal { nnf(&Formula::neg(g.clone())) } else { g.clone() };
        let mut decided = StateSet::empty(n);
        for s in 0..n {
            let at = PointedModel::at_index(m.clone(), s);
            if let Ok(Some(_)) = witness_search(&at, sig, &target, self.bound) {
                decided.insert(s);
            }
        }
        if universal {
            (StateSet::empty(n), decided.complement(n))
        } else {
            (decided, StateSet::full(n))
        }
    }
}

/// Box, diamond or cover over fixed member extensions.
fn modal(m: &Model, f: &Formula, b: &str, xs: &[&StateSet]) -> StateSet {
    let n = m.len();
    let Some(a) = m.alphabet().index_of(b) else {
        return match f {
            Formula::Boxed(..) => StateSet::full(n),
            Formula::Cover(..) if xs.is_empty() => StateSet::full(n),
            _ => StateSet::empty(n),
        };
    };
    let succ = |s: usize| m.successors(a, s);
    let states = 0..n;
    match f {
        Formula::Boxed(..) => StateSet::from_indices(n, states.filter(|&s| succ(s).is_subset(xs[0]))),
        Formula::Diamond(..) => StateSet::from_indices(n, states.filter(|&s| succ(s).intersects(xs[0]))),
        _ => {
            let mut any = StateSet::empty(n);
            for x in xs {
                any.union_with(x);
            }
            StateSet::from_indices(
                n,
                states.filter(|&s| succ(s).is_subset(&any) && xs.iter().all(|x| succ(s).intersects(x))),
            )
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

    fn m0() -> PointedModel {
        let mut m = Model::new(ab(), ["s0"]).unwrap();
        m.set_atom("p", ["s0"]).unwrap();
        PointedModel::new(m, "s0").unwrap()
    }

    fn cc(s: &str, bound: Option<usize>) -> Verdict {
        check_cc(&m0(), &parse(s, &ab()).unwrap(), bound, &Caps::default())
    }

    #[test]
    fn translated_checks() {
        assert_eq!(cc("E{a;b} p", None), Verdict::True);
        assert_eq!(cc("E{a;b} <a>true", None), Verdict::True);
        assert_eq!(cc("E{a;b} <b>true", None), Verdict::False);
        assert_eq!(cc("A{a;b} [a]false", None), Verdict::False);
    }

    #[test]
    fn fallback_search() {
        // not eliminable: a box under a fixpoint that nests another one
        let f = "E{a;b} nu q. (p & [a]q & <a>mu r. (p | <a>r))";
        assert_eq!(
            cc(f, None),
            Verdict::Undetermined(UndeterminedReason::NotDisjunctive)
        );
        assert_eq!(cc(f, Some(2)), Verdict::True);
        assert_eq!(
            cc("E{a;b} nu q. (!p & [a]q & <a>mu r. (p | <a>r))", Some(2)),
            Verdict::Undetermined(UndeterminedReason::BoundExhausted)
        );
        assert_eq!(cc("!p & E{a;b} nu q. (!p & [a]q & <a>mu r. (p | <a>r))", Some(2)), Verdict::False);
    }
}
