use super::Formula;
use std::collections::BTreeSet;

/// Negation normal form: negation only directly above atoms.
///
/// Dual pairs stay explicit (`[b]`/`<b>`, `&`/`|`, `mu`/`nu`, `E`/`A`).
/// A negated cover has no dual constructor and is expanded into boxes and
/// diamonds. Negating a fixpoint flips its bound letter back, so the result
/// still has every bound variable in positive position.
pub fn nnf(f: &Formula) -> Formula {
    go(f, false, &mut Vec::new())
}

// `flipped` holds the fixpoint letters whose binder was crossed under a
// negation; an occurrence of such a letter carries one extra negation.
fn go(f: &Formula, neg: bool, flipped: &mut Vec<(String, bool)>) -> Formula {
    use Formula::*;
    match f {
        Top => {
            if neg {
                Bot
            } else {
                Top
            }
        }
        Bot => {
            if neg {
                Top
            } else {
                Bot
            }
        }
        Atom(x) => {
            let flip = flipped
                .iter()
                .rev()
                .find(|(name, _)| name == x)
                .is_some_and(|(_, fl)| *fl);
            if neg ^ flip {
                Formula::neg(Atom(x.clone()))
            } else {
                Atom(x.clone())
            }
        }
        Neg(g) => go(g, !neg, flipped),
        And(l, r) | Or(l, r) => {
            let (l, r) = (go(l, neg, flipped), go(r, neg, flipped));
            if matches!(f, And(..)) ^ neg {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        Boxed(a, g) | Diamond(a, g) => {
            let g = go(g, neg, flipped);
            if matches!(f, Boxed(..)) ^ neg {
                Formula::boxed(a.clone(), g)
            } else {
                Formula::diamond(a.clone(), g)
            }
        }
        Cover(a, members) => {
            if !neg {
                Formula::cover(a.clone(), members.iter().map(|m| go(m, false, flipped)))
            } else {
                // ¬∇Φ = <b>⋀¬Φ ∨ ⋁[b]¬φ
                let negs: Vec<Formula> = members.iter().map(|m| go(m, true, flipped)).collect();
                let some_bad = Formula::diamond(a.clone(), Formula::conj(negs.iter().cloned()));
                let missing = negs.into_iter().map(|n| Formula::boxed(a.clone(), n));
                Formula::disj(std::iter::once(some_bad).chain(missing))
            }
        }
        Exists(sig, g) | Forall(sig, g) => {
            let g = go(g, neg, flipped);
            if matches!(f, Exists(..)) ^ neg {
                Formula::exists(sig.clone(), g)
            } else {
                Formula::forall(sig.clone(), g)
            }
        }
        Mu(q, g) | Nu(q, g) => {
            flipped.push((q.clone(), neg));
            let body = go(g, neg, flipped);
            flipped.pop();
            if matches!(f, Mu(..)) ^ neg {
                Formula::mu(q.clone(), body)
            } else {
                Formula::nu(q.clone(), body)
            }
        }
    }
}

/// Capture-avoiding substitution of `g` for the free occurrences of `q`.
///
/// A binder whose letter occurs free in `g` is renamed by appending primes
/// until the name is fresh, so the result is deterministic.
pub fn substitute(f: &Formula, q: &str, g: &Formula) -> Formula {
    let g_free = g.free_atoms();
    subst(f, q, g, &g_free)
}

fn subst(f: &Formula, q: &str, g: &Formula, g_free: &BTreeSet<String>) -> Formula {
    use Formula::*;
    match f {
        Atom(x) if x == q => g.clone(),
        Top | Bot | Atom(_) => f.clone(),
        Neg(h) => Formula::neg(subst(h, q, g, g_free)),
        And(l, r) => Formula::and(subst(l, q, g, g_free), subst(r, q, g, g_free)),
        Or(l, r) => Formula::or(subst(l, q, g, g_free), subst(r, q, g, g_free)),
        Boxed(a, h) => Formula::boxed(a.clone(), subst(h, q, g, g_free)),
        Diamond(a, h) => Formula::diamond(a.clone(), subst(h, q, g, g_free)),
        Cover(a, ms) => Formula::cover(a.clone(), ms.iter().map(|m| subst(m, q, g, g_free))),
        Exists(sig, h) => Formula::exists(sig.clone(), subst(h, q, g, g_free)),
        Forall(sig, h) => Formula::forall(sig.clone(), subst(h, q, g, g_free)),
        Mu(r, body) | Nu(r, body) => {
            let rebuild = |name: String, b: Formula| {
                if matches!(f, Mu(..)) {
                    Formula::mu(name, b)
                } else {
                    Formula::nu(name, b)
                }
            };
            if r == q || !body.occurs_free(q) {
                return f.clone();
            }
            if g_free.contains(r) {
                let mut taken = body.all_names();
                taken.extend(g_free.iter().cloned());
                taken.insert(q.to_string());
                let fresh = fresh_name(r, &taken);
                let renamed = subst(body, r, &Formula::Atom(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                rebuild(fresh, subst(&renamed, q, g, g_free))
            } else {
                rebuild(r.clone(), subst(body, q, g, g_free))
            }
        }
    }
}

/// `base'`, `base''`, ... until the name is not in `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ActionAlphabet};
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s, &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    #[test]
    fn de_morgan() {
        assert_eq!(nnf(&p("!(p & q)")), p("!p | !q"));
    }

    #[test]
    fn modal_duality() {
        assert_eq!(nnf(&p("![a]p")), p("<a>!p"));
    }

    #[test]
    fn negated_least_fixpoint() {
        assert_eq!(nnf(&p("!mu q. (p | <a>q)")), p("nu q. (!p & [a]q)"));
    }

    #[test]
    fn nnf_keeps_free_letters_and_quantifier_duals() {
        assert_eq!(nnf(&p("!E{a;b} !q")), p("A{a;b} q"));
        assert_eq!(nnf(&p("!!r")), p("r"));
        assert!(nnf(&p("!nabla_a {p, !q}")).is_nnf());
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(substitute(&p("<a>q"), "q", &p("p")), p("<a>p"));
        assert_eq!(substitute(&p("mu q. (q | r)"), "q", &p("p")), p("mu q. (q | r)"));
        assert_eq!(
            substitute(&p("mu r. (q | <a>r)"), "q", &p("r")),
            p("mu r'. (r | <a>r')")
        );
    }

    #[test]
    fn substituting_a_letter_for_itself_is_identity() {
        let f = p("nu q. (p & [a]q) | mu r. (q | <b>r)");
        assert_eq!(substitute(&f, "q", &p("q")), f);
    }
}
