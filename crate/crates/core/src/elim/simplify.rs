use crate::syntax::{conjuncts, disjuncts, Formula};

/// Bounded boolean and modal clean-up that preserves the extension on every
/// model:
///
/// * `true`/`false` absorption and unit laws, `!true`, `!false`, `!!g`;
/// * duplicate conjuncts/disjuncts, `x & !x`, `x | !x`;
/// * `<b>false` and covers with a `false` member are `false`;
/// * `<b>true` is dropped next to another `<b>g` conjunct;
/// * binders whose letter does not occur are dropped.
///
/// `[b]true` is kept on purpose: it is the canonical image of a covariant
/// cover with a trivial member.
pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Top | Bot | Atom(_) => f.clone(),
        Neg(g) => match simplify(g) {
            Top => Bot,
            Bot => Top,
            Neg(h) => *h,
            h => Formula::neg(h),
        },
        And(..) => simplify_and(conjuncts(f).into_iter().map(simplify).collect()),
        Or(..) => simplify_or(disjuncts(f).into_iter().map(simplify).collect()),
        Boxed(b, g) => Formula::boxed(b.clone(), simplify(g)),
        Diamond(b, g) => match simplify(g) {
            Bot => Bot,
            h => Formula::diamond(b.clone(), h),
        },
        Cover(b, members) => {
            let ms: Vec<Formula> = members.iter().map(simplify).collect();
            if ms.contains(&Bot) {
                Bot
            } else {
                Formula::cover(b.clone(), ms)
            }
        }
        Exists(sig, g) => Formula::exists(sig.clone(), simplify(g)),
        Forall(sig, g) => Formula::forall(sig.clone(), simplify(g)),
        Mu(q, g) | Nu(q, g) => {
            let body = simplify(g);
            if !body.occurs_free(q) {
                body
            } else if matches!(f, Mu(..)) {
                Formula::mu(q.clone(), body)
            } else {
                Formula::nu(q.clone(), body)
            }
        }
    }
}

fn complementary(items: &[Formula], x: &Formula) -> bool {
    match x {
        Formula::Neg(inner) => items.contains(inner),
        _ => false,
    }
}

fn simplify_and(parts: Vec<Formula>) -> Formula {
    let mut items: Vec<Formula> = Vec::new();
    for p in parts.into_iter().flat_map(|p| conjuncts(&p).into_iter().cloned().collect::<Vec<_>>()) {
        match p {
            Formula::Bot => return Formula::Bot,
            Formula::Top => {}
            p if !items.contains(&p) => items.push(p),
            _ => {}
        }
    }
    if items.iter().any(|x| complementary(&items, x)) {
        return Formula::Bot;
    }
    let keep: Vec<Formula> = items
        .iter()
        .filter(|x| match x {
            Formula::Diamond(b, g) if **g == Formula::Top => !items.iter().any(|y| {
                matches!(y, Formula::Diamond(c, h) if c == b && **h != Formula::Top)
            }),
            _ => true,
        })
        .cloned()
        .collect();
    Formula::conj(keep)
}

fn simplify_or(parts: Vec<Formula>) -> Formula {
    let mut items: Vec<Formula> = Vec::new();
    for p in parts.into_iter().flat_map(|p| disjuncts(&p).into_iter().cloned().collect::<Vec<_>>()) {
        match p {
            Formula::Top => return Formula::Top,
            Formula::Bot => {}
            p if !items.contains(&p) => items.push(p),
            _ => {}
        }
    }
    if items.iter().any(|x| complementary(&items, x)) {
        return Formula::Top;
    }
    Formula::disj(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, ActionAlphabet};

    fn f(s: &str) -> Formula {
        parse(s, &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap()
    }

    #[test]
    fn folds() {
        assert_eq!(simplify(&f("<b>p & <b>true")), f("<b>p"));
        assert_eq!(simplify(&f("<b>true & <a>p")), f("<b>true & <a>p"));
        assert_eq!(simplify(&f("p & true & p")), f("p"));
        assert_eq!(simplify(&f("q | false | !!q")), f("q"));
        assert_eq!(simplify(&f("p & !p")), Formula::Bot);
        assert_eq!(simplify(&f("<a>(p & false)")), Formula::Bot);
        assert_eq!(simplify(&f("[a]true")), f("[a]true"));
        assert_eq!(simplify(&f("nu q. p")), f("p"));
        assert_eq!(simplify(&f("nabla_a {p, false}")), Formula::Bot);
    }
}
