use super::{conjuncts, occurs_only_positively, Formula};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfError {
    #[error("formula contains a refinement quantifier")]
    QuantifierPresent,
}

/// Membership in the disjunctive fragment:
///
/// 1. propositional formulas;
/// 2. `α | β` for disjunctive `α`, `β`;
/// 3. `α & nabla_b1 Φ1 & ... & nabla_bn Φn` with `α` propositional (possibly
///    omitted), distinct actions `bi`, and disjunctive members;
/// 4. `mu q. α` / `nu q. α` with `α` disjunctive, `q` positive in `α` and
///    never a direct conjunct `q & γ`.
///
/// The conjunct side condition in (4) is checked syntactically on the
/// flattened conjunction chains of `α`.
pub fn is_df(f: &Formula) -> Result<bool, DfError> {
    if f.has_quantifier() {
        return Err(DfError::QuantifierPresent);
    }
    Ok(df(f))
}

fn df(f: &Formula) -> bool {
    if f.is_propositional() {
        return true;
    }
    match f {
        Formula::Or(l, r) => df(l) && df(r),
        Formula::Cover(_, members) => members.iter().all(df),
        Formula::And(..) => {
            let mut actions = BTreeSet::new();
            conjuncts(f).into_iter().all(|c| match c {
                Formula::Cover(b, members) => actions.insert(b) && members.iter().all(df),
                other => other.is_propositional(),
            })
        }
        Formula::Mu(q, body) | Formula::Nu(q, body) => {
            df(body) && occurs_only_positively(body, q) && !conjoined(body, q)
        }
        _ => false,
    }
}

/// Does `q` occur free as a direct conjunct next to something else?
pub(crate) fn conjoined(f: &Formula, q: &str) -> bool {
    match f {
        Formula::And(..) => {
            let cs = conjuncts(f);
            let direct = cs.iter().any(|c| matches!(c, Formula::Atom(x) if x == q));
            direct || cs.into_iter().any(|c| conjoined(c, q))
        }
        Formula::Mu(r, _) | Formula::Nu(r, _) if r == q => false,
        g => g.children().into_iter().any(|c| conjoined(c, q)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ActionAlphabet};
    use super::*;

    fn check(s: &str) -> bool {
        is_df(&parse(s, &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn cover_guarded_conjunction() {
        assert!(check("p & nabla_a {p}"));
        assert!(check("nabla_a {}"));
        assert!(check("!p & nabla_a {p | q} & nabla_b {nabla_a {}}"));
    }

    #[test]
    fn boxes_are_not_disjunctive_syntax() {
        assert!(!check("[a]p"));
        assert!(!check("p & <a>p"));
        assert!(!check("nabla_a {[b]p}"));
    }

    #[test]
    fn two_covers_for_one_action_are_rejected() {
        assert!(!check("nabla_a {p} & nabla_a {q}"));
    }

    #[test]
    fn fixpoint_variable_must_not_be_a_conjunct() {
        assert!(!check("mu q. (q & p)"));
        assert!(!check("nu q. (q & nabla_a {q})"));
        assert!(check("nu q. (p & nabla_a {q})"));
        assert!(check("mu q. (p | nabla_a {q})"));
        // an inner rebinding hides the outer letter
        assert!(check("nu q. nabla_a {mu q. (q | p)}"));
    }

    #[test]
    fn disjunctions_inside_conjunctions_are_not_df() {
        assert!(!check("p & (nabla_a {} | nabla_a {q})"));
        assert!(check("(p & nabla_a {}) | (p & nabla_a {q})"));
    }

    #[test]
    fn quantifiers_are_an_error() {
        let f = parse("E{a;b} p", &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap();
        assert_eq!(is_df(&f), Err(DfError::QuantifierPresent));
    }
}
