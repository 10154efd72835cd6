//! Elimination of refinement quantifiers.
//!
//! A singleton quantifier `E{a1;a2}` over a disjunctive formula is pushed
//! inwards by the reduction laws of the logic:
//!
//! * propositional formulas are unchanged and `E` distributes over `|`;
//! * `E (α & φ)` is `α & E φ` for propositional `α`, and `E` distributes over
//!   a conjunction of covers for distinct actions;
//! * `E nu q. β` is `nu q. E β`; `E mu q. β` is `mu q. E β` when `mu q. β` is
//!   satisfiable and `false` otherwise;
//! * `E nabla_a1 Γ` is `false` when some member of `Γ` is unsatisfiable and
//!   `[a1] ⋁_{β ∈ Γ} E β` otherwise;
//! * `E nabla_a2 Φ` is `⋀_{φ ∈ Φ} <a2> E φ`;
//! * `E nabla_b Φ` is `nabla_b {E φ : φ ∈ Φ}` for any other action `b`.
//!
//! Free fixpoint letters are treated as atoms. A set signature is expanded
//! into a chain of singleton quantifiers, one per pair of `A1 × A2`.

mod check;
mod simplify;
mod unsat;

pub use check::check_cc;
pub use simplify::simplify;
pub use unsat::{satisfying_tree, small_model, unsat_k};

use crate::dnf::{ensure_df, to_df, DnfError};
use crate::syntax::{conjuncts, is_df, nnf, occurs_only_positively, Formula, QuantifierSignature};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Why a three-valued answer could not be settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UndeterminedReason {
    /// A quantifier's argument is outside the disjunctive fragment.
    NotDisjunctive,
    /// A satisfiability side condition could not be decided within the caps.
    SideConditionUnknown,
    /// A bounded search ran out of states, depth or candidates.
    BoundExhausted,
    /// The formula uses a quantifier form the rewriting does not cover
    /// (an empty side of the signature, or an ill-formed formula).
    Unsupported,
}

impl fmt::Display for UndeterminedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UndeterminedReason::NotDisjunctive => "NotDisjunctive",
            UndeterminedReason::SideConditionUnknown => "SideConditionUnknown",
            UndeterminedReason::BoundExhausted => "BoundExhausted",
            UndeterminedReason::Unsupported => "Unsupported",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Undetermined(UndeterminedReason),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => f.write_str("true"),
            Verdict::False => f.write_str("false"),
            Verdict::Undetermined(r) => write!(f, "undetermined ({r})"),
        }
    }
}

/// Search limits for the bounded side-condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest modal depth decided exactly by the tableau.
    pub depth: usize,
    /// Largest model tried when looking for a model of a fixpoint formula.
    pub states: usize,
    /// Largest number of candidate models tried per formula.
    pub models: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            depth: 6,
            states: 4,
            models: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElimError {
    #[error("formula contains a refinement quantifier")]
    QuantifierPresent,
    #[error("not in the disjunctive fragment: {0}")]
    NotDisjunctive(Formula),
    #[error("cannot decide whether {0} is satisfiable within the caps")]
    SideConditionUnknown(Formula),
    #[error("quantifier {0} has an empty side; only A1 and A2 both non-empty are eliminated")]
    EmptySignature(QuantifierSignature),
    #[error("covariant and contravariant action are both {0:?}")]
    SameAction(String),
}

impl ElimError {
    pub fn reason(&self) -> UndeterminedReason {
        match self {
            ElimError::NotDisjunctive(_) => UndeterminedReason::NotDisjunctive,
            ElimError::SideConditionUnknown(_) => UndeterminedReason::SideConditionUnknown,
            ElimError::QuantifierPresent
            | ElimError::EmptySignature(_)
            | ElimError::SameAction(_) => UndeterminedReason::Unsupported,
        }
    }
}

/// The formulas [`eliminate_one`] accepts: the disjunctive fragment, plus
/// conjunctions `α & φ` of a propositional `α` with one eliminable `φ`.
pub fn eliminable(f: &Formula) -> bool {
    if f.has_quantifier() {
        return false;
    }
    if f.is_propositional() {
        return true;
    }
    match f {
        Formula::Or(l, r) => eliminable(l) && eliminable(r),
        Formula::Cover(_, ms) => ms.iter().all(eliminable),
        Formula::And(..) => {
            let cs = conjuncts(f);
            let covers: Vec<&Formula> = cs
                .iter()
                .copied()
                .filter(|c| matches!(c, Formula::Cover(..)))
                .collect();
            let others: Vec<&Formula> = cs
                .iter()
                .copied()
                .filter(|c| !c.is_propositional() && !matches!(c, Formula::Cover(..)))
                .collect();
            match (covers.is_empty(), others.as_slice()) {
                (_, []) => {
                    let actions: std::collections::BTreeSet<&str> = covers
                        .iter()
                        .map(|c| match c {
                            Formula::Cover(b, _) => b.as_str(),
                            _ => unreachable!(),
                        })
                        .collect();
                    actions.len() == covers.len() && covers.iter().all(|c| eliminable(c))
                }
                (true, [one]) => eliminable(one),
                _ => false,
            }
        }
        Formula::Mu(q, body) | Formula::Nu(q, body) => {
            eliminable(body)
                && occurs_only_positively(body, q)
                && !crate::syntax::conjoined(body, q)
        }
        _ => false,
    }
}

/// Rewrites `E{a1;a2} f` into an equivalent quantifier-free formula.
///
/// `f` must be [`eliminable`]. Satisfiability side conditions are settled
/// with [`unsat_k`]; an undecided one is an error naming the subformula.
/// The output is not simplified.
pub fn eliminate_one(a1: &str, a2: &str, f: &Formula, caps: &Caps) -> Result<Formula, ElimError> {
    if a1 == a2 {
        return Err(ElimError::SameAction(a1.to_string()));
    }
    if !eliminable(f) {
        return Err(ElimError::NotDisjunctive(f.clone()));
    }
    Eliminator { a1, a2, caps }.go(f)
}

struct Eliminator<'a> {
    a1: &'a str,
    a2: &'a str,
    caps: &'a Caps,
}

impl Eliminator<'_> {
    fn go(&self, f: &Formula) -> Result<Formula, ElimError> {
        if f.is_propositional() {
            return Ok(f.clone());
        }
        match f {
            Formula::Or(l, r) => Ok(Formula::or(self.go(l)?, self.go(r)?)),
            Formula::Nu(q, body) => Ok(Formula::nu(q.clone(), self.go(body)?)),
            Formula::Mu(q, body) => match unsat_k(f, self.caps)? {
                Verdict::True => Ok(Formula::Bot),
                Verdict::False => Ok(Formula::mu(q.clone(), self.go(body)?)),
                Verdict::Undetermined(_) => Err(ElimError::SideConditionUnknown(f.clone())),
            },
            Formula::Cover(b, members) => self.cover(b, members),
            Formula::And(..) => {
                let mut out = Vec::new();
                for c in conjuncts(f) {
                    out.push(match c {
                        c if c.is_propositional() => c.clone(),
                        Formula::Cover(b, members) => self.cover(b, members)?,
                        other => self.go(other)?,
                    });
                }
                Ok(Formula::conj(out))
            }
            _ => Err(ElimError::NotDisjunctive(f.clone())),
        }
    }

    fn cover(&self, b: &str, members: &[Formula]) -> Result<Formula, ElimError> {
        if b == self.a1 {
            let mut unknown = None;
            for m in members {
                match unsat_k(m, self.caps)? {
                    Verdict::True => return Ok(Formula::Bot),
                    Verdict::False => {}
                    Verdict::Undetermined(_) => unknown = unknown.or(Some(m)),
                }
            }
            if let Some(m) = unknown {
                return Err(ElimError::SideConditionUnknown(m.clone()));
            }
            let inner = members.iter().map(|m| self.go(m)).collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::boxed(b, Formula::disj(inner)))
        } else if b == self.a2 {
            let parts = members
                .iter()
                .map(|m| Ok(Formula::diamond(b, self.go(m)?)))
                .collect::<Result<Vec<_>, ElimError>>()?;
            Ok(Formula::conj(parts))
        } else {
            let inner = members.iter().map(|m| self.go(m)).collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::cover(b, inner))
        }
    }
}

/// A quantifier-free formula equivalent to `f`.
///
/// Quantifiers are removed innermost first. `A{sig} g` is handled as
/// `!E{sig} !g`. A signature `(A1, A2)` becomes the chain of singleton
/// quantifiers over `A1 × A2` in lexicographic order; the innermost link is
/// eliminated first. Each argument is taken as is when eliminable and
/// otherwise brought into the disjunctive fragment by [`ensure_df`].
pub fn eliminate(f: &Formula, caps: &Caps) -> Result<Formula, ElimError> {
    let out = match f {
        Formula::Top | Formula::Bot | Formula::Atom(_) => f.clone(),
        Formula::Neg(g) => Formula::neg(eliminate(g, caps)?),
        Formula::And(l, r) => Formula::and(eliminate(l, caps)?, eliminate(r, caps)?),
        Formula::Or(l, r) => Formula::or(eliminate(l, caps)?, eliminate(r, caps)?),
        Formula::Boxed(b, g) => Formula::boxed(b.clone(), eliminate(g, caps)?),
        Formula::Diamond(b, g) => Formula::diamond(b.clone(), eliminate(g, caps)?),
        Formula::Cover(b, ms) => Formula::cover(
            b.clone(),
            ms.iter().map(|m| eliminate(m, caps)).collect::<Result<Vec<_>, _>>()?,
        ),
        Formula::Mu(q, g) => Formula::mu(q.clone(), eliminate(g, caps)?),
        Formula::Nu(q, g) => Formula::nu(q.clone(), eliminate(g, caps)?),
        Formula::Exists(sig, g) => exists(sig, &eliminate(g, caps)?, caps)?,
        Formula::Forall(sig, g) => {
            let negated = nnf(&Formula::neg(eliminate(g, caps)?));
            nnf(&Formula::neg(exists(sig, &negated, caps)?))
        }
    };
    Ok(simplify(&out))
}

fn exists(sig: &QuantifierSignature, g: &Formula, caps: &Caps) -> Result<Formula, ElimError> {
    if sig.cov.is_empty() || sig.contra.is_empty() {
        return Err(ElimError::EmptySignature(sig.clone()));
    }
    let mut cur = g.clone();
    for (a1, a2) in sig.singleton_pairs().iter().rev() {
        let arg = if eliminable(&cur) || is_df(&cur) == Ok(true) {
            cur
        } else {
            match ensure_df(&cur) {
                Ok(g) => g,
                Err(DnfError::QuantifierPresent) => return Err(ElimError::QuantifierPresent),
                Err(_) => reshape_fixpoints(&cur)
                    .filter(eliminable)
                    .ok_or_else(|| ElimError::NotDisjunctive(cur.clone()))?,
            }
        };
        let next = eliminate_one(a1, a2, &arg, caps)?;
        // the next link may need df syntax, which folding can destroy
        cur = if is_df(&next) == Ok(true) { next } else { simplify(&next) };
    }
    Ok(cur)
}

/// Brings a fixpoint formula into df syntax when every fixpoint body is
/// fixpoint-free: the body is converted with the bound variable read as an
/// atom, which leaves the fixpoint unchanged. Earlier links of a chain leave
/// boxes and diamonds in such bodies.
fn reshape_fixpoints(f: &Formula) -> Option<Formula> {
    match f {
        _ if !f.has_fixpoint() => to_df(f).ok(),
        Formula::Or(l, r) => Some(Formula::or(reshape_fixpoints(l)?, reshape_fixpoints(r)?)),
        Formula::Mu(q, g) if !g.has_fixpoint() => Some(Formula::mu(q.clone(), to_df(g).ok()?)),
        Formula::Nu(q, g) if !g.has_fixpoint() => Some(Formula::nu(q.clone(), to_df(g).ok()?)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, ActionAlphabet};

    fn f(s: &str) -> Formula {
        parse(s, &ActionAlphabet::new(["a", "b", "c"]).unwrap()).unwrap()
    }

    fn one(s: &str) -> Formula {
        eliminate_one("a", "b", &f(s), &Caps::default()).unwrap()
    }

    fn tr(s: &str) -> Formula {
        eliminate(&f(s), &Caps::default()).unwrap()
    }

    #[test]
    fn single_quantifier_cases() {
        assert_eq!(one("p"), f("p"));
        assert_eq!(one("nabla_a {true}"), f("[a]true"));
        assert_eq!(one("nabla_b {p}"), f("<b>p"));
        assert_eq!(one("nabla_a {}"), f("[a]false"));
        assert_eq!(one("nabla_b {}"), f("true"));
        assert_eq!(one("nabla_a {p, p & !p}"), f("false"));
        assert_eq!(one("nabla_c {p, nabla_b {q}}"), f("nabla_c {p, <b>q}"));
        assert_eq!(
            one("nu q. (p & (nabla_a {} | nabla_a {q}))"),
            f("nu q. (p & ([a]false | [a]q))")
        );
    }

    #[test]
    fn least_fixpoints_need_a_decided_side_condition() {
        assert_eq!(
            one("mu q. (p | nabla_c {q})"),
            f("mu q. (p | nabla_c {q})")
        );
        assert!(matches!(
            eliminate_one("a", "b", &f("mu q. nabla_c {q}"), &Caps::default()),
            Err(ElimError::SideConditionUnknown(_))
        ));
    }

    #[test]
    fn rejects_non_disjunctive_arguments() {
        assert!(matches!(
            eliminate_one("a", "b", &f("[a]p"), &Caps::default()),
            Err(ElimError::NotDisjunctive(_))
        ));
        assert!(matches!(
            eliminate(&f("E{a;b} mu q. (p & nu r. [a]r)"), &Caps::default()),
            Err(ElimError::NotDisjunctive(_))
        ));
    }

    #[test]
    fn fixpoint_bodies_are_reshaped() {
        // [a]q becomes nabla_a {} | nabla_a {q}, and a1 = a turns both back into boxes
        assert_eq!(tr("E{a;b} mu q. [a]q"), f("mu q. ([a]false | [a]q)"));
        assert_eq!(tr("E{a,c;b} nu q. (p & nabla_a {q})"), f("nu q. (p & [a]q)"));
        assert_eq!(tr("E{a;b,c} nu q. (nabla_a {q} & nabla_b {})"), f("nu q. ([a]false | [a]q)"));
    }

    #[test]
    fn full_translation() {
        assert_eq!(tr("E{a,c;b} p"), f("p"));
        assert_eq!(tr("E{a;b} <b>p"), f("<b>p"));
        assert_eq!(tr("A{a;b} p"), f("p"));
        assert_eq!(tr("E{a;b} <a>true"), f("[a]true"));
        assert_eq!(tr("E{a;b} E{a;b} <b>p"), f("<b>p"));
        assert!(matches!(
            eliminate(&f("E{a;} p"), &Caps::default()),
            Err(ElimError::EmptySignature(_))
        ));
    }
}
