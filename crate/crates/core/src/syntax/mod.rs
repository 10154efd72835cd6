//! Formulas of the refinement modal mu-calculus: AST, grammar, normal forms.
//!
//! Atoms and fixpoint variables share one namespace. A letter bound by
//! `mu q.` or `nu q.` is simply an atom whose valuation the binder controls.

mod df;
mod normal;
mod parse;
mod render;

pub use df::{is_df, DfError};
pub(crate) use df::conjoined;
pub use normal::{nnf, substitute};
pub use parse::{parse, parse_inferring_alphabet, ParseError};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// A finite, non-empty, ordered set of action names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ActionAlphabet {
    actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("an action alphabet must not be empty")]
    Empty,
    #[error("action name must be a non-empty identifier, got {0:?}")]
    BadName(String),
    #[error("duplicate action {0:?}")]
    Duplicate(String),
}

impl ActionAlphabet {
    pub fn new<I, S>(actions: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        if actions.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut seen = BTreeSet::new();
        for a in &actions {
            if !is_identifier(a) {
                return Err(AlphabetError::BadName(a.clone()));
            }
            if !seen.insert(a.as_str()) {
                return Err(AlphabetError::Duplicate(a.clone()));
            }
        }
        Ok(ActionAlphabet { actions })
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn index_of(&self, action: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn contains(&self, action: &str) -> bool {
        self.index_of(action).is_some()
    }
}

impl TryFrom<Vec<String>> for ActionAlphabet {
    type Error = AlphabetError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        ActionAlphabet::new(v)
    }
}

impl From<ActionAlphabet> for Vec<String> {
    fn from(a: ActionAlphabet) -> Self {
        a.actions
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// The covariant/contravariant action sets `(A1, A2)` of a refinement.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantifierSignature {
    pub cov: BTreeSet<String>,
    pub contra: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("action {0:?} is both covariant and contravariant")]
    Overlap(String),
    #[error("action {0:?} is not in the alphabet")]
    UnknownAction(String),
}

impl QuantifierSignature {
    pub fn new<I, J, S, T>(cov: I, contra: J) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let cov: BTreeSet<String> = cov.into_iter().map(Into::into).collect();
        let contra: BTreeSet<String> = contra.into_iter().map(Into::into).collect();
        if let Some(a) = cov.intersection(&contra).next() {
            return Err(SignatureError::Overlap(a.clone()));
        }
        Ok(QuantifierSignature { cov, contra })
    }

    /// The `(∅, ∅)` signature: refinement degenerates to bisimulation.
    pub fn bisimulation() -> Self {
        QuantifierSignature::default()
    }

    pub fn singleton(cov: &str, contra: &str) -> Self {
        QuantifierSignature::new([cov], [contra]).expect("distinct singleton actions")
    }

    pub fn check_alphabet(&self, alphabet: &ActionAlphabet) -> Result<(), SignatureError> {
        match self.cov.iter().chain(&self.contra).find(|a| !alphabet.contains(a)) {
            Some(a) => Err(SignatureError::UnknownAction(a.clone())),
            None => Ok(()),
        }
    }

    pub fn is_covariant(&self, action: &str) -> bool {
        self.cov.contains(action)
    }

    pub fn is_contravariant(&self, action: &str) -> bool {
        self.contra.contains(action)
    }

    /// Covariant × contravariant pairs in lexicographic order.
    pub fn singleton_pairs(&self) -> Vec<(String, String)> {
        self.cov
            .iter()
            .flat_map(|a| self.contra.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }
}

impl fmt::Display for QuantifierSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
        write!(f, "{{{};{}}}", join(&self.cov), join(&self.contra))
    }
}

/// A formula of the language. `Cover` member lists are kept sorted by their
/// rendered text and free of duplicates; build them with [`Formula::cover`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `[b]f`
    Boxed(String, Box<Formula>),
    /// `<b>f`
    Diamond(String, Box<Formula>),
    /// `nabla_b {f1, ..., fn}`
    Cover(String, Vec<Formula>),
    Exists(QuantifierSignature, Box<Formula>),
    Forall(QuantifierSignature, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::or(Formula::neg(l), r)
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::and(
            Formula::implies(l.clone(), r.clone()),
            Formula::implies(r, l),
        )
    }

    pub fn boxed(action: impl Into<String>, f: Formula) -> Formula {
        Formula::Boxed(action.into(), Box::new(f))
    }

    pub fn diamond(action: impl Into<String>, f: Formula) -> Formula {
        Formula::Diamond(action.into(), Box::new(f))
    }

    /// A cover over a member set; duplicates collapse and members are ordered
    /// by their rendered text.
    pub fn cover(action: impl Into<String>, members: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Cover(action.into(), canonical_set(members))
    }

    pub fn exists(sig: QuantifierSignature, f: Formula) -> Formula {
        Formula::Exists(sig, Box::new(f))
    }

    pub fn forall(sig: QuantifierSignature, f: Formula) -> Formula {
        Formula::Forall(sig, Box::new(f))
    }

    pub fn mu(var: impl Into<String>, f: Formula) -> Formula {
        Formula::Mu(var.into(), Box::new(f))
    }

    pub fn nu(var: impl Into<String>, f: Formula) -> Formula {
        Formula::Nu(var.into(), Box::new(f))
    }

    /// Left-folded conjunction; the empty conjunction is `true`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-folded disjunction; the empty disjunction is `false`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    /// Immediate subformulas, in order.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => vec![],
            Neg(f) | Boxed(_, f) | Diamond(_, f) | Exists(_, f) | Forall(_, f) | Mu(_, f)
            | Nu(_, f) => vec![f],
            And(l, r) | Or(l, r) => vec![l, r],
            Cover(_, fs) => fs.iter().collect(),
        }
    }

    fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_quantifier(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Exists(..) | Formula::Forall(..)))
    }

    pub fn has_fixpoint(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Mu(..) | Formula::Nu(..)))
    }

    pub fn has_modality(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Boxed(..) | Formula::Diamond(..) | Formula::Cover(..)))
    }

    /// Built from constants, atoms and boolean connectives only.
    pub fn is_propositional(&self) -> bool {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => true,
            Neg(f) => f.is_propositional(),
            And(l, r) | Or(l, r) => l.is_propositional() && r.is_propositional(),
            _ => false,
        }
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Neg(f) => matches!(**f, Formula::Atom(_)),
            _ => false,
        }
    }

    /// Negation appears only directly above atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Neg(f) => matches!(**f, Formula::Atom(_)),
            f => f.children().into_iter().all(Formula::is_nnf),
        }
    }

    pub fn modal_depth(&self) -> usize {
        use Formula::*;
        match self {
            Boxed(_, f) | Diamond(_, f) => 1 + f.modal_depth(),
            Cover(_, fs) => 1 + fs.iter().map(Formula::modal_depth).max().unwrap_or(0),
            f => f.children().into_iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Atoms occurring free (not bound by an enclosing `mu`/`nu`).
    pub fn free_atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Formula::Mu(q, f) | Formula::Nu(q, f) => {
                bound.push(q);
                f.collect_free(bound, out);
                bound.pop();
            }
            f => {
                for c in f.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            Formula::Atom(x) => x == name,
            Formula::Mu(q, f) | Formula::Nu(q, f) => q != name && f.occurs_free(name),
            f => f.children().into_iter().any(|c| c.occurs_free(name)),
        }
    }

    /// Every atom name appearing anywhere, bound or free, including binders.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(x) => {
                out.insert(x.clone());
            }
            Formula::Mu(q, f) | Formula::Nu(q, f) => {
                out.insert(q.clone());
                f.collect_names(out);
            }
            f => {
                for c in f.children() {
                    c.collect_names(out);
                }
            }
        }
    }

    /// Action names mentioned by modalities and quantifier signatures.
    pub fn actions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Boxed(a, _) | Formula::Diamond(a, _) | Formula::Cover(a, _) => {
                out.insert(a.clone());
            }
            Formula::Exists(sig, _) | Formula::Forall(sig, _) => {
                out.extend(sig.cov.iter().cloned());
                out.extend(sig.contra.iter().cloned());
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_actions(out);
        }
    }

    /// Checks that every fixpoint variable occurs under an even number of
    /// negations in its body. Returns the first offending variable.
    pub fn check_positivity(&self) -> Result<(), String> {
        match self {
            Formula::Mu(q, body) | Formula::Nu(q, body) => {
                if !occurs_only_positively(body, q) {
                    return Err(q.clone());
                }
                body.check_positivity()
            }
            f => f
                .children()
                .into_iter()
                .try_for_each(Formula::check_positivity),
        }
    }
}

/// True when every free occurrence of `q` in `f` sits under an even number
/// of negations.
pub fn occurs_only_positively(f: &Formula, q: &str) -> bool {
    fn go(f: &Formula, q: &str, negated: bool) -> bool {
        match f {
            Formula::Atom(x) => x != q || !negated,
            Formula::Neg(g) => go(g, q, !negated),
            Formula::Mu(r, g) | Formula::Nu(r, g) => r == q || go(g, q, negated),
            g => g.children().into_iter().all(|c| go(c, q, negated)),
        }
    }
    go(f, q, false)
}

/// Sorts by rendered text and drops duplicates.
pub(crate) fn canonical_set(members: impl IntoIterator<Item = Formula>) -> Vec<Formula> {
    let mut keyed: Vec<(String, Formula)> = members
        .into_iter()
        .map(|f| (f.to_string(), f))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, f)| f).collect()
}

/// Flattens a conjunction chain into its conjuncts.
pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::And(l, r) => {
                go(l, out);
                go(r, out);
            }
            g => out.push(g),
        }
    }
    go(f, &mut out);
    out
}

/// Flattens a disjunction chain into its disjuncts.
pub fn disjuncts(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::Or(l, r) => {
                go(l, out);
                go(r, out);
            }
            g => out.push(g),
        }
    }
    go(f, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(
            ActionAlphabet::new(Vec::<String>::new()),
            Err(AlphabetError::Empty)
        );
        assert_eq!(
            ActionAlphabet::new(["a", "a"]),
            Err(AlphabetError::Duplicate("a".into()))
        );
        let ab = ActionAlphabet::new(["b", "a"]).unwrap();
        assert_eq!(ab.index_of("a"), Some(1));
    }

    #[test]
    fn signature_rejects_overlap() {
        assert!(QuantifierSignature::new(["a"], ["a"]).is_err());
        let sig = QuantifierSignature::new(["c", "a"], ["b"]).unwrap();
        assert_eq!(
            sig.singleton_pairs(),
            vec![("a".into(), "b".into()), ("c".into(), "b".into())]
        );
        assert_eq!(sig.to_string(), "{a,c;b}");
    }

    #[test]
    fn cover_members_are_a_set() {
        let c = Formula::cover("a", [Formula::Top, Formula::atom("p"), Formula::Top]);
        assert_eq!(c, Formula::Cover("a".into(), vec![Formula::atom("p"), Formula::Top]));
    }

    #[test]
    fn positivity() {
        let bad = Formula::mu("q", Formula::neg(Formula::atom("q")));
        assert_eq!(bad.check_positivity(), Err("q".into()));
        let good = Formula::mu("q", Formula::neg(Formula::neg(Formula::atom("q"))));
        assert!(good.check_positivity().is_ok());
        // rebinding shields the inner occurrence
        let shadow = Formula::mu("q", Formula::neg(Formula::nu("q", Formula::atom("q"))));
        assert!(shadow.check_positivity().is_ok());
    }

    #[test]
    fn free_atoms_skip_bound_letters() {
        let f = Formula::nu(
            "q",
            Formula::and(Formula::atom("p"), Formula::boxed("a", Formula::atom("q"))),
        );
        assert_eq!(f.free_atoms(), BTreeSet::from(["p".to_string()]));
        assert_eq!(f.modal_depth(), 1);
    }
}
