//! Covariant-contravariant refinement modal mu-calculus.
//!
//! Formulas ([`syntax`]), finite models ([`lts`]), model checking ([`mc`]),
//! refinement relations ([`ccref`]), disjunctive forms ([`dnf`]), quantifier
//! elimination ([`elim`]), bounded witness search ([`search`]) and tableaux
//! ([`tableau`]).

pub mod ccref;
pub mod dnf;
pub mod elim;
pub mod lts;
pub mod mc;
pub mod search;
pub mod stateset;
pub mod syntax;
pub mod tableau;

pub use ccref::{largest_refinement, refines, verify_relation, RefinementRelation};
pub use elim::{check_cc, eliminate, eliminate_one, unsat_k, Caps, UndeterminedReason, Verdict};
pub use lts::{LtsError, Model, PointedModel};
pub use stateset::StateSet;
pub use syntax::{parse, ActionAlphabet, Formula, QuantifierSignature};
pub use tableau::{build_tableau, find_marking, Marking, Tableau};
