//! Hand-written formula corpora over actions `a`, `b` and the atom `p`.

use ccmu::{parse, ActionAlphabet, Formula};

/// Formulas of modal depth at most 2 that elimination accepts directly:
/// the disjunctive fragment, plus one `α & φ` guard under a fixpoint. These
/// are the quantifier arguments of the elimination suites.
pub const DF: &[&str] = &[
    "true",
    "false",
    "p",
    "!p",
    "p | !p",
    "nabla_a {}",
    "nabla_b {}",
    "nabla_a {p}",
    "nabla_b {p}",
    "nabla_a {true}",
    "nabla_b {true}",
    "nabla_a {p, !p}",
    "nabla_b {p, !p}",
    "nabla_a {p | !p, p}",
    "nabla_a {p & !p}",
    "p & nabla_a {!p}",
    "!p & nabla_b {p}",
    "nabla_a {p} & nabla_b {!p}",
    "nabla_a {} & nabla_b {p}",
    "p & nabla_a {p, !p} & nabla_b {}",
    "nabla_a {p} | nabla_b {p}",
    "(p & nabla_a {}) | (!p & nabla_b {true})",
    "nabla_a {nabla_a {}}",
    "nabla_a {nabla_b {p}}",
    "nabla_b {nabla_a {p}}",
    "nabla_b {nabla_b {}, p}",
    "nabla_a {p & nabla_a {!p}, !p}",
    "nabla_a {nabla_a {p}, nabla_a {!p}}",
    "nabla_b {nabla_a {p, !p}}",
    "nabla_a {nabla_b {}} & nabla_b {nabla_a {}}",
    "p & nabla_a {nabla_b {p} | nabla_a {}}",
    "nabla_a {nabla_b {p, !p}}",
    "nabla_b {!p & nabla_b {p}}",
    "nabla_a {} | nabla_a {nabla_a {p}}",
    "nabla_a {p & nabla_b {!p}, nabla_a {}}",
    "!p & nabla_b {nabla_b {!p}, nabla_a {p}}",
    "nabla_a {nabla_a {}, nabla_b {}}",
    "nabla_b {p & nabla_a {}, !p & nabla_b {}}",
    "nu q. (p & nabla_a {q})",
    "mu q. (p | nabla_a {q})",
    "nu q. (nabla_a {q} & nabla_b {})",
    "mu q. (p | nabla_b {q, true})",
    "nu q. nabla_a {q, p}",
    "mu q. (p | nabla_a {q} | nabla_b {q})",
    "nu q. (p & nabla_a {q} & nabla_b {q})",
    "nu q. ((p & nabla_a {q}) | (!p & nabla_b {q}))",
    "mu q. (nabla_a {} | nabla_a {q})",
    "nu q. nabla_a {nabla_b {q}}",
    "mu q. (!p | nabla_a {nabla_a {q}})",
    "nu q. (p & (nabla_a {} | nabla_a {q}))",
    "(nu q. (p & nabla_a {q})) | nabla_b {p}",
    "nabla_a {mu q. (p | nabla_a {q})}",
    "nabla_b {nu q. (!p & nabla_b {q})}",
];

/// Unsatisfiable disjunctive formulas, for the side conditions that need
/// one.
pub const UNSAT: &[&str] = &[
    "false",
    "p & !p",
    "nabla_a {p & !p}",
    "!p & nabla_b {false} & nabla_a {p}",
];

/// Fixpoint-free modal formulas in arbitrary shape, for the normal-form
/// suites.
pub const MODAL: &[&str] = &[
    "<a>p",
    "[a]p",
    "<a>p & [a]!p",
    "<a>p & [a]p",
    "<a>p & <a>!p",
    "[a]false",
    "<a>true & [b]false",
    "[a](p | <b>true)",
    "!(<a>p | [b]!p)",
    "<a><b>p",
    "[a][b]p",
    "<a>[a]!p",
    "[a]<b>true & <a>p",
    "p -> <a>p",
    "(p | <a>p) & (!p | [b]p)",
    "<a>(p & [a]false) | <b>!p",
    "!nabla_a {p, !p}",
    "nabla_a {[b]p, <a>true}",
    "(<a>p & <b>p & [a]!p) | p",
    "<a>p & [a](p | <b>true)",
    "[b]!p & <b>true & <a>[b]false",
    "!<a>!<b>p",
    "<a>(p & <a>!p) & [a](!p | <b>p)",
    "[a]p | [a]!p",
    "<a>p -> [b]p",
];

/// Fixpoint formulas over the single action `a`.
pub const FIXPOINT_A: &[&str] = &[
    "mu q. (p | <a>q)",
    "nu q. (p & <a>q)",
    "mu q. (p | [a]q)",
    "nu q. (p & [a]q)",
    "mu q. [a]q",
    "nu q. <a>q",
    "mu q. (p | (<a>true & [a]q))",
    "nu q. (!p & [a]q)",
    "nu x. mu y. ((p & <a>x) | <a>y)",
    "mu x. nu y. ((p & [a]x) | (!p & [a]y))",
    "nu x. (p & <a>(mu y. (x | (!p & <a>y))))",
    "mu q. (p | nabla_a {q})",
    "nu q. nabla_a {q, !p}",
];

/// Fixpoint formulas over both actions.
pub const FIXPOINT_AB: &[&str] = &[
    "mu q. (p | <a>q | <b>q)",
    "nu q. (<a>q & [b]q)",
    "mu q. (p | ([a]q & [b]q & <a>true))",
    "nu x. mu y. ((p & <b>x) | <a>y)",
    "nu q. ((p -> <a>q) & (!p -> <b>q))",
    "mu q. (nabla_a {q} | nabla_b {})",
    "nu q. nabla_a {nabla_b {q}}",
    "mu x. (p | <a>(nu y. (x | [b]y)))",
    "nu q. (p & nabla_a {q} & nabla_b {q})",
];

pub fn ab() -> ActionAlphabet {
    ActionAlphabet::new(["a", "b"]).expect("valid alphabet")
}

pub fn abc() -> ActionAlphabet {
    ActionAlphabet::new(["a", "b", "c"]).expect("valid alphabet")
}

/// Parses a corpus over `a`, `b`, panicking on a malformed entry.
pub fn parse_all(texts: &[&str]) -> Vec<Formula> {
    let alphabet = ab();
    texts
        .iter()
        .map(|t| parse(t, &alphabet).unwrap_or_else(|e| panic!("corpus entry {t:?}: {e}")))
        .collect()
}

pub fn df() -> Vec<Formula> {
    parse_all(DF)
}

/// The fixpoint-free part of [`DF`].
pub fn df_modal() -> Vec<Formula> {
    df().into_iter().filter(|f| !f.has_fixpoint()).collect()
}

/// The fixpoint formulas of both fixpoint corpora and of [`DF`].
pub fn fixpoints() -> Vec<Formula> {
    let mut out = parse_all(FIXPOINT_A);
    out.extend(parse_all(FIXPOINT_AB));
    out.extend(df().into_iter().filter(Formula::has_fixpoint));
    out
}
