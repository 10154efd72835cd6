use super::Formula;
use std::fmt::{self, Write};

// `top`: not nested inside another operator, so binaries go unparenthesised.
// `tail`: nothing follows in the enclosing scope, so a binder may run bare.
fn render(f: &Formula, out: &mut String, top: bool, tail: bool) {
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Bot => out.push_str("false"),
        Formula::Atom(x) => out.push_str(x),
        Formula::Neg(g) => {
            out.push('!');
            render(g, out, false, tail);
        }
        Formula::Boxed(a, g) => {
            let _ = write!(out, "[{a}]");
            render(g, out, false, tail);
        }
        Formula::Diamond(a, g) => {
            let _ = write!(out, "<{a}>");
            render(g, out, false, tail);
        }
        Formula::Cover(a, members) => {
            let _ = write!(out, "nabla_{a} {{");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render(m, out, true, true);
            }
            out.push('}');
        }
        Formula::Exists(sig, g) => {
            let _ = write!(out, "E{sig} ");
            render(g, out, false, tail);
        }
        Formula::Forall(sig, g) => {
            let _ = write!(out, "A{sig} ");
            render(g, out, false, tail);
        }
        Formula::Mu(q, g) | Formula::Nu(q, g) => {
            let kw = if matches!(f, Formula::Mu(..)) { "mu" } else { "nu" };
            if !tail {
                out.push('(');
            }
            let _ = write!(out, "{kw} {q}. ");
            render(g, out, false, true);
            if !tail {
                out.push(')');
            }
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            let op = if matches!(f, Formula::And(..)) { " & " } else { " | " };
            if !top {
                out.push('(');
            }
            render(l, out, false, false);
            out.push_str(op);
            render(r, out, false, true);
            if !top {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s, true, true);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ActionAlphabet, QuantifierSignature};
    use super::*;

    #[test]
    fn canonical_text() {
        assert_eq!(Formula::atom("p").to_string(), "p");
        assert_eq!(
            Formula::cover("a", [Formula::atom("p"), Formula::Top]).to_string(),
            "nabla_a {p, true}"
        );
        let nu = Formula::nu(
            "q",
            Formula::and(Formula::atom("p"), Formula::boxed("a", Formula::atom("q"))),
        );
        assert_eq!(nu.to_string(), "nu q. (p & [a]q)");
        assert_eq!(
            Formula::exists(QuantifierSignature::singleton("a", "b"), nu).to_string(),
            "E{a;b} nu q. (p & [a]q)"
        );
    }

    #[test]
    fn binders_in_non_tail_position_are_parenthesised() {
        let f = Formula::and(
            Formula::boxed("a", Formula::mu("q", Formula::atom("q"))),
            Formula::atom("p"),
        );
        let text = f.to_string();
        assert_eq!(text, "[a](mu q. q) & p");
        let ab = ActionAlphabet::new(["a"]).unwrap();
        assert_eq!(parse(&text, &ab).unwrap(), f);
    }

    use super::super::nnf;
    use proptest::prelude::*;

    fn formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Top),
            Just(Formula::Bot),
            prop_oneof![Just("p"), Just("q"), Just("x")].prop_map(Formula::atom),
        ];
        let action = || prop_oneof![Just("a"), Just("b")];
        let sig = prop_oneof![
            Just(QuantifierSignature::singleton("a", "b")),
            Just(QuantifierSignature::singleton("b", "a")),
            Just(QuantifierSignature::new(["a"], Vec::<String>::new()).unwrap()),
        ];
        leaf.prop_recursive(4, 24, 3, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::neg),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
                (action(), inner.clone()).prop_map(|(b, f)| Formula::boxed(b, f)),
                (action(), inner.clone()).prop_map(|(b, f)| Formula::diamond(b, f)),
                (action(), proptest::collection::vec(inner.clone(), 0..3)).prop_map(|(b, fs)| Formula::cover(b, fs)),
                (sig.clone(), inner.clone()).prop_map(|(s, f)| Formula::exists(s, f)),
                (sig.clone(), inner.clone()).prop_map(|(s, f)| Formula::forall(s, f)),
                inner.clone().prop_map(|f| Formula::mu("x", f)),
                inner.prop_map(|f| Formula::nu("x", f)),
            ]
        })
        .prop_filter("fixpoint variables occur positively", |f| f.check_positivity().is_ok())
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(f in formula()) {
            let alphabet = ActionAlphabet::new(["a", "b"]).unwrap();
            let text = f.to_string();
            prop_assert_eq!(parse(&text, &alphabet).unwrap(), f);
        }

        #[test]
        fn nnf_is_idempotent(f in formula()) {
            let g = nnf(&f);
            prop_assert!(g.is_nnf());
            prop_assert_eq!(nnf(&g), g);
        }
    }
}
