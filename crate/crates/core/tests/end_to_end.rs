//! Whole-pipeline checks through the public API: model files in, verdicts,
//! relations and witnesses out.

use ccmu::search::witness_search;
use ccmu::tableau::is_consistent_marking;
use ccmu::{
    build_tableau, check_cc, eliminate, find_marking, largest_refinement, mc, parse, refines, verify_relation,
    ActionAlphabet, Caps, Formula, Model, PointedModel, QuantifierSignature, Verdict,
};
use std::collections::BTreeSet;

const M0: &str = r#"{"alphabet": ["a", "b"], "states": ["s0"], "valuation": {"p": ["s0"]}, "root": "s0"}"#;

const M2: &str = r#"{
  "alphabet": ["a", "b"],
  "atoms": ["p"],
  "states": ["s", "t"],
  "transitions": [
    {"from": "s", "action": "a", "to": "t"},
    {"from": "t", "action": "a", "to": "s"},
    {"from": "t", "action": "b", "to": "t"}
  ],
  "valuation": {"p": ["t"]},
  "root": "s"
}"#;

fn f(text: &str) -> Formula {
    parse(text, &ActionAlphabet::new(["a", "b", "c"]).unwrap()).unwrap()
}

fn ab(text: &str) -> Formula {
    parse(text, &ActionAlphabet::new(["a", "b"]).unwrap()).unwrap()
}

#[test]
fn model_files_round_trip() {
    for text in [M0, M2] {
        let pm = PointedModel::from_json(text, None).unwrap();
        let again = PointedModel::from_json(&pm.to_json(), None).unwrap();
        assert_eq!(again.model, pm.model);
        assert_eq!(again.point_name(), pm.point_name());
    }
    let t = PointedModel::from_json(M2, Some("t")).unwrap();
    assert_eq!(t.point_name(), "t");
    assert!(PointedModel::from_json(M2, Some("nowhere")).is_err());
    assert!(Model::from_json(r#"{"alphabet": [], "states": ["s"]}"#).is_err());
}

#[test]
fn quantified_checks_on_the_single_state_model() {
    let pm = PointedModel::from_json(M0, None).unwrap();
    let caps = Caps::default();
    assert_eq!(check_cc(&pm, &ab("E{a;b} p"), None, &caps), Verdict::True);
    // a covariant step can be added by refinement, a contravariant one cannot
    assert_eq!(check_cc(&pm, &ab("E{a;b} <a>true"), None, &caps), Verdict::True);
    assert_eq!(check_cc(&pm, &ab("E{a;b} <b>true"), None, &caps), Verdict::False);
    let sig = QuantifierSignature::singleton("a", "b");
    assert!(witness_search(&pm, &sig, &ab("<a>true"), 2).unwrap().is_some());
    assert!(witness_search(&pm, &sig, &ab("<b>true"), 3).unwrap().is_none());
}

#[test]
fn witnesses_certify_themselves() {
    let pm = PointedModel::from_json(M2, None).unwrap();
    let sig = QuantifierSignature::singleton("a", "b");
    for text in ["nabla_a {p, !p}", "[b]false & <a>[b]false", "<a>(p & [b]false)", "nu q. (nabla_a {q} & nabla_b {})"] {
        let g = ab(text);
        let w = witness_search(&pm, &sig, &g, 3).unwrap().unwrap_or_else(|| panic!("no witness for {text}"));
        assert!(mc::check(&w.model, &g).unwrap(), "{text} fails at its witness");
        let pairs = w.relation.pairs();
        let ok = verify_relation(
            pairs.iter().map(|(u, v)| (u.as_str(), v.as_str())),
            &pm.model,
            &w.model.model,
            &BTreeSet::new(),
            &sig,
        )
        .unwrap();
        assert!(ok, "relation for {text} does not verify");
        assert!(w.relation.contains(pm.point_name(), w.model.point_name()));
        assert_eq!(check_cc(&pm, &Formula::exists(sig.clone(), g), None, &Caps::default()), Verdict::True);
    }
}

#[test]
fn translations_match_their_documented_shapes() {
    let caps = Caps::default();
    assert_eq!(eliminate(&f("E{a,c;b} p"), &caps).unwrap(), f("p"));
    assert_eq!(eliminate(&f("E{a;b} <b>p"), &caps).unwrap(), f("<b>p"));
    assert_eq!(eliminate(&f("A{a;b} p"), &caps).unwrap(), f("p"));
    for text in ["E{a;b} nabla_a {p, nabla_b {!p}}", "A{a;c} [b]p", "E{a;b} E{c;a} nabla_c {p}"] {
        let g = eliminate(&f(text), &caps).unwrap();
        assert!(!g.has_quantifier(), "{text} translated to {g}");
        g.check_positivity().unwrap();
    }
}

#[test]
fn refinement_is_reflexive_and_relations_verify() {
    let pm = PointedModel::from_json(M2, None).unwrap();
    let none = BTreeSet::new();
    let sigs = [
        QuantifierSignature::bisimulation(),
        QuantifierSignature::singleton("a", "b"),
        QuantifierSignature::new(["a", "b"], Vec::<String>::new()).unwrap(),
        QuantifierSignature::new(Vec::<String>::new(), ["a", "b"]).unwrap(),
    ];
    for sig in &sigs {
        assert!(refines(&pm, &pm, &none, sig).unwrap());
        let rel = largest_refinement(&pm.model, &pm.model, &none, sig).unwrap();
        let pairs = rel.pairs();
        assert!(verify_relation(pairs.iter().map(|(u, v)| (u.as_str(), v.as_str())), &pm.model, &pm.model, &none, sig).unwrap());
    }
}

#[test]
fn tableau_markings_follow_truth() {
    let pm = PointedModel::from_json(M2, None).unwrap();
    for text in ["nabla_a {p}", "nabla_a {!p}", "p & nabla_a {p}", "nabla_a {p & nabla_a {!p} & nabla_b {}}", "nabla_b {}"] {
        let g = ab(text);
        let t = build_tableau(&g).unwrap();
        for s in 0..pm.model.len() {
            let at = PointedModel::at_index(pm.model.clone(), s);
            let marking = find_marking(&t, &at);
            assert_eq!(marking.is_some(), mc::check(&at, &g).unwrap(), "{text} at {s}");
            if let Some(m) = marking {
                assert!(is_consistent_marking(&t, &at, &m));
            }
        }
    }
}
