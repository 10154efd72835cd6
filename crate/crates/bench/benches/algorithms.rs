use ccmu::search::witness_search;
use ccmu::{build_tableau, eliminate, find_marking, largest_refinement, mc, parse, Caps, PointedModel, QuantifierSignature};
use ccmu_bench::{alphabet, random, ring};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::collections::BTreeSet;
use std::hint::black_box;

fn model_checking(c: &mut Criterion) {
    let f = parse("nu x. mu y. ((p & <a>x) | <a>y | <b>y)", &alphabet()).unwrap();
    let mut group = c.benchmark_group("mc/alternating");
    for n in [16, 64, 256] {
        let m = ring(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |bench, m| {
            bench.iter(|| mc::extension(black_box(m), &f, &mc::Environment::new()).unwrap())
        });
    }
    group.finish();
}

fn refinement(c: &mut Criterion) {
    let none = BTreeSet::new();
    let mut group = c.benchmark_group("ccref/largest");
    for n in [20, 50, 200] {
        let (m, k) = (random(n, 1), random(n, 2));
        for (label, sig) in [
            ("bisim", QuantifierSignature::bisimulation()),
            ("cc", QuantifierSignature::singleton("a", "b")),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &(&m, &k), |bench, (m, k)| {
                bench.iter(|| largest_refinement(m, k, &none, &sig).unwrap())
            });
        }
    }
    group.finish();
}

fn elimination(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("elim");
    for text in [
        "E{a;b} nabla_a {p & nabla_b {!p}, nabla_a {}}",
        "E{a;b} nu q. (p & nabla_a {q} & nabla_b {q})",
        "E{a;b} (<a>p & [b]!p)",
    ] {
        let f = parse(text, &alphabet()).unwrap();
        group.bench_function(text, |bench| bench.iter(|| eliminate(black_box(&f), &caps).unwrap()));
    }
    group.finish();
}

fn witness(c: &mut Criterion) {
    let pm = PointedModel::at_index(ring(2), 0);
    let sig = QuantifierSignature::singleton("a", "b");
    let f = parse("nabla_a {p, !p}", &alphabet()).unwrap();
    c.bench_function("search/witness_bound_2", |bench| {
        bench.iter(|| witness_search(black_box(&pm), &sig, &f, 2).unwrap())
    });
}

fn tableau(c: &mut Criterion) {
    let f = parse("p & nabla_a {nabla_b {p} | nabla_a {}} & nabla_b {!p, p}", &alphabet()).unwrap();
    let t = build_tableau(&f).unwrap();
    let pm = PointedModel::at_index(random(40, 3), 0);
    c.bench_function("tableau/marking_40", |bench| bench.iter(|| find_marking(&t, black_box(&pm))));
}

criterion_group!(benches, model_checking, refinement, elimination, witness, tableau);
criterion_main!(benches);
