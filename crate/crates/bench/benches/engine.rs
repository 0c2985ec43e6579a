use criterion::{criterion_group, criterion_main, Criterion};
use hidsym::hidden::{plan_paths, solve_determining, Case};
use hidsym::problem::example;
use hidsym::reduce::run_path;
use hidsym::symexpr::normalize;
use hidsym::vfield::{commutator, prolong, Chart, VectorField};
use hidsym::parse;
use hidsym_bench::{a4_1, EXPRESSIONS};

fn expressions(c: &mut Criterion) {
    for (name, text) in EXPRESSIONS {
        let e = parse(text).unwrap();
        c.bench_function(&format!("parse/{name}"), |b| b.iter(|| parse(text).unwrap()));
        c.bench_function(&format!("normalize/{name}"), |b| b.iter(|| normalize(&e).unwrap()));
    }
}

fn fields(c: &mut Criterion) {
    let chart = Chart::new("x", "y", 0);
    let x = VectorField::parse_planar(&chart, "x^2", "x*y + y^2").unwrap();
    let y = VectorField::parse_planar(&chart, "y", "x^3 - 1").unwrap();
    c.bench_function("commutator", |b| b.iter(|| commutator(&x, &y).unwrap()));
    let jet = Chart::new("x", "y", 3);
    c.bench_function("prolong/3", |b| b.iter(|| prolong(&x, &jet, 3).unwrap()));
}

fn pipeline(c: &mut Criterion) {
    let l = a4_1();
    c.bench_function("plan_paths/A4_1", |b| b.iter(|| plan_paths(&l).unwrap()));
    c.bench_function("solve_determining/case2", |b| b.iter(|| solve_determining(Case::Case2, 2).unwrap()));
    let p = example("ex-2.2").unwrap();
    let mut g = c.benchmark_group("run_path");
    g.sample_size(10);
    g.bench_function("ex-2.2", |b| b.iter(|| run_path(&p).unwrap()));
    g.finish();
}

criterion_group!(benches, expressions, fields, pipeline);
criterion_main!(benches);
