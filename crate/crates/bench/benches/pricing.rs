use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mapq_bench::fixture;
use mapq_core::experiment::{run, Method};
use mapq_core::quadrature::Integrand;
use mapq_core::{cos_price, mc_price, optimal_damping, CosConfig, DampedIntegrand, DampingOptions};

fn integrand(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrand");
    for id in [6u32, 18, 30] {
        let cfg = fixture(id, Method::Tp);
        let r = optimal_damping(&cfg.model, &cfg.payoff, &DampingOptions::default()).unwrap();
        let f = DampedIntegrand::new(cfg.model.clone(), cfg.payoff.clone(), r.damping).unwrap();
        let u = [0.3, -1.2, 2.0, 0.7];
        g.bench_function(format!("ex{id}"), |b| b.iter(|| f.eval(black_box(&u))));
    }
    g.finish();
}

fn damping(c: &mut Criterion) {
    let mut g = c.benchmark_group("optimal_damping");
    for id in [1u32, 20, 36] {
        let cfg = fixture(id, Method::Tp);
        g.bench_function(format!("ex{id}"), |b| {
            b.iter(|| optimal_damping(&cfg.model, &cfg.payoff, &DampingOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("quadrature");
    g.sample_size(10);
    let mut tp = fixture(1, Method::Tp);
    tp.options.level = 16;
    g.bench_function("tp_ex1_level16", |b| b.iter(|| run(&tp).unwrap()));
    let mut sm = fixture(6, Method::Sm);
    sm.options.level = 4;
    g.bench_function("sm_ex6_level4", |b| b.iter(|| run(&sm).unwrap()));
    let mut sg = fixture(6, Method::Asgq);
    sg.options.max_evals = Some(10_000);
    g.bench_function("asgq_ex6_1e4", |b| b.iter(|| run(&sg).unwrap()));
    let mut sg6 = fixture(12, Method::Asgq);
    sg6.options.max_evals = Some(10_000);
    g.bench_function("asgq_ex12_1e4", |b| b.iter(|| run(&sg6).unwrap()));
    g.finish();
}

fn comparators(c: &mut Criterion) {
    let mut g = c.benchmark_group("comparators");
    g.sample_size(10);
    let cfg = fixture(15, Method::Cos2d);
    let cos = CosConfig {
        n_cos: 64,
        q: 1000,
        l: 10.0,
    };
    g.bench_function("cos_ex15_n64", |b| b.iter(|| cos_price(&cfg.model, &cfg.payoff, &cos).unwrap()));
    g.bench_function("mc_ex15_1e5", |b| b.iter(|| mc_price(&cfg.model, &cfg.payoff, 100_000, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, integrand, damping, quadrature, comparators);
criterion_main!(benches);
