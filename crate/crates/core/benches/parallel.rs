//! Parallel vs sequential execution of the main Monte-Carlo workloads.
//!
//! `par::sequential` forces the single-threaded code path in the same build,
//! so both arms run identical computations and produce identical results.

use std::hint::black_box;

use abcdic_core::abc::{adjust_loclinear, reject, standardize, Selection};
use abcdic_core::coalescent::{coal_model, CoalModel};
use abcdic_core::dic::{dic2, Aggregation, KernelConfig};
use abcdic_core::{build_reference_table, par, toy};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn both<F: Fn()>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("mode", "parallel"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("mode", "sequential"), |b| b.iter(|| par::sequential(&f)));
    g.finish();
}

fn toy_table(c: &mut Criterion) {
    let models = [toy::gaussian_model(), toy::laplace_model()];
    both(c, "toy_table_20k", || {
        black_box(build_reference_table(&models, 10_000, 1).unwrap());
    });
}

fn coalescent_table(c: &mut Criterion) {
    let models = [coal_model(CoalModel::Constant), coal_model(CoalModel::Expansion)];
    both(c, "coal_table_2x500", || {
        black_box(build_reference_table(&models, 500, 2).unwrap());
    });
}

fn toy_dic2(c: &mut Criterion) {
    let models = [toy::gaussian_model(), toy::laplace_model()];
    let table = build_reference_table(&models, 10_000, 3).unwrap();
    let std = standardize(&table).unwrap();
    let s0 = toy::observed();
    let eps = reject(&table, &s0, 0.1, Selection::All, &std).unwrap().tolerance;
    let kernel = KernelConfig::new(eps, &std).unwrap();
    let post = adjust_loclinear(
        &reject(&table, &s0, 0.1, Selection::Model("toy.gaussian"), &std).unwrap(),
        &table,
    )
    .unwrap();
    both(c, "toy_dic2_200x200", || {
        black_box(dic2(&post, &models[0], 200, 200, &kernel, Aggregation::Mean, 4).unwrap());
    });
}

criterion_group!(benches, toy_table, coalescent_table, toy_dic2);
criterion_main!(benches);
