use criterion::{criterion_group, criterion_main, Criterion};
use pseudoboson::deformed_hermite::deformed_coeffs;
use pseudoboson::displacement_quant::{displacement_matrix, weight_operator_numeric, weight_operator_scheme};
use pseudoboson::fock_ops::pseudo_pair;
use pseudoboson::gl2_rep::{rep_block, rep_full};
use pseudoboson::hermite_core::{hermite_coeffs, inner};
use pseudoboson::index_maps::ModeIndex;
use pseudoboson_bench::{sample_g, sample_z};
use std::hint::black_box;

fn polynomials(c: &mut Criterion) {
    let g = sample_g();
    c.bench_function("hermite_inner_deg10", |b| {
        let p = hermite_coeffs(ModeIndex::new(5, 5));
        b.iter(|| inner(black_box(&p), black_box(&p)))
    });
    c.bench_function("deformed_coeffs_L10", |b| b.iter(|| deformed_coeffs(black_box(&g), ModeIndex::new(4, 6))));
}

fn representation(c: &mut Criterion) {
    let g = sample_g();
    c.bench_function("rep_block_L40", |b| b.iter(|| rep_block(black_box(&g), 40)));
    c.bench_function("rep_block_L60_log_domain", |b| b.iter(|| rep_block(black_box(&g), 60)));
    c.bench_function("rep_full_L30", |b| b.iter(|| rep_full(black_box(&g), 30)));
}

fn operators(c: &mut Criterion) {
    let g = sample_g();
    let mut group = c.benchmark_group("operators");
    group.sample_size(10);
    group.bench_function("pseudo_pair_L12", |b| b.iter(|| pseudo_pair(black_box(&g), 12).unwrap()));
    group.bench_function("displacement_matrix_L30", |b| b.iter(|| displacement_matrix(black_box(sample_z()), 30)));
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let kind = weight_operator_scheme(0.5, 64, 64).unwrap();
    c.bench_function("weight_operator_n10", |b| b.iter(|| weight_operator_numeric(black_box(0.5), 10, kind).unwrap()));
}

criterion_group!(benches, polynomials, representation, operators, quadrature);
criterion_main!(benches);
