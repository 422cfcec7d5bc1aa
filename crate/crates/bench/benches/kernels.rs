use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use casimir_core::hurwitz::hurwitz_gf;
use casimir_core::partition::SizeContentTable;
use casimir_core::partition_function::{expansion_coeff, zn_bruteforce, Truncation};

fn content_table(c: &mut Criterion) {
    c.bench_function("size_content_table_120", |b| b.iter(|| SizeContentTable::with_max_length(black_box(120), None)));
}

fn hurwitz(c: &mut Criterion) {
    c.bench_function("hurwitz_gf_genus3_deg120", |b| b.iter(|| hurwitz_gf(black_box(3), 120).unwrap()));
}

fn partition_function(c: &mut Criterion) {
    let mut group = c.benchmark_group("zn_bruteforce");
    for rank in [8usize, 32] {
        group.bench_function(format!("N{rank}"), |b| {
            b.iter(|| zn_bruteforce(black_box(rank), 0.2, Truncation::default()).unwrap())
        });
    }
    group.finish();
    c.bench_function("expansion_coeff_a2", |b| b.iter(|| expansion_coeff(1, black_box(2.4), 120).unwrap()));
}

criterion_group!(benches, content_table, hurwitz, partition_function);
criterion_main!(benches);
