use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kslab_core::pauli::{lambda_element, pauli_mul, verify_sum_identities, LambdaIndex, PauliString};
use kslab_core::states::{f_value, StateModel};

fn bench_pauli_mul(c: &mut Criterion) {
    let a: PauliString = "XYZIXYZIXYZIXYZIXYZIXYZIXYZIXYZI".parse().unwrap();
    let b: PauliString = "ZZXXYYIIZZXXYYIIZZXXYYIIZZXXYYII".parse().unwrap();
    c.bench_function("pauli_mul n=32", |bench| bench.iter(|| pauli_mul(black_box(&a), black_box(&b)).unwrap()));

    let n = 10;
    let elements: Vec<_> = LambdaIndex::all(n).unwrap().map(lambda_element).collect();
    c.bench_function("group table n=10 row", |bench| {
        bench.iter(|| elements.iter().map(|e| pauli_mul(&elements[17], e).unwrap().phase_exp() as u64).sum::<u64>())
    });
}

fn bench_identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_sum_identities");
    group.sample_size(10);
    for n in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, &n| bench.iter(|| verify_sum_identities(n).unwrap()));
    }
    group.finish();
}

fn bench_f_value(c: &mut Criterion) {
    let state = StateModel::ghz_balanced(16).unwrap();
    c.bench_function("f_value ghz n=16", |bench| bench.iter(|| f_value(black_box(&state)).unwrap()));
}

criterion_group!(benches, bench_pauli_mul, bench_identities, bench_f_value);
criterion_main!(benches);
