use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entropic_core::certify::{evaluate, test_condition13, TestConfig, Witness};
use entropic_core::frechet::{frechet_superoperator, second_diff_g};
use entropic_core::linalg::{eigh, random_hermitian, random_pd};
use entropic_core::ScalarFunction;

fn bench_eigh(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("eigh");
    for n in [2, 4, 8, 16] {
        let m = random_hermitian(n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| eigh(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_frechet(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = ScalarFunction::tlogt();
    let mut group = c.benchmark_group("frechet_superoperator");
    for n in [2, 3, 4] {
        let rho = random_pd(n, (0.1, 10.0), &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &rho, |b, rho| {
            b.iter(|| frechet_superoperator(&f, black_box(rho)).unwrap())
        });
    }
    group.finish();

    let rhos: Vec<_> = (0..3).map(|_| random_pd(4, (0.1, 10.0), &mut rng)).collect();
    let hs: Vec<_> = (0..3).map(|_| random_hermitian(4, &mut rng)).collect();
    c.bench_function("second_diff_g/k3_n4", |b| {
        b.iter(|| second_diff_g(&f, black_box(&rhos), black_box(&hs)).unwrap())
    });
}

fn bench_condition13(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = ScalarFunction::tlogt();
    let mut group = c.benchmark_group("condition13_trial");
    for n in [2, 3, 4] {
        let w = Witness::Condition13 {
            rho: (&random_pd(n, (0.1, 10.0), &mut rng)).into(),
            sigma: (&random_pd(n, (0.1, 10.0), &mut rng)).into(),
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| evaluate(&f, black_box(w)).unwrap())
        });
    }
    group.finish();

    let cfg = TestConfig {
        dims: vec![2, 3],
        samples: 50,
        threads: Some(0),
        ..TestConfig::default()
    };
    c.bench_function("condition13_suite/serial_100", |b| {
        b.iter(|| test_condition13(&f, black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, bench_eigh, bench_frechet, bench_condition13);
criterion_main!(benches);
