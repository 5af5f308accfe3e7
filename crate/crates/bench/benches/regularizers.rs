use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use csreg::linalg::{standard_normal_matrix, RngStream};
use csreg::regularizers::{cs_grad, BinPair, RegularizerKind};
use std::hint::black_box;

fn closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("gradient");
    for n in [100, 1000, 10_000] {
        let mut rng = RngStream::new(0, 0);
        let x = rng.normal_vector(n);
        for kind in [
            RegularizerKind::Bin,
            RegularizerKind::Osb,
            RegularizerKind::Ter,
        ] {
            group.bench_with_input(BenchmarkId::new(kind.name(), n), &x, |b, x| {
                b.iter(|| kind.gradient(black_box(x)).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("generic-bin", n), &x, |b, x| {
            b.iter(|| cs_grad(&BinPair, black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn matrix_kinds(c: &mut Criterion) {
    let mut rng = RngStream::new(1, 0);
    let n = 100;
    let eig = RegularizerKind::Eig(standard_normal_matrix(n, n, &mut rng));
    let x = rng.normal_vector(n);
    c.bench_function("gradient/eig/100", |b| {
        b.iter(|| eig.gradient(black_box(&x)).unwrap())
    });

    let om = RegularizerKind::Om { k: 10 };
    let x = rng.normal_vector(100 * 10);
    c.bench_function("gradient/om/100x10", |b| {
        b.iter(|| om.gradient(black_box(&x)).unwrap())
    });
}

criterion_group!(benches, closed_forms, matrix_kinds);
criterion_main!(benches);
