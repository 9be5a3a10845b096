use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use deficiency_core::{
    analyze, classify_limit, solve_recurrence, AntitreeSpec, ClassifierTolerances, EngineConfig,
    JacobiMatrix, OperatorDescriptor,
};
use num_complex::Complex64;

fn recurrence(c: &mut Criterion) {
    let j = JacobiMatrix::antitree_floor(2.0).unwrap();
    let z = Complex64::new(0.0, 1.0);
    let init = (Complex64::new(1.0, 0.0), z);
    let mut group = c.benchmark_group("solve_recurrence");
    for n in [1_000usize, 10_000, 100_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| solve_recurrence(&j, z, init, black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn classifier(c: &mut Criterion) {
    let tol = ClassifierTolerances::default();
    let mut group = c.benchmark_group("classify_limit");
    group.sample_size(10);
    for alpha in [0.5, 1.5, 3.0] {
        let j = JacobiMatrix::antitree_floor(alpha).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(alpha), &j, |b, j| {
            b.iter(|| classify_limit(j, &tol).unwrap())
        });
    }
    group.finish();
}

fn engine(c: &mut Criterion) {
    let cfg = EngineConfig::default();
    let d = OperatorDescriptor::Antitree {
        spec: AntitreeSpec::power_law(1.5, 6).unwrap(),
    };
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    group.bench_function("antitree_1.5", |b| b.iter(|| analyze(&d, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, recurrence, classifier, engine);
criterion_main!(benches);
