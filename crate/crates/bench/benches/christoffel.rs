use std::hint::black_box;

use christoffel::geometry::gallery;
use christoffel::needles::{BoundsConfig, CertifiedBounds};
use christoffel::rho::{theorem_rhs, FormulaMode};
use christoffel::verification::{grid_points, GridSpec};
use christoffel::{build_evaluator, EvaluatorOptions, PrecisionMode, Point2};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_evaluator");
    group.sample_size(10);
    let opts = EvaluatorOptions::default();
    for (name, domain) in [("disc", gallery::disc()), ("square", gallery::square()), ("lens", gallery::lens(1.0).unwrap())] {
        for n in [4, 8, 12] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| build_evaluator(black_box(&domain), n, &opts).unwrap())
            });
        }
    }
    let extended = EvaluatorOptions::with_precision(PrecisionMode::Extended);
    group.bench_function("disc/extended/8", |b| b.iter(|| build_evaluator(&gallery::disc(), 8, &extended).unwrap()));
    group.finish();
}

fn evaluate(c: &mut Criterion) {
    let domain = gallery::square();
    let points = grid_points(&domain, &GridSpec::Cartesian { nx: 32, ny: 32 }).unwrap();
    let ev = build_evaluator(&domain, 12, &EvaluatorOptions::default()).unwrap();
    c.bench_function("lambda_many/square/12/1024", |b| b.iter(|| ev.lambda_many(black_box(&points))));
    c.bench_function("theorem_rhs/square/12/1024", |b| {
        b.iter(|| {
            for x in &points {
                black_box(theorem_rhs(&domain, *x, 12, FormulaMode::Full).unwrap());
            }
        })
    });
    let bounds = CertifiedBounds::from_evaluator(ev.clone(), BoundsConfig::default()).unwrap();
    let x = Point2::new(0.9, 0.85);
    let mut group = c.benchmark_group("certified");
    group.sample_size(10);
    group.bench_function("upper/square/corner", |b| b.iter(|| bounds.upper(black_box(x)).unwrap()));
    group.bench_function("lower/square/corner", |b| b.iter(|| bounds.lower(black_box(x)).unwrap()));
    group.finish();
}

criterion_group!(benches, build, evaluate);
criterion_main!(benches);
