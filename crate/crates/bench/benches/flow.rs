use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcosym_core::fastslow::{
    compare_full_vs_averaged, run_scenario, theta_average, ComparisonConfig, FastSlowModel,
    ScenarioCase, ScenarioConfig,
};

fn scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("scenario");
    g.sample_size(20);
    for case in [
        ScenarioCase::CaseA,
        ScenarioCase::CaseB,
        ScenarioCase::CaseBAveraged,
    ] {
        let cfg = ScenarioConfig::builtin(case);
        g.bench_function(format!("{case:?}"), |b| {
            b.iter(|| run_scenario(black_box(&cfg)).unwrap())
        });
    }
    g.finish();
}

fn comparison(c: &mut Criterion) {
    let mut g = c.benchmark_group("compare");
    g.sample_size(10);
    let cfg = ComparisonConfig::default();
    g.bench_function("case-b", |b| {
        b.iter(|| compare_full_vs_averaged(black_box(&cfg)).unwrap())
    });
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let m = FastSlowModel::case_b(0.05).unwrap();
    c.bench_function("theta_average/256", |b| {
        b.iter(|| {
            theta_average(|q, _, _, _| q * q, black_box(0.7), 1.0, 0.0, 0.0, &m, 256).unwrap()
        })
    });
}

criterion_group!(benches, scenarios, comparison, quadrature);
criterion_main!(benches);
