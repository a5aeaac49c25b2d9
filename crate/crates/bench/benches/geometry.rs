use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcosym_core::catalog::{smooth_test_function, warped_r3};
use qcosym_core::fastslow::build_structure;
use qcosym_core::sampling::sample_box;
use qcosym_core::{
    hamiltonian_field, poisson_bracket, validate_structure, FdConfig, QCosymplecticStructure,
};

fn musical(c: &mut Criterion) {
    let mut g = c.benchmark_group("frame");
    for (name, s) in [
        (
            "standard(3,3)",
            QCosymplecticStructure::standard(3, 3).unwrap(),
        ),
        ("warped", warped_r3().unwrap()),
    ] {
        let x = vec![0.3; s.dim()];
        g.bench_function(name, |b| b.iter(|| s.frame_at(black_box(&x)).unwrap()));
    }
    g.finish();
}

fn brackets(c: &mut Criterion) {
    let s = warped_r3().unwrap();
    let f = smooth_test_function(3, 1);
    let h = smooth_test_function(3, 2);
    let x = [0.2, -0.4, 0.7];
    c.bench_function("poisson_bracket/warped", |b| {
        b.iter(|| poisson_bracket(&s, &f, &h, black_box(&x)).unwrap())
    });
    let xf = hamiltonian_field(&s, &f);
    c.bench_function("hamiltonian_field/warped", |b| {
        b.iter(|| xf.eval(black_box(&x)).unwrap())
    });
}

fn validation(c: &mut Criterion) {
    let s = build_structure();
    let pts = sample_box(6, -2.0, 2.0, 64, 0);
    let cfg = FdConfig::default();
    c.bench_function("validate/fast-slow/64", |b| {
        b.iter(|| validate_structure(&s, black_box(&pts), &cfg))
    });
}

criterion_group!(benches, musical, brackets, validation);
criterion_main!(benches);
