use nalgebra::DVector;
use proptest::prelude::*;
use qcosym_core::catalog::{smooth_test_function, warped_r3};
use qcosym_core::{
    gradient_field, hamiltonian_field, lie_bracket, poisson_bracket, FdConfig,
    QCosymplecticStructure, ScalarField,
};

fn structures() -> Vec<QCosymplecticStructure> {
    vec![
        QCosymplecticStructure::standard(1, 2).unwrap(),
        QCosymplecticStructure::standard(2, 1).unwrap(),
        warped_r3().unwrap(),
    ]
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, dim)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(which in 0usize..3, seed in 0u64..10_000, x in point(5)) {
        let s = &structures()[which];
        let x = &x[..s.dim()];
        let f = smooth_test_function(s.dim(), seed);
        let g = smooth_test_function(s.dim(), seed + 1);
        let h = smooth_test_function(s.dim(), seed + 2);
        let fg = poisson_bracket(s, &f, &g, x).unwrap();
        let gf = poisson_bracket(s, &g, &f, x).unwrap();
        prop_assert!((fg + gf).abs() <= 1e-12 * fg.abs().max(1.0));

        let lhs = poisson_bracket(s, &f, &g.product(&h), x).unwrap();
        let rhs = fg * h.eval(x) + g.eval(x) * poisson_bracket(s, &f, &h, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
    }

    #[test]
    fn hamiltonian_fields_are_horizontal_and_conserve_their_function(
        which in 0usize..3, seed in 0u64..10_000, x in point(5)
    ) {
        let s = &structures()[which];
        let x = &x[..s.dim()];
        let f = smooth_test_function(s.dim(), seed);
        let xf = hamiltonian_field(s, &f).eval(x).unwrap();
        for l in s.lambdas() {
            prop_assert!(l.eval(x).dot(&xf).abs() < 1e-9);
        }
        let cfg = FdConfig::default();
        prop_assert!(f.differential(x, &cfg).dot(&xf).abs() < 1e-9);
    }

    #[test]
    fn gradient_splits_into_hamiltonian_and_reeb_parts(
        which in 0usize..3, seed in 0u64..10_000, x in point(5)
    ) {
        let s = &structures()[which];
        let x = &x[..s.dim()];
        let f = smooth_test_function(s.dim(), seed);
        let cfg = FdConfig::default();
        let df = f.differential(x, &cfg);
        let grad = gradient_field(s, &f).eval(x).unwrap();
        let mut rebuilt = hamiltonian_field(s, &f).eval(x).unwrap();
        let mut square_sum = 0.0;
        for r in s.reeb_fields() {
            let r = r.eval(x).unwrap();
            let rf = df.dot(&r);
            rebuilt += r * rf;
            square_sum += rf * rf;
        }
        prop_assert!((&grad - rebuilt).amax() < 1e-9);
        let gf = df.dot(&grad);
        prop_assert!(gf >= -1e-12);
        prop_assert!((gf - square_sum).abs() < 1e-9 * square_sum.max(1.0));
    }

    #[test]
    fn musical_matrix_maps_reeb_fields_to_the_one_forms(which in 0usize..3, x in point(5)) {
        let s = &structures()[which];
        let x = &x[..s.dim()];
        let b = s.musical_matrix(x).unwrap();
        for (r, l) in s.reeb_fields().iter().zip(s.lambdas()) {
            let r = r.eval(x).unwrap();
            prop_assert!((&b * &r - l.eval(x)).amax() < 1e-12);
            let w = s.omega().eval(x);
            prop_assert!((w.transpose() * &r).amax() < 1e-12);
        }
    }
}

/// `{f, g} = f_q g_p − f_p g_q` summed over the pairs of the canonical chart.
fn canonical_bracket(n: usize, df: &DVector<f64>, dg: &DVector<f64>) -> f64 {
    (0..n)
        .map(|i| df[2 * i] * dg[2 * i + 1] - df[2 * i + 1] * dg[2 * i])
        .sum()
}

#[test]
fn bracket_matches_canonical_formula_on_standard_structures() {
    let cfg = FdConfig::default();
    for n in 1..=3 {
        for q in 1..=3 {
            let s = QCosymplecticStructure::standard(n, q).unwrap();
            let dim = s.dim();
            for seed in 0..10 {
                let f = smooth_test_function(dim, seed);
                let g = smooth_test_function(dim, seed + 100);
                let x: Vec<f64> = (0..dim)
                    .map(|k| ((k as f64 + 1.0) * 0.37 * (seed as f64 + 1.0)).sin())
                    .collect();
                let want =
                    canonical_bracket(n, &f.differential(&x, &cfg), &g.differential(&x, &cfg));
                let got = poisson_bracket(&s, &f, &g, &x).unwrap();
                assert!(
                    (got - want).abs() < 1e-12 * want.abs().max(1.0),
                    "n={n} q={q}"
                );
            }
        }
    }
}

#[test]
fn bracket_of_fields_is_minus_field_of_bracket() {
    let cfg = FdConfig::default();
    for s in structures() {
        let dim = s.dim();
        let f = smooth_test_function(dim, 11);
        let g = smooth_test_function(dim, 12);
        let fg = qcosym_core::bracket_field(&s, &f, &g);
        let x_fg = hamiltonian_field(&s, &fg);
        for k in 0..5 {
            let x: Vec<f64> = (0..dim)
                .map(|a| 0.3 * (a as f64) - 0.2 * k as f64)
                .collect();
            let lie = lie_bracket(
                &hamiltonian_field(&s, &f),
                &hamiltonian_field(&s, &g),
                &x,
                &cfg,
            )
            .unwrap();
            let sum = x_fg.eval(&x).unwrap() + lie;
            assert!(sum.amax() < 1e-5, "{}", sum.amax());
        }
    }
}

#[test]
fn coordinate_brackets_on_standard_structure() {
    let s = QCosymplecticStructure::standard(2, 2).unwrap();
    let x = [0.3, -0.1, 0.8, 1.2, -0.4, 0.5];
    let coord = |i| ScalarField::coordinate(i, 6);
    for i in 0..2 {
        for j in 0..2 {
            let b = poisson_bracket(&s, &coord(2 * i), &coord(2 * j + 1), &x).unwrap();
            assert_eq!(b, if i == j { 1.0 } else { 0.0 });
        }
    }
    let f = smooth_test_function(6, 4);
    for z in 4..6 {
        assert_eq!(poisson_bracket(&s, &coord(z), &f, &x).unwrap(), 0.0);
    }
}
