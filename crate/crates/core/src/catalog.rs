//! Ready-made structures and smooth test functions.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::Result;
use crate::field::{OneFormField, ScalarField, TwoFormField};
use crate::structure::QCosymplecticStructure;

/// Non-flat structure on `(q, p, z)`:
///
/// ```text
/// Ω = dq ∧ dF,  F = (1 + 0.1 q) p + 0.3 sin z
/// λ = dz + dg,  g = 0.2 p sin q
/// ```
///
/// Both forms are exact, hence closed; the Reeb field is point-dependent
/// and proportional to `−F_z ∂_p + F_p ∂_z`.
pub fn warped_r3() -> Result<QCosymplecticStructure> {
    let chart = Chart::new(1, 1, vec!["q".into(), "p".into(), "z".into()])?;
    let omega = TwoFormField::new(|x| {
        let (q, z) = (x[0], x[2]);
        let f_p = 1.0 + 0.1 * q;
        let f_z = 0.3 * z.cos();
        let mut w = DMatrix::zeros(3, 3);
        w[(0, 1)] = f_p;
        w[(1, 0)] = -f_p;
        w[(0, 2)] = f_z;
        w[(2, 0)] = -f_z;
        w
    });
    let lambda = OneFormField::new(|x| {
        let (q, p) = (x[0], x[1]);
        DVector::from_vec(vec![0.2 * p * q.cos(), 0.2 * q.sin(), 1.0])
    });
    QCosymplecticStructure::new(chart, omega, vec![lambda])
}

/// Random smooth function `c + a·x + xᵀBx + k sin(d·x)` with analytic gradient.
pub fn smooth_test_function(dim: usize, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d);
    let mut uni = |scale: f64| scale * rng.random_range(-1.0..=1.0);
    let c = uni(1.0);
    let a = DVector::from_fn(dim, |_, _| uni(1.0));
    let b = DMatrix::from_fn(dim, dim, |_, _| uni(0.5));
    let b = (&b + b.transpose()) * 0.5;
    let k = uni(1.0);
    let d = DVector::from_fn(dim, |_, _| uni(0.7));

    let (a2, b2, d2) = (a.clone(), b.clone(), d.clone());
    ScalarField::with_gradient(
        move |x| {
            let v = DVector::from_column_slice(x);
            c + a.dot(&v) + v.dot(&(&b * &v)) + k * d.dot(&v).sin()
        },
        move |x| {
            let v = DVector::from_column_slice(x);
            &a2 + (&b2 * &v) * 2.0 + &d2 * (k * d2.dot(&v).cos())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::FdConfig;
    use crate::sampling::sample_box;
    use crate::validate::validate_structure;

    #[test]
    fn warped_structure_is_valid() {
        let s = warped_r3().unwrap();
        let pts = sample_box(3, -2.0, 2.0, 32, 1);
        let r = validate_structure(&s, &pts, &FdConfig::default());
        assert!(r.passed, "{:?}", r.failed_checks());
    }

    #[test]
    fn warped_reeb_field_is_not_a_coordinate_field() {
        let s = warped_r3().unwrap();
        let r = s.reeb_fields()[0].eval(&[0.5, 0.5, 0.2]).unwrap();
        assert!(r[1].abs() > 0.1);
    }

    #[test]
    fn test_functions_have_consistent_gradients() {
        let cfg = FdConfig::default();
        for seed in 0..5 {
            let f = smooth_test_function(4, seed);
            for x in sample_box(4, -2.0, 2.0, 8, seed) {
                assert!(f.gradient_mismatch(&x, &cfg) < 1e-8);
            }
        }
    }
}
