//! Gradient, Hamiltonian and evolution fields, the Poisson bracket, and
//! the structural predicates built on them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exterior;
use crate::fd::{self, FdConfig};
use crate::field::{ScalarField, VectorField};
use crate::structure::QCosymplecticStructure;

/// `∇f = b⁻¹(df)`.
pub fn gradient_field(s: &QCosymplecticStructure, f: &ScalarField) -> VectorField {
    let (s, f) = (s.clone(), f.clone());
    VectorField::fallible(move |x| {
        let frame = s.frame_at(x)?;
        Ok(frame.sharp(&f.differential(x, s.fd_config())))
    })
}

/// `X_f = b⁻¹(df − Σ Rᵢ(f) λᵢ)`.
pub fn hamiltonian_field(s: &QCosymplecticStructure, f: &ScalarField) -> VectorField {
    let (s, f) = (s.clone(), f.clone());
    VectorField::fallible(move |x| {
        let frame = s.frame_at(x)?;
        Ok(frame.hamiltonian_vector(&f.differential(x, s.fd_config())))
    })
}

/// Weighted evolution field `E = Σ wᵢ Rᵢ + X_f`; all-ones weights give `E_f`.
pub fn evolution_field(
    s: &QCosymplecticStructure,
    f: &ScalarField,
    weights: &[f64],
) -> Result<VectorField> {
    if weights.len() != s.chart().q() {
        return Err(Error::DimensionMismatch {
            expected: s.chart().q(),
            got: weights.len(),
        });
    }
    let (s, f, weights) = (s.clone(), f.clone(), weights.to_vec());
    Ok(VectorField::fallible(move |x| {
        let frame = s.frame_at(x)?;
        let mut e = frame.hamiltonian_vector(&f.differential(x, s.fd_config()));
        for (r, w) in frame.reeb.iter().zip(&weights) {
            e.axpy(*w, r, 1.0);
        }
        Ok(e)
    }))
}

/// `{f, g}(x) = Ω(X_f, X_g) = X_g(f) = −X_f(g)`.
///
/// Evaluated as `½(X_g(f) − X_f(g))`, which is antisymmetric in floating
/// point as well.
pub fn poisson_bracket(
    s: &QCosymplecticStructure,
    f: &ScalarField,
    g: &ScalarField,
    x: &[f64],
) -> Result<f64> {
    let frame = s.frame_at(x)?;
    let cfg = s.fd_config();
    let (df, dg) = (f.differential(x, cfg), g.differential(x, cfg));
    let xf = frame.hamiltonian_vector(&df);
    let xg = frame.hamiltonian_vector(&dg);
    Ok(0.5 * (df.dot(&xg) - dg.dot(&xf)))
}

/// `{f, g}` as a scalar field (no analytic gradient). Points where the
/// musical matrix cannot be inverted evaluate to NaN.
pub fn bracket_field(s: &QCosymplecticStructure, f: &ScalarField, g: &ScalarField) -> ScalarField {
    let (s, f, g) = (s.clone(), f.clone(), g.clone());
    ScalarField::new(move |x| poisson_bracket(&s, &f, &g, x).unwrap_or(f64::NAN))
}

/// `[X, Y](x) = J_Y X − J_X Y` with central-difference Jacobians.
pub fn lie_bracket(
    x_field: &VectorField,
    y_field: &VectorField,
    x: &[f64],
    cfg: &FdConfig,
) -> Result<DVector<f64>> {
    let jx = fd::jacobian(&|p: &[f64]| x_field.eval(p), x, cfg)?;
    let jy = fd::jacobian(&|p: &[f64]| y_field.eval(p), x, cfg)?;
    Ok(jy * x_field.eval(x)? - jx * y_field.eval(x)?)
}

/// Largest component of `L_X Ω` and `L_X λᵢ` over the sample points.
pub fn automorphism_residual(
    s: &QCosymplecticStructure,
    field: &VectorField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> Result<f64> {
    let omega = |p: &[f64]| Ok(s.omega().eval(p));
    let v = |p: &[f64]| field.eval(p);
    let mut worst = 0.0_f64;
    for x in points {
        s.check_point(x)?;
        worst = worst.max(exterior::lie_derivative_two_form(&omega, &v, x, cfg)?.amax());
        for lambda in s.lambdas() {
            let l = |p: &[f64]| Ok(lambda.eval(p));
            worst = worst.max(exterior::lie_derivative_one_form(&l, &v, x, cfg)?.amax());
        }
    }
    Ok(worst)
}

/// True iff `L_X Ω = 0` and `L_X λᵢ = 0` to `cfg.tol_closed` at every point.
pub fn check_automorphism(
    s: &QCosymplecticStructure,
    field: &VectorField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> bool {
    matches!(automorphism_residual(s, field, points, cfg), Ok(r) if r <= cfg.tol_closed)
}

/// Largest curl component of `x ↦ b(X(x))` over the sample points.
pub fn local_gradient_residual(
    s: &QCosymplecticStructure,
    field: &VectorField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> Result<f64> {
    let flat = |p: &[f64]| -> Result<DVector<f64>> {
        let w = s.omega().eval(p);
        let lambdas: Vec<_> = s.lambdas().iter().map(|l| l.eval(p)).collect();
        Ok(QCosymplecticStructure::assemble_musical(&w, &lambdas) * field.eval(p)?)
    };
    let mut worst = 0.0_f64;
    for x in points {
        s.check_point(x)?;
        worst = worst.max(exterior::one_form_curl(&flat, x, cfg)?);
    }
    Ok(worst)
}

/// True iff `d(i_X Ω + Σ λᵢ(X) λᵢ) = 0` to `cfg.tol_closed` at every point.
pub fn is_local_gradient(
    s: &QCosymplecticStructure,
    field: &VectorField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> bool {
    matches!(local_gradient_residual(s, field, points, cfg), Ok(r) if r <= cfg.tol_closed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std3() -> QCosymplecticStructure {
        QCosymplecticStructure::standard(1, 1).unwrap()
    }

    fn close(v: &DVector<f64>, expected: &[f64], tol: f64) -> bool {
        v.iter().zip(expected).all(|(a, b)| (a - b).abs() <= tol)
    }

    const X: [f64; 3] = [0.4, -1.3, 0.9];

    #[test]
    fn gradient_examples_on_standard_structure() {
        let s = std3();
        let z = ScalarField::coordinate(2, 3);
        let p = ScalarField::coordinate(1, 3);
        let c = ScalarField::constant(4.2, 3);
        assert!(close(
            &gradient_field(&s, &z).eval(&X).unwrap(),
            &[0.0, 0.0, 1.0],
            1e-14
        ));
        assert!(close(
            &gradient_field(&s, &p).eval(&X).unwrap(),
            &[1.0, 0.0, 0.0],
            1e-14
        ));
        assert!(close(
            &gradient_field(&s, &c).eval(&X).unwrap(),
            &[0.0; 3],
            0.0
        ));
    }

    #[test]
    fn hamiltonian_examples_on_standard_structure() {
        let s = std3();
        let z = ScalarField::coordinate(2, 3);
        let p = ScalarField::coordinate(1, 3);
        assert!(close(
            &hamiltonian_field(&s, &p).eval(&X).unwrap(),
            &[1.0, 0.0, 0.0],
            1e-14
        ));
        assert!(close(
            &hamiltonian_field(&s, &z).eval(&X).unwrap(),
            &[0.0; 3],
            1e-14
        ));
    }

    #[test]
    fn evolution_of_zero_is_reeb_sum() {
        let s = QCosymplecticStructure::standard(1, 2).unwrap();
        let e = evolution_field(&s, &ScalarField::constant(0.0, 4), &[1.0, 1.0]).unwrap();
        assert!(close(
            &e.eval(&[0.1, 0.2, 0.3, 0.4]).unwrap(),
            &[0.0, 0.0, 1.0, 1.0],
            1e-14
        ));
        assert!(evolution_field(&s, &ScalarField::constant(0.0, 4), &[1.0]).is_err());
    }

    #[test]
    fn canonical_bracket() {
        let s = std3();
        let q = ScalarField::coordinate(0, 3);
        let p = ScalarField::coordinate(1, 3);
        let z = ScalarField::coordinate(2, 3);
        assert!((poisson_bracket(&s, &q, &p, &X).unwrap() - 1.0).abs() < 1e-14);
        assert!((poisson_bracket(&s, &p, &q, &X).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(poisson_bracket(&s, &p, &p, &X).unwrap(), 0.0);
        let f = ScalarField::new(|x| x[0] * x[1].sin() + x[2] * x[2]);
        assert!(poisson_bracket(&s, &z, &f, &X).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lie_bracket_examples() {
        let cfg = FdConfig::default();
        let dq = VectorField::coordinate(0, 3);
        let dp = VectorField::coordinate(1, 3);
        assert!(lie_bracket(&dq, &dp, &X, &cfg).unwrap().amax() == 0.0);
        let q_dp = VectorField::new(|x| DVector::from_vec(vec![0.0, x[0], 0.0]));
        let b = lie_bracket(&q_dp, &dq, &X, &cfg).unwrap();
        assert!(close(&b, &[0.0, -1.0, 0.0], 1e-8));
    }

    #[test]
    fn automorphism_examples() {
        let s = std3();
        let cfg = FdConfig::default();
        let pts = vec![X.to_vec(), vec![1.0, 2.0, -3.0]];
        assert!(check_automorphism(&s, &s.reeb_fields()[0], &pts, &cfg));
        let f = ScalarField::new(|x| x[0] * x[0] * x[1] + x[1].cos() + x[2] * x[2]);
        assert!(check_automorphism(
            &s,
            &hamiltonian_field(&s, &f),
            &pts,
            &cfg
        ));
        // L_{X_f}Ω = −d(R f)∧λ, and here R f = q.
        let mixed = ScalarField::new(|x| x[0] * x[0] * x[1] + x[2] * x[0]);
        assert!(!check_automorphism(
            &s,
            &hamiltonian_field(&s, &mixed),
            &pts,
            &cfg
        ));
        let dilation = VectorField::new(|x| DVector::from_vec(vec![x[0], 0.0, 0.0]));
        assert!(!check_automorphism(&s, &dilation, &pts, &cfg));
    }

    #[test]
    fn local_gradient_examples() {
        let s = std3();
        let cfg = FdConfig::default();
        let pts = vec![X.to_vec(), vec![-0.5, 0.25, 2.0]];
        let f = ScalarField::new(|x| x[0].sin() * x[1] + x[2] * x[2] * x[0]);
        assert!(is_local_gradient(&s, &gradient_field(&s, &f), &pts, &cfg));
        let p_dq = VectorField::new(|x| DVector::from_vec(vec![x[1], 0.0, 0.0]));
        assert!(is_local_gradient(&s, &p_dq, &pts, &cfg));
        let p_dp = VectorField::new(|x| DVector::from_vec(vec![0.0, x[1], 0.0]));
        assert!(!is_local_gradient(&s, &p_dp, &pts, &cfg));
    }
}
