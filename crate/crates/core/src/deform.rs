//! Deformation `Ω′ = Ω + dH′ ∧ Σλᵢ` by a Reeb-invariant function.

use crate::error::{Error, Result};
use crate::fd::FdConfig;
use crate::field::{wedge, ScalarField, TwoFormField};
use crate::structure::QCosymplecticStructure;

/// Builds `(Ω + dH′∧Σλᵢ, λ)`. The result has Reeb fields `Rᵢ + X_{H′}` and
/// the same Hamiltonian fields as `s`.
///
/// Fails with [`Error::ReebInvarianceViolated`] when `Rᵢ(H′)` exceeds
/// `cfg.tol_linear` (scaled by `|dH′|`) at some sample point.
pub fn deform_structure(
    s: &QCosymplecticStructure,
    hprime: &ScalarField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> Result<QCosymplecticStructure> {
    for x in points {
        let frame = s.frame_at(x)?;
        let dh = hprime.differential(x, s.fd_config());
        let scale = dh.amax().max(1.0);
        for (index, value) in frame.reeb_derivatives(&dh).into_iter().enumerate() {
            if value.abs() > cfg.tol_linear * scale {
                return Err(Error::ReebInvarianceViolated { index, value });
            }
        }
    }

    let omega = s.omega().clone();
    let lambdas = s.lambdas().to_vec();
    let h = hprime.clone();
    let fd = *s.fd_config();
    let deformed = TwoFormField::new(move |x| {
        let dh = h.differential(x, &fd);
        let mut sum = nalgebra::DVector::zeros(x.len());
        for l in &lambdas {
            sum += l.eval(x);
        }
        omega.eval(x) + wedge(&dh, &sum)
    });
    QCosymplecticStructure::with_config(
        s.chart().clone(),
        deformed,
        s.lambdas().to_vec(),
        *s.fd_config(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_box;

    #[test]
    fn constant_deformation_is_identity() {
        let s = QCosymplecticStructure::standard(1, 2).unwrap();
        let pts = sample_box(4, -1.0, 1.0, 4, 3);
        let d = deform_structure(
            &s,
            &ScalarField::constant(3.0, 4),
            &pts,
            &FdConfig::default(),
        )
        .unwrap();
        for x in &pts {
            assert_eq!(s.omega().eval(x), d.omega().eval(x));
            for (r, rp) in s.reeb_fields().iter().zip(d.reeb_fields()) {
                assert!((r.eval(x).unwrap() - rp.eval(x).unwrap()).amax() < 1e-14);
            }
        }
    }

    #[test]
    fn time_dependent_deformation_is_rejected() {
        let s = QCosymplecticStructure::standard(1, 1).unwrap();
        let z = ScalarField::coordinate(2, 3);
        let err = deform_structure(&s, &z, &[vec![0.0; 3]], &FdConfig::default()).unwrap_err();
        assert_eq!(
            err,
            Error::ReebInvarianceViolated {
                index: 0,
                value: 1.0
            }
        );
    }
}
