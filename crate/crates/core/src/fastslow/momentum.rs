use nalgebra::DVector;

use super::idx;
use super::model::FastSlowModel;
use crate::error::Result;
use crate::fd::FdConfig;
use crate::field::{ScalarField, VectorField};
use crate::structure::QCosymplecticStructure;

/// `J = ½(p² + ω₀²q²)`, generated by rotations of the fast oscillator.
pub fn momentum_map_case_a(omega0: f64) -> ScalarField {
    let w2 = omega0 * omega0;
    ScalarField::with_gradient(
        move |x| 0.5 * (x[idx::P] * x[idx::P] + w2 * x[idx::Q] * x[idx::Q]),
        move |x| {
            let mut d = DVector::zeros(6);
            d[idx::Q] = w2 * x[idx::Q];
            d[idx::P] = x[idx::P];
            d
        },
    )
}

/// `J = ½(p² + ω(Q)²q²) = ω(Q)·I`.
pub fn momentum_map_case_b(model: &FastSlowModel) -> ScalarField {
    let m = model.clone();
    let g = model.clone();
    ScalarField::with_gradient(
        move |x| {
            let w = m.omega_at(x[idx::SLOW_Q]);
            0.5 * (x[idx::P] * x[idx::P] + w * w * x[idx::Q] * x[idx::Q])
        },
        move |x| {
            let (q, sq) = (x[idx::Q], x[idx::SLOW_Q]);
            let w = g.omega_at(sq);
            let mut d = DVector::zeros(6);
            d[idx::Q] = w * w * q;
            d[idx::P] = x[idx::P];
            d[idx::SLOW_Q] = w * g.omega_prime_at(sq) * q * q;
            d
        },
    )
}

/// `ξ = p∂_q − ω₀²q∂_p`.
pub fn generator_case_a(omega0: f64) -> VectorField {
    let w2 = omega0 * omega0;
    VectorField::new(move |x| {
        let mut v = DVector::zeros(6);
        v[idx::Q] = x[idx::P];
        v[idx::P] = -w2 * x[idx::Q];
        v
    })
}

/// `ξ = p∂_q − ω²q∂_p − ωω′q²∂_P`, the field with `i_ξΩ = p dp + ω²q dq + ωω′q² dQ`.
pub fn generator_case_b(model: &FastSlowModel) -> VectorField {
    let m = model.clone();
    VectorField::new(move |x| {
        let (q, sq) = (x[idx::Q], x[idx::SLOW_Q]);
        let w = m.omega_at(sq);
        let mut v = DVector::zeros(6);
        v[idx::Q] = x[idx::P];
        v[idx::P] = -w * w * q;
        v[idx::SLOW_P] = -w * m.omega_prime_at(sq) * q * q;
        v
    })
}

/// `max ‖dJ − i_ξΩ‖_∞` over `points`, with `dJ` from finite differences.
pub fn momentum_map_residual(
    s: &QCosymplecticStructure,
    j: &ScalarField,
    xi: &VectorField,
    points: &[Vec<f64>],
    cfg: &FdConfig,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let dj = j.fd_differential(x, cfg);
        let contraction = s.omega().eval(x).transpose() * xi.eval(x)?;
        worst = worst.max((dj - contraction).amax());
    }
    Ok(worst)
}
