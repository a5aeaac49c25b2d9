use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{idx, LABELS};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::field::{OneFormField, ScalarField, TwoFormField, VectorField};
use crate::structure::QCosymplecticStructure;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(q, Q, P, τ) ↦ ℝ`
type PotentialFn = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// The 2-cosymplectic structure `(dq∧dp + dQ∧dP; dt, dτ)` on `ℝ⁶`.
pub fn build_structure() -> QCosymplecticStructure {
    let chart = Chart::new(2, 2, LABELS.iter().map(|s| s.to_string()).collect())
        .expect("fixed labels are valid");
    let omega = TwoFormField::darboux(6, &[(idx::Q, idx::P), (idx::SLOW_Q, idx::SLOW_P)]);
    let lambdas = vec![
        OneFormField::coordinate_differential(idx::T, 6),
        OneFormField::coordinate_differential(idx::TAU, 6),
    ];
    QCosymplecticStructure::new(chart, omega, lambdas).expect("constant structure is well formed")
}

/// Perturbation `V(q, Q, P, τ)` together with its partial derivatives.
#[derive(Clone)]
pub struct Potential {
    pub value: PotentialFn,
    pub d_q: PotentialFn,
    pub d_slow_q: PotentialFn,
    pub d_slow_p: PotentialFn,
    pub d_tau: PotentialFn,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Potential")
    }
}

/// Named perturbations available from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `V = 0`
    Zero,
    /// `V = ½(Q² + P²)`
    SlowQuadratic,
    /// `V = Q P cos τ`
    QpCosTau,
    /// `V = q²`
    FastQuadratic,
}

impl Potential {
    pub fn new(
        value: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        d_q: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        d_slow_q: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        d_slow_p: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        d_tau: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            d_q: Arc::new(d_q),
            d_slow_q: Arc::new(d_slow_q),
            d_slow_p: Arc::new(d_slow_p),
            d_tau: Arc::new(d_tau),
        }
    }

    pub fn of_kind(kind: PotentialKind) -> Self {
        let zero = |_: f64, _: f64, _: f64, _: f64| 0.0;
        match kind {
            PotentialKind::Zero => Self::new(zero, zero, zero, zero, zero),
            PotentialKind::SlowQuadratic => Self::new(
                |_, sq, sp, _| 0.5 * (sq * sq + sp * sp),
                zero,
                |_, sq, _, _| sq,
                |_, _, sp, _| sp,
                zero,
            ),
            PotentialKind::QpCosTau => Self::new(
                |_, sq, sp, tau| sq * sp * tau.cos(),
                zero,
                |_, _, sp, tau| sp * tau.cos(),
                |_, sq, _, tau| sq * tau.cos(),
                |_, sq, sp, tau| -sq * sp * tau.sin(),
            ),
            PotentialKind::FastQuadratic => {
                Self::new(|q, _, _, _| q * q, |q, _, _, _| 2.0 * q, zero, zero, zero)
            }
        }
    }
}

/// Named frequency profiles available from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum FrequencyProfile {
    /// `ω(Q) = ω₀`
    Constant(f64),
    /// `ω(Q) = √(1 + Q²)`
    SqrtOnePlusSquare,
}

/// `(ω, ω′, V, ε)` of the fast–slow Hamiltonian.
#[derive(Clone)]
pub struct FastSlowModel {
    pub omega: RealFn,
    pub omega_prime: RealFn,
    pub potential: Potential,
    pub eps: f64,
    pub omega_min: f64,
}

impl fmt::Debug for FastSlowModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FastSlowModel")
            .field("eps", &self.eps)
            .field("omega_min", &self.omega_min)
            .finish_non_exhaustive()
    }
}

impl FastSlowModel {
    pub const DEFAULT_OMEGA_MIN: f64 = 1e-6;

    pub fn new(
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
        omega_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        potential: Potential,
        eps: f64,
    ) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be >= 0, got {eps}"
            )));
        }
        Ok(Self {
            omega: Arc::new(omega),
            omega_prime: Arc::new(omega_prime),
            potential,
            eps,
            omega_min: Self::DEFAULT_OMEGA_MIN,
        })
    }

    pub fn from_profile(
        profile: FrequencyProfile,
        potential: PotentialKind,
        eps: f64,
    ) -> Result<Self> {
        let pot = Potential::of_kind(potential);
        match profile {
            FrequencyProfile::Constant(w0) => {
                if !(w0.is_finite() && w0 > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "omega0 must be positive, got {w0}"
                    )));
                }
                Self::new(move |_| w0, |_| 0.0, pot, eps)
            }
            FrequencyProfile::SqrtOnePlusSquare => Self::new(
                |sq: f64| (1.0 + sq * sq).sqrt(),
                |sq: f64| sq / (1.0 + sq * sq).sqrt(),
                pot,
                eps,
            ),
        }
    }

    /// Constant frequency `ω₀` with slow potential `½(Q² + P²)`.
    pub fn case_a(omega0: f64, eps: f64) -> Result<Self> {
        Self::from_profile(
            FrequencyProfile::Constant(omega0),
            PotentialKind::SlowQuadratic,
            eps,
        )
    }

    /// `ω(Q) = √(1 + Q²)` with `V = Q P cos τ`.
    pub fn case_b(eps: f64) -> Result<Self> {
        Self::from_profile(
            FrequencyProfile::SqrtOnePlusSquare,
            PotentialKind::QpCosTau,
            eps,
        )
    }

    pub fn omega_at(&self, slow_q: f64) -> f64 {
        (self.omega)(slow_q)
    }

    pub fn omega_prime_at(&self, slow_q: f64) -> f64 {
        (self.omega_prime)(slow_q)
    }

    /// `ω(Q)`, refusing values below the floor.
    pub fn checked_omega(&self, slow_q: f64) -> Result<f64> {
        let w = self.omega_at(slow_q);
        if w.is_nan() || w < self.omega_min {
            Err(Error::OmegaTooSmall {
                omega: w,
                min: self.omega_min,
            })
        } else {
            Ok(w)
        }
    }
}

/// `H = ½p² + ½ω(Q)²q² + εV(q, Q, P, τ)` with its analytic differential.
pub fn hamiltonian(model: &FastSlowModel) -> ScalarField {
    let m = model.clone();
    let g = model.clone();
    ScalarField::with_gradient(
        move |x| {
            let (q, p, sq, sp, tau) = (
                x[idx::Q],
                x[idx::P],
                x[idx::SLOW_Q],
                x[idx::SLOW_P],
                x[idx::TAU],
            );
            let w = m.omega_at(sq);
            0.5 * p * p + 0.5 * w * w * q * q + m.eps * (m.potential.value)(q, sq, sp, tau)
        },
        move |x| {
            let (q, p, sq, sp, tau) = (
                x[idx::Q],
                x[idx::P],
                x[idx::SLOW_Q],
                x[idx::SLOW_P],
                x[idx::TAU],
            );
            let w = g.omega_at(sq);
            let wp = g.omega_prime_at(sq);
            let v = &g.potential;
            let mut d = DVector::zeros(6);
            d[idx::TAU] = g.eps * (v.d_tau)(q, sq, sp, tau);
            d[idx::Q] = w * w * q + g.eps * (v.d_q)(q, sq, sp, tau);
            d[idx::P] = p;
            d[idx::SLOW_Q] = w * wp * q * q + g.eps * (v.d_slow_q)(q, sq, sp, tau);
            d[idx::SLOW_P] = g.eps * (v.d_slow_p)(q, sq, sp, tau);
            d
        },
    )
}

/// `E_ε = ∂_t + ε∂_τ + X_H` written out as the multi-time Hamilton equations.
pub fn full_field(model: &FastSlowModel) -> VectorField {
    let m = model.clone();
    VectorField::fallible(move |x| {
        let (q, p, sq, sp, tau) = (
            x[idx::Q],
            x[idx::P],
            x[idx::SLOW_Q],
            x[idx::SLOW_P],
            x[idx::TAU],
        );
        let w = m.checked_omega(sq)?;
        let wp = m.omega_prime_at(sq);
        let v = &m.potential;
        let eps = m.eps;
        let mut e = DVector::zeros(6);
        e[idx::T] = 1.0;
        e[idx::TAU] = eps;
        e[idx::Q] = p;
        e[idx::P] = -w * w * q - eps * (v.d_q)(q, sq, sp, tau);
        e[idx::SLOW_Q] = eps * (v.d_slow_p)(q, sq, sp, tau);
        e[idx::SLOW_P] = -w * wp * q * q - eps * (v.d_slow_q)(q, sq, sp, tau);
        Ok(e)
    })
}
