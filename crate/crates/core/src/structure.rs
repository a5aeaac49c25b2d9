//! q-cosymplectic structures `(Ω, λ₁, …, λ_q)` in a single chart.
//!
//! Conventions: `W_ab = Ω(e_a, e_b)`, the interior product contracts the
//! first slot, `(i_v Ω)_a = Ω(v, e_a) = (Wᵀ v)_a`, and the musical map is
//!
//! ```text
//! b(v) = i_v Ω + Σᵢ λᵢ(v) λᵢ      B = Wᵀ + Σᵢ λᵢ λᵢᵀ
//! ```
//!
//! On `(q, p, z)` with `Ω = dq∧dp` and `λ = dz` this gives
//! `B = [[0, −1, 0], [1, 0, 0], [0, 0, 1]]`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::fd::FdConfig;
use crate::field::{OneFormField, TwoFormField, VectorField};
use crate::linalg::GuardedLu;

#[derive(Debug)]
struct Inner {
    chart: Chart,
    omega: TwoFormField,
    lambdas: Vec<OneFormField>,
    fd: FdConfig,
    reeb: OnceLock<Vec<VectorField>>,
}

/// Coordinate description of a q-cosymplectic structure.
///
/// Cloning is cheap; clones share the Reeb cache.
#[derive(Debug, Clone)]
pub struct QCosymplecticStructure {
    inner: Arc<Inner>,
}

/// Everything the derived fields need at one point: the forms, the
/// factorised musical matrix and the Reeb vectors.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub w: DMatrix<f64>,
    pub lambdas: Vec<DVector<f64>>,
    pub lu: GuardedLu,
    pub reeb: Vec<DVector<f64>>,
}

impl PointFrame {
    /// `b⁻¹(α)`.
    pub fn sharp(&self, alpha: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(alpha)
    }

    /// `Rᵢ(f)` given `df`.
    pub fn reeb_derivatives(&self, df: &DVector<f64>) -> Vec<f64> {
        self.reeb.iter().map(|r| df.dot(r)).collect()
    }

    /// `X_f = b⁻¹(df − Σ Rᵢ(f) λᵢ)` given `df`.
    pub fn hamiltonian_vector(&self, df: &DVector<f64>) -> DVector<f64> {
        let mut rhs = df.clone();
        for (lambda, rf) in self.lambdas.iter().zip(self.reeb_derivatives(df)) {
            rhs.axpy(-rf, lambda, 1.0);
        }
        self.sharp(&rhs)
    }
}

impl QCosymplecticStructure {
    pub fn new(chart: Chart, omega: TwoFormField, lambdas: Vec<OneFormField>) -> Result<Self> {
        Self::with_config(chart, omega, lambdas, FdConfig::default())
    }

    pub fn with_config(
        chart: Chart,
        omega: TwoFormField,
        lambdas: Vec<OneFormField>,
        fd: FdConfig,
    ) -> Result<Self> {
        fd.validate()?;
        if lambdas.len() != chart.q() {
            return Err(Error::DimensionMismatch {
                expected: chart.q(),
                got: lambdas.len(),
            });
        }
        Ok(Self {
            inner: Arc::new(Inner {
                chart,
                omega,
                lambdas,
                fd,
                reeb: OnceLock::new(),
            }),
        })
    }

    /// Standard structure on `ℝ^{2n+q}`: `Ω = Σ dq_j∧dp_j`, `λᵢ = dzᵢ`.
    pub fn standard(n: usize, q: usize) -> Result<Self> {
        let chart = Chart::canonical(n, q)?;
        let dim = chart.dim();
        let pairs: Vec<_> = (0..n).map(|j| (2 * j, 2 * j + 1)).collect();
        let omega = TwoFormField::darboux(dim, &pairs);
        let lambdas = (0..q)
            .map(|i| OneFormField::coordinate_differential(2 * n + i, dim))
            .collect();
        Self::new(chart, omega, lambdas)
    }

    pub fn chart(&self) -> &Chart {
        &self.inner.chart
    }

    pub fn dim(&self) -> usize {
        self.inner.chart.dim()
    }

    pub fn omega(&self) -> &TwoFormField {
        &self.inner.omega
    }

    pub fn lambdas(&self) -> &[OneFormField] {
        &self.inner.lambdas
    }

    pub fn fd_config(&self) -> &FdConfig {
        &self.inner.fd
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `B = Wᵀ + Σ λᵢλᵢᵀ` from already evaluated forms.
    pub fn assemble_musical(w: &DMatrix<f64>, lambdas: &[DVector<f64>]) -> DMatrix<f64> {
        let mut b = w.transpose();
        for l in lambdas {
            b += l * l.transpose();
        }
        b
    }

    /// The musical matrix at `x`; errors when `cond_1(B)` exceeds `cond_max`.
    pub fn musical_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let w = self.omega().eval(x);
        let lambdas: Vec<_> = self.lambdas().iter().map(|l| l.eval(x)).collect();
        let b = Self::assemble_musical(&w, &lambdas);
        GuardedLu::new(b.clone(), self.inner.fd.cond_max)?;
        Ok(b)
    }

    /// Forms, factorised musical matrix and Reeb vectors at `x`.
    pub fn frame_at(&self, x: &[f64]) -> Result<PointFrame> {
        self.check_point(x)?;
        build_frame(self.omega(), self.lambdas(), self.inner.fd.cond_max, x)
    }

    /// Reeb fields `Rᵢ = B⁻¹ λᵢ`, built once and shared by clones.
    pub fn reeb_fields(&self) -> &[VectorField] {
        self.inner.reeb.get_or_init(|| {
            (0..self.inner.chart.q())
                .map(|i| {
                    // capture the forms rather than `self` so the cache holds no cycle
                    let omega = self.omega().clone();
                    let lambdas = self.lambdas().to_vec();
                    let cond_max = self.inner.fd.cond_max;
                    let dim = self.dim();
                    VectorField::fallible(move |x| {
                        if x.len() != dim {
                            return Err(Error::DimensionMismatch {
                                expected: dim,
                                got: x.len(),
                            });
                        }
                        Ok(build_frame(&omega, &lambdas, cond_max, x)?
                            .reeb
                            .swap_remove(i))
                    })
                })
                .collect()
        })
    }
}

fn build_frame(
    omega: &TwoFormField,
    lambda_fields: &[OneFormField],
    cond_max: f64,
    x: &[f64],
) -> Result<PointFrame> {
    let w = omega.eval(x);
    let lambdas: Vec<_> = lambda_fields.iter().map(|l| l.eval(x)).collect();
    let lu = GuardedLu::new(
        QCosymplecticStructure::assemble_musical(&w, &lambdas),
        cond_max,
    )?;
    // b(Rᵢ) = λᵢ
    let reeb = lambdas.iter().map(|l| lu.solve(l)).collect();
    Ok(PointFrame {
        w,
        lambdas,
        lu,
        reeb,
    })
}
