//! Central finite differences with coordinate-scaled steps.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and step sizes shared by every numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdConfig {
    /// Relative step; the absolute step in coordinate `a` is `step * max(1, |x_a|)`.
    pub step: f64,
    pub tol_closed: f64,
    pub tol_linear: f64,
    pub cond_max: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-5,
            tol_closed: 1e-6,
            tol_linear: 1e-10,
            cond_max: 1e12,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.step, self.tol_closed, self.tol_linear, self.cond_max];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "finite-difference settings must be strictly positive: {self:?}"
            )))
        }
    }

    #[inline]
    pub fn step_at(&self, x: f64) -> f64 {
        self.step * x.abs().max(1.0)
    }
}

/// Central-difference derivative of `f` along coordinate `a` at `x`.
///
/// `f` may return any vector-like value; the closure receives the perturbed point.
pub fn partial<T, F>(f: &F, x: &[f64], a: usize, cfg: &FdConfig) -> Result<T>
where
    F: Fn(&[f64]) -> Result<T> + ?Sized,
    T: FdValue,
{
    let h = cfg.step_at(x[a]);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[a] += h;
    xm[a] -= h;
    // the actual step after rounding, not the nominal one
    let span = xp[a] - xm[a];
    let fp = f(&xp)?;
    let fm = f(&xm)?;
    Ok(T::central(fp, fm, span))
}

/// Values that can be differenced.
pub trait FdValue: Sized {
    fn central(plus: Self, minus: Self, span: f64) -> Self;
}

impl FdValue for f64 {
    fn central(plus: Self, minus: Self, span: f64) -> Self {
        (plus - minus) / span
    }
}

impl FdValue for DVector<f64> {
    fn central(plus: Self, minus: Self, span: f64) -> Self {
        (plus - minus) / span
    }
}

impl FdValue for DMatrix<f64> {
    fn central(plus: Self, minus: Self, span: f64) -> Self {
        (plus - minus) / span
    }
}

/// Gradient of a scalar function by central differences.
pub fn gradient<F>(f: &F, x: &[f64], cfg: &FdConfig) -> DVector<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let wrapped = |y: &[f64]| -> Result<f64> { Ok(f(y)) };
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|a| partial(&wrapped, x, a, cfg).expect("infallible")),
    )
}

/// Jacobian `J[i][a] = ∂_a F^i` of a vector-valued map.
pub fn jacobian<F>(f: &F, x: &[f64], cfg: &FdConfig) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<DVector<f64>> + ?Sized,
{
    let dim = x.len();
    let mut jac = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        let col: DVector<f64> = partial(f, x, a, cfg)?;
        if col.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: col.len(),
            });
        }
        jac.set_column(a, &col);
    }
    Ok(jac)
}
