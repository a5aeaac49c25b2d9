//! Small dense linear algebra: pivoted LU with a condition guard, numerical rank.

use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorisation of a square matrix that refuses to exist when the
/// matrix is numerically singular.
///
/// The matrices handled here have dimension `2n + q` (rarely above ten), so
/// the 1-norm condition number is computed exactly from the inverse rather
/// than estimated.
#[derive(Debug, Clone)]
pub struct GuardedLu {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    cond: f64,
}

impl GuardedLu {
    pub fn new(m: DMatrix<f64>, cond_max: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let norm = norm_1(&m);
        let lu = m.lu();
        let cond = match lu.try_inverse() {
            Some(inv) if norm > 0.0 => norm * norm_1(&inv),
            _ => f64::INFINITY,
        };
        if !cond.is_finite() || cond > cond_max {
            return Err(Error::SingularMusicalMatrix {
                cond,
                limit: cond_max,
            });
        }
        Ok(Self { lu, cond })
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        // cannot fail: the factorisation was checked for invertibility
        self.lu.solve(rhs).expect("checked invertible")
    }
}

/// Numerical rank: singular values above `tol * max(1, σ_max)`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    sv.iter().filter(|s| **s > cut).count()
}
