//! Finite-difference exterior derivatives and Lie derivatives of forms.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::fd::{self, FdConfig};

/// `max_{a,b} |∂_a β_b − ∂_b β_a|`.
pub fn one_form_curl<F>(beta: &F, x: &[f64], cfg: &FdConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<DVector<f64>>,
{
    // jac[(b, a)] = ∂_a β_b
    let jac = fd::jacobian(beta, x, cfg)?;
    Ok((jac.transpose() - &jac).amax())
}

/// `max_{a<b<c} |∂_a W_bc + ∂_b W_ca + ∂_c W_ab|`.
pub fn two_form_cyclic_sum<F>(w: &F, x: &[f64], cfg: &FdConfig) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>>,
{
    let dim = x.len();
    let partials: Vec<DMatrix<f64>> = (0..dim)
        .map(|a| fd::partial(w, x, a, cfg))
        .collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for a in 0..dim {
        for b in (a + 1)..dim {
            for c in (b + 1)..dim {
                let s = partials[a][(b, c)] + partials[b][(c, a)] + partials[c][(a, b)];
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// Components of `L_X λ` at `x`: `X^a ∂_a λ_b + λ_a ∂_b X^a`.
pub fn lie_derivative_one_form<L, V>(
    lambda: &L,
    field: &V,
    x: &[f64],
    cfg: &FdConfig,
) -> Result<DVector<f64>>
where
    L: Fn(&[f64]) -> Result<DVector<f64>>,
    V: Fn(&[f64]) -> Result<DVector<f64>>,
{
    let v = field(x)?;
    let jx = fd::jacobian(field, x, cfg)?;
    let jl = fd::jacobian(lambda, x, cfg)?;
    Ok(&jl * &v + jx.transpose() * lambda(x)?)
}

/// Components of `L_X Ω` at `x`:
/// `X^a ∂_a W_bc + W_ac ∂_b X^a + W_ba ∂_c X^a`.
pub fn lie_derivative_two_form<W, V>(
    omega: &W,
    field: &V,
    x: &[f64],
    cfg: &FdConfig,
) -> Result<DMatrix<f64>>
where
    W: Fn(&[f64]) -> Result<DMatrix<f64>>,
    V: Fn(&[f64]) -> Result<DVector<f64>>,
{
    let dim = x.len();
    let v = field(x)?;
    let jx = fd::jacobian(field, x, cfg)?;
    let w = omega(x)?;
    let mut out = jx.transpose() * &w + &w * &jx;
    for a in 0..dim {
        if v[a] != 0.0 {
            let dw: DMatrix<f64> = fd::partial(omega, x, a, cfg)?;
            out += dw * v[a];
        }
    }
    Ok(out)
}
