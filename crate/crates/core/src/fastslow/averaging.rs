use std::f64::consts::TAU;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::action_angle::{from_action_angle, ActionAngle};
use super::model::FastSlowModel;
use crate::error::{Error, Result};
use crate::field::VectorField;

pub const DEFAULT_AVERAGING_NODES: usize = 64;

/// Coordinates of the averaged system, in state order.
pub const AVERAGED_LABELS: [&str; 3] = ["tau", "Q", "P"];

/// Which fast variables are averaged out of the slow drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingMode {
    /// Mean over the fast angle only; `τ` stays a slow variable.
    Theta,
    /// Mean over the fast angle and over one period of `τ`.
    ThetaAndTau,
}

impl AveragingMode {
    pub fn from_secular(secular: bool) -> Self {
        if secular {
            Self::ThetaAndTau
        } else {
            Self::Theta
        }
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 8 || !nodes.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs an even node count >= 8, got {nodes}"
        )));
    }
    Ok(())
}

/// `(1/2π) ∫₀^{2π} g` by composite Simpson with `nodes` subintervals.
fn simpson_mean(nodes: usize, mut g: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let h = TAU / nodes as f64;
    let mut sum = g(0.0)? + g(TAU)?;
    for k in 1..nodes {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(k as f64 * h)?;
    }
    Ok(sum * h / 3.0 / TAU)
}

/// `⟨F⟩(I, Q, P, τ) = (1/2π) ∫ F(q(I, θ, Q), Q, P, τ) dθ`.
#[allow(clippy::too_many_arguments)]
pub fn theta_average(
    f: impl Fn(f64, f64, f64, f64) -> f64,
    action: f64,
    slow_q: f64,
    slow_p: f64,
    tau: f64,
    model: &FastSlowModel,
    nodes: usize,
) -> Result<f64> {
    check_nodes(nodes)?;
    model.checked_omega(slow_q)?;
    simpson_mean(nodes, |theta| {
        let (q, _) = from_action_angle(
            ActionAngle {
                action,
                angle: theta,
            },
            slow_q,
            model,
        )?;
        Ok(f(q, slow_q, slow_p, tau))
    })
}

/// `H_av(I, Q, P, τ) = ω(Q) I + ε⟨V⟩`.
pub fn averaged_hamiltonian(
    model: &FastSlowModel,
    nodes: usize,
) -> impl Fn(f64, f64, f64, f64) -> Result<f64> + Send + Sync {
    let m = model.clone();
    move |action, slow_q, slow_p, tau| {
        let w = m.checked_omega(slow_q)?;
        let v = &m.potential.value;
        let avg = theta_average(
            |q, a, b, c| v(q, a, b, c),
            action,
            slow_q,
            slow_p,
            tau,
            &m,
            nodes,
        )?;
        Ok(w * action + m.eps * avg)
    }
}

/// `(∂_Q⟨V⟩, ∂_P⟨V⟩)` at fixed action, optionally also averaged over `τ`.
///
/// At fixed `(I, θ)` the fast position depends on `Q` through `ω`, so
/// `∂_Q⟨V⟩ = ⟨V_Q − V_q · q ω′ / (2ω)⟩`.
pub fn slow_drift(
    model: &FastSlowModel,
    action: f64,
    slow_q: f64,
    slow_p: f64,
    tau: f64,
    mode: AveragingMode,
    nodes: usize,
) -> Result<(f64, f64)> {
    let w = model.checked_omega(slow_q)?;
    let dq_dslow = -model.omega_prime_at(slow_q) / (2.0 * w);
    let v = &model.potential;
    let at_tau = |tau: f64| -> Result<(f64, f64)> {
        let dq = theta_average(
            |q, a, b, c| (v.d_slow_q)(q, a, b, c) + (v.d_q)(q, a, b, c) * q * dq_dslow,
            action,
            slow_q,
            slow_p,
            tau,
            model,
            nodes,
        )?;
        let dp = theta_average(
            |q, a, b, c| (v.d_slow_p)(q, a, b, c),
            action,
            slow_q,
            slow_p,
            tau,
            model,
            nodes,
        )?;
        Ok((dq, dp))
    };
    match mode {
        AveragingMode::Theta => at_tau(tau),
        AveragingMode::ThetaAndTau => {
            check_nodes(nodes)?;
            let dq = simpson_mean(nodes, |s| at_tau(s).map(|r| r.0))?;
            let dp = simpson_mean(nodes, |s| at_tau(s).map(|r| r.1))?;
            Ok((dq, dp))
        }
    }
}

/// Averaged slow dynamics on `(τ, Q, P)` with the action frozen:
/// `τ̇ = ε`, `Q̇ = ε∂_P⟨V⟩`, `Ṗ = −ω′(Q) I − ε∂_Q⟨V⟩`.
pub fn averaged_slow_field(
    model: &FastSlowModel,
    action: f64,
    mode: AveragingMode,
    nodes: usize,
) -> Result<VectorField> {
    check_nodes(nodes)?;
    if !(action.is_finite() && action >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "action must be >= 0, got {action}"
        )));
    }
    let m = model.clone();
    Ok(VectorField::fallible(move |x| {
        let (tau, sq, sp) = (x[0], x[1], x[2]);
        let (dvq, dvp) = if m.eps == 0.0 {
            m.checked_omega(sq)?;
            (0.0, 0.0)
        } else {
            slow_drift(&m, action, sq, sp, tau, mode, nodes)?
        };
        Ok(DVector::from_vec(vec![
            m.eps,
            m.eps * dvp,
            -m.omega_prime_at(sq) * action - m.eps * dvq,
        ]))
    }))
}
