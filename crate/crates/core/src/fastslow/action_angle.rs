use std::f64::consts::PI;

use super::model::FastSlowModel;
use crate::error::Result;

/// Action–angle coordinates of the fast oscillator at frozen `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    pub action: f64,
    /// In `(−π, π]`.
    pub angle: f64,
}

/// `I = (p² + ω(Q)²q²) / (2ω(Q))`.
pub fn action(q: f64, p: f64, slow_q: f64, model: &FastSlowModel) -> Result<f64> {
    let w = model.checked_omega(slow_q)?;
    Ok((p * p + w * w * q * q) / (2.0 * w))
}

/// Inverse of [`from_action_angle`]: `θ = atan2(ωq, p)`.
pub fn to_action_angle(q: f64, p: f64, slow_q: f64, model: &FastSlowModel) -> Result<ActionAngle> {
    let w = model.checked_omega(slow_q)?;
    let action = (p * p + w * w * q * q) / (2.0 * w);
    let mut angle = (w * q).atan2(p);
    if angle <= -PI {
        angle = PI;
    }
    Ok(ActionAngle { action, angle })
}

/// `q = √(2I/ω) sin θ`, `p = √(2Iω) cos θ`.
pub fn from_action_angle(
    aa: ActionAngle,
    slow_q: f64,
    model: &FastSlowModel,
) -> Result<(f64, f64)> {
    let w = model.checked_omega(slow_q)?;
    let (s, c) = aa.angle.sin_cos();
    Ok((
        (2.0 * aa.action / w).sqrt() * s,
        (2.0 * aa.action * w).sqrt() * c,
    ))
}
