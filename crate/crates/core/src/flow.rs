//! Integral curves of vector fields: fixed-step RK4 and adaptive
//! Dormand–Prince 5(4), with first integrals monitored along the way.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step of the fixed-step method.
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub t_max: f64,
    /// Keep every `record_every`-th step (the initial and final states are always kept).
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive,
            dt: 1e-2,
            rtol: 1e-9,
            atol: 1e-12,
            t_max: 1.0,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_max: f64) -> Self {
        Self {
            method: Method::Rk4Fixed,
            dt,
            t_max,
            ..Self::default()
        }
    }

    pub fn adaptive(rtol: f64, atol: f64, t_max: f64) -> Self {
        Self {
            method: Method::Rk45Adaptive,
            rtol,
            atol,
            t_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.t_max) {
            return Err(Error::InvalidArgument(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "record_every must be at least 1".into(),
            ));
        }
        match self.method {
            Method::Rk4Fixed if !positive(self.dt) || self.dt > self.t_max => Err(
                Error::InvalidArgument(format!("dt = {} must lie in (0, t_max]", self.dt)),
            ),
            Method::Rk45Adaptive if !positive(self.rtol) || !positive(self.atol) => Err(
                Error::InvalidArgument("rtol and atol must be positive".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monitor {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Recorded samples of an integral curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<Monitor>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn monitor(&self, name: &str) -> Option<&[f64]> {
        self.monitors
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.values.as_slice())
    }

    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// `max |m(s) − m(0)| / max(|m(0)|, floor)` for a monitor.
    pub fn relative_drift(&self, name: &str, floor: f64) -> Option<f64> {
        let v = self.monitor(name)?;
        let first = *v.first()?;
        let worst = v.iter().map(|x| (x - first).abs()).fold(0.0, f64::max);
        Some(worst / first.abs().max(floor))
    }

    fn record(&mut self, t: f64, y: &DVector<f64>, monitors: &[(String, ScalarField)]) {
        self.times.push(t);
        self.states.push(y.as_slice().to_vec());
        for (slot, (_, f)) in self.monitors.iter_mut().zip(monitors) {
            slot.values.push(f.eval(y.as_slice()));
        }
    }
}

fn eval_checked(field: &VectorField, t: f64, y: &DVector<f64>) -> Result<DVector<f64>> {
    let v = field.eval(y.as_slice())?;
    if v.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: v.len(),
        });
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteState { at: t });
    }
    Ok(v)
}

fn rk4_step(field: &VectorField, t: f64, y: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let k1 = eval_checked(field, t, y)?;
    let k2 = eval_checked(field, t, &(y + &k1 * (0.5 * h)))?;
    let k3 = eval_checked(field, t, &(y + &k2 * (0.5 * h)))?;
    let k4 = eval_checked(field, t, &(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Number of fixed steps covering `[0, t_max]`; an exact multiple of `dt`
/// (up to rounding) is not padded with a sliver step.
fn fixed_step_count(dt: f64, t_max: f64) -> usize {
    let ratio = t_max / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Number of samples a fixed-step run records.
pub fn fixed_step_sample_count(cfg: &IntegratorConfig) -> usize {
    let n = fixed_step_count(cfg.dt, cfg.t_max);
    1 + n / cfg.record_every + usize::from(!n.is_multiple_of(cfg.record_every))
}

/// Integrates `field` from `x0` over `s ∈ [0, cfg.t_max]`.
pub fn integrate(
    field: &VectorField,
    x0: &[f64],
    cfg: &IntegratorConfig,
    monitors: &[(String, ScalarField)],
) -> Result<Trajectory> {
    cfg.validate()?;
    let y0 = DVector::from_column_slice(x0);
    if y0.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteState { at: 0.0 });
    }
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        monitors: monitors
            .iter()
            .map(|(name, _)| Monitor {
                name: name.clone(),
                values: Vec::new(),
            })
            .collect(),
        stats: StepStats::default(),
    };
    traj.record(0.0, &y0, monitors);
    match cfg.method {
        Method::Rk4Fixed => run_rk4(field, y0, cfg, monitors, &mut traj)?,
        Method::Rk45Adaptive => run_dopri(field, y0, cfg, monitors, &mut traj)?,
    }
    Ok(traj)
}

fn run_rk4(
    field: &VectorField,
    mut y: DVector<f64>,
    cfg: &IntegratorConfig,
    monitors: &[(String, ScalarField)],
    traj: &mut Trajectory,
) -> Result<()> {
    let n = fixed_step_count(cfg.dt, cfg.t_max);
    let mut t = 0.0;
    for k in 1..=n {
        let t_next = if k == n { cfg.t_max } else { k as f64 * cfg.dt };
        y = rk4_step(field, t, &y, t_next - t)?;
        if y.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteState { at: t_next });
        }
        t = t_next;
        traj.stats.accepted += 1;
        if k % cfg.record_every == 0 || k == n {
            traj.record(t, &y, monitors);
        }
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

fn scaled_norm(
    v: &DVector<f64>,
    y: &DVector<f64>,
    y_new: &DVector<f64>,
    cfg: &IntegratorConfig,
) -> f64 {
    let sum: f64 = v
        .iter()
        .zip(y.iter().zip(y_new.iter()))
        .map(|(e, (a, b))| {
            let sk = cfg.atol + cfg.rtol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (sum / v.len().max(1) as f64).sqrt()
}

/// Starting step from the local behaviour of the field (Hairer–Nørsett–Wanner).
fn initial_step(
    field: &VectorField,
    y: &DVector<f64>,
    f0: &DVector<f64>,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let d0 = scaled_norm(y, y, y, cfg);
    let d1 = scaled_norm(f0, y, y, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(cfg.t_max);
    let y1 = y + f0 * h0;
    let f1 = eval_checked(field, h0, &y1)?;
    let d2 = scaled_norm(&(f1 - f0), y, y, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(cfg.t_max))
}

fn run_dopri(
    field: &VectorField,
    mut y: DVector<f64>,
    cfg: &IntegratorConfig,
    monitors: &[(String, ScalarField)],
    traj: &mut Trajectory,
) -> Result<()> {
    let t_end = cfg.t_max;
    let mut t = 0.0;
    let mut k1 = eval_checked(field, t, &y)?;
    let mut h = initial_step(field, &y, &k1, cfg)?;
    let mut err_old = 1e-4_f64;
    let mut since_record = 0usize;
    let mut ks: Vec<DVector<f64>> = vec![DVector::zeros(y.len()); 7];

    while t < t_end {
        if h < 1e-14 * t_end {
            return Err(Error::StepSizeUnderflow { at: t, step: h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        ks[0] = k1.clone();
        for stage in 1..7 {
            let mut ys = y.clone();
            for (j, a) in A[stage].iter().enumerate().take(stage) {
                if *a != 0.0 {
                    ys.axpy(h * a, &ks[j], 1.0);
                }
            }
            ks[stage] = eval_checked(field, t + C[stage] * h, &ys)?;
            if stage == 6 {
                // stage 7 is evaluated at the fifth-order solution itself
                let y_new = ys;
                let mut err_vec = DVector::zeros(y.len());
                for (j, e) in E.iter().enumerate() {
                    if *e != 0.0 {
                        err_vec.axpy(h * e, &ks[j], 1.0);
                    }
                }
                let err = scaled_norm(&err_vec, &y, &y_new, cfg);
                if !err.is_finite() {
                    return Err(Error::NonFiniteState { at: t });
                }
                if err <= 1.0 {
                    t = if last { t_end } else { t + h };
                    y = y_new;
                    k1 = ks[6].clone();
                    traj.stats.accepted += 1;
                    since_record += 1;
                    if since_record == cfg.record_every || t >= t_end {
                        traj.record(t, &y, monitors);
                        since_record = 0;
                    }
                    let fac = if err == 0.0 {
                        FAC_MAX
                    } else {
                        (SAFETY * err.powf(-ALPHA) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
                    };
                    err_old = err.max(1e-4);
                    h *= fac;
                } else {
                    traj.stats.rejected += 1;
                    h *= (SAFETY * err.powf(-0.2)).max(FAC_MIN);
                }
            }
        }
    }
    Ok(())
}

/// Observed convergence order of fixed-step RK4.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEstimate {
    /// `None` when the field is integrated exactly at every step size.
    pub order: Option<f64>,
    pub exact: bool,
    /// `‖y(dt_k) − y(dt_finest)‖_∞` for the coarser step sizes.
    pub errors: Vec<f64>,
}

/// Richardson estimate of the global order of RK4 on `[0, t_end]`.
///
/// `dt_list` must hold at least three steps in decreasing order with a
/// constant ratio `r`. With the finest run as reference, the errors of the
/// two next-finest runs satisfy `e₁/e₂ = r^p + 1`.
pub fn convergence_order(
    field: &VectorField,
    x0: &[f64],
    t_end: f64,
    dt_list: &[f64],
) -> Result<ConvergenceEstimate> {
    if dt_list.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three step sizes".into(),
        ));
    }
    let ratio = dt_list[0] / dt_list[1];
    let geometric = dt_list
        .windows(2)
        .all(|w| w[0] > w[1] && ((w[0] / w[1]) / ratio - 1.0).abs() < 1e-9);
    if !geometric {
        return Err(Error::InvalidArgument(
            "step sizes must decrease with a constant ratio".into(),
        ));
    }
    let finals: Vec<DVector<f64>> = dt_list
        .iter()
        .map(|dt| {
            let traj = integrate(field, x0, &IntegratorConfig::rk4(*dt, t_end), &[])?;
            Ok(DVector::from_column_slice(traj.last_state()))
        })
        .collect::<Result<_>>()?;
    let reference = finals.last().expect("non-empty");
    let errors: Vec<f64> = finals[..finals.len() - 1]
        .iter()
        .map(|y| (y - reference).amax())
        .collect();
    let scale = reference.amax().max(1.0);
    let m = errors.len();
    let (e1, e2) = (errors[m - 2], errors[m - 1]);
    if e1 <= 1e-13 * scale {
        return Ok(ConvergenceEstimate {
            order: None,
            exact: true,
            errors,
        });
    }
    let order = (e1 / e2 - 1.0).ln() / ratio.ln();
    Ok(ConvergenceEstimate {
        order: Some(order),
        exact: false,
        errors,
    })
}

/// Least-squares slope of `log(error)` against `log(rtol)` for the adaptive
/// method, given the exact final state.
pub fn tolerance_slope(
    field: &VectorField,
    x0: &[f64],
    t_end: f64,
    exact_final: &[f64],
    rtols: &[f64],
) -> Result<f64> {
    let exact = DVector::from_column_slice(exact_final);
    let mut pts = Vec::with_capacity(rtols.len());
    for &rtol in rtols {
        let traj = integrate(
            field,
            x0,
            &IntegratorConfig::adaptive(rtol, rtol * 1e-3, t_end),
            &[],
        )?;
        let err = (DVector::from_column_slice(traj.last_state()) - &exact).amax();
        pts.push((rtol.ln(), err.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator() -> VectorField {
        VectorField::new(|x| DVector::from_vec(vec![x[1], -x[0]]))
    }

    #[test]
    fn adaptive_oscillator_closes_the_period() {
        let tau = 2.0 * std::f64::consts::PI;
        let traj = integrate(
            &oscillator(),
            &[1.0, 0.0],
            &IntegratorConfig::adaptive(1e-9, 1e-12, tau),
            &[],
        )
        .unwrap();
        let end = traj.last_state();
        assert!((end[0] - 1.0).abs() < 1e-8, "{end:?}");
        assert_eq!(*traj.times.last().unwrap(), tau);
    }

    #[test]
    fn zero_field_is_stationary() {
        let traj = integrate(
            &VectorField::zero(3),
            &[1.0, 2.0, 3.0],
            &IntegratorConfig::rk4(0.1, 1.0),
            &[],
        )
        .unwrap();
        assert!(traj.states.iter().all(|s| s == &[1.0, 2.0, 3.0]));
        assert_eq!(traj.len(), 11);
    }

    #[test]
    fn times_strictly_increase_and_monitors_align() {
        let energy = ScalarField::new(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]));
        let mut cfg = IntegratorConfig::rk4(0.03, 1.0);
        cfg.record_every = 4;
        let traj = integrate(&oscillator(), &[1.0, 0.0], &cfg, &[("E".into(), energy)]).unwrap();
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.monitor("E").unwrap().len(), traj.len());
        assert_eq!(traj.len(), fixed_step_sample_count(&cfg));
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn blow_up_is_reported() {
        let field = VectorField::new(|x| DVector::from_vec(vec![x[0] * x[0]]));
        let err = integrate(&field, &[1.0], &IntegratorConfig::rk4(0.1, 5.0), &[]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
    }

    #[test]
    fn singular_adaptive_problem_underflows() {
        // x' = 1/(1 − s) style blow-up at s = 1 with an s-clock in the state
        let field = VectorField::new(|x| DVector::from_vec(vec![1.0, 1.0 / (1.0 - x[0]).powi(2)]));
        let err = integrate(
            &field,
            &[0.0, 0.0],
            &IntegratorConfig::adaptive(1e-9, 1e-12, 2.0),
            &[],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::StepSizeUnderflow { .. } | Error::NonFiniteState { .. }
        ));
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = IntegratorConfig::rk4(2.0, 1.0);
        assert!(cfg.validate().is_err());
        cfg.dt = 0.1;
        cfg.record_every = 0;
        assert!(cfg.validate().is_err());
        assert!(IntegratorConfig::adaptive(0.0, 1e-12, 1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn rk4_order_is_four() {
        let est = convergence_order(
            &oscillator(),
            &[1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &[1e-2, 5e-3, 2.5e-3],
        )
        .unwrap();
        let p = est.order.unwrap();
        assert!((3.7..=4.3).contains(&p), "order {p}");
    }

    #[test]
    fn constant_field_is_flagged_exact() {
        let field = VectorField::constant(DVector::from_vec(vec![1.0, -2.0]));
        let est = convergence_order(&field, &[0.0, 0.0], 1.0, &[0.1, 0.05, 0.025]).unwrap();
        assert!(est.exact);
        assert!(est.order.is_none());
    }
}
