use serde::{Deserialize, Serialize};

use super::action_angle::action;
use super::averaging::{averaged_slow_field, AveragingMode, DEFAULT_AVERAGING_NODES};
use super::model::{full_field, hamiltonian, FastSlowModel, FrequencyProfile, PotentialKind};
use super::momentum::{momentum_map_case_a, momentum_map_case_b};
use super::{idx, LABELS};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::flow::{integrate, IntegratorConfig, Method, StepStats, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioCase {
    /// Constant frequency `ω₀` and slow potential `½(Q² + P²)`.
    CaseA,
    /// `ω = √(1 + Q²)`, `V = QP cos τ`.
    CaseB,
    /// The averaged reduction of [`ScenarioCase::CaseB`].
    CaseBAveraged,
    /// Frequency and potential taken from `frequency` and `potential`.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub case: ScenarioCase,
    pub eps: f64,
    /// `(t, τ, q, p, Q, P)`
    pub x0: [f64; 6],
    pub t_max: f64,
    pub integrator: IntegratorConfig,
    pub seed: u64,
    /// Frequency of [`ScenarioCase::CaseA`].
    pub omega0: f64,
    /// Frozen action of averaged runs; computed from `x0` when absent.
    pub action_override: Option<f64>,
    /// Average the slow drift over `τ` as well as over the fast angle.
    pub secular_tau_average: bool,
    pub averaging_nodes: usize,
    pub frequency: FrequencyProfile,
    pub potential: PotentialKind,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::builtin(ScenarioCase::CaseB)
    }
}

impl ScenarioConfig {
    /// `ε = 0.05`, `x0 = (0, 0, 1, 0, 1, 0)`, horizon 200, adaptive `rtol = 1e-9`.
    pub fn builtin(case: ScenarioCase) -> Self {
        Self {
            case,
            eps: 0.05,
            x0: [0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
            t_max: 200.0,
            integrator: IntegratorConfig::adaptive(1e-9, 1e-12, 200.0),
            seed: 0,
            omega0: 1.0,
            action_override: None,
            secular_tau_average: true,
            averaging_nodes: DEFAULT_AVERAGING_NODES,
            frequency: FrequencyProfile::SqrtOnePlusSquare,
            potential: PotentialKind::QpCosTau,
        }
    }

    pub fn is_averaged(&self) -> bool {
        self.case == ScenarioCase::CaseBAveraged
    }

    /// The integrator settings with the scenario horizon applied.
    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            t_max: self.t_max,
            ..self.integrator
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be >= 0, got {}",
                self.eps
            )));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("x0 must be finite".into()));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if let Some(i) = self.action_override {
            if !(i.is_finite() && i >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "action_override must be >= 0, got {i}"
                )));
            }
        }
        if self.averaging_nodes < 8 || !self.averaging_nodes.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "averaging_nodes must be even and >= 8, got {}",
                self.averaging_nodes
            )));
        }
        self.integrator_config().validate()
    }

    pub fn model(&self) -> Result<FastSlowModel> {
        match self.case {
            ScenarioCase::CaseA => FastSlowModel::case_a(self.omega0, self.eps),
            ScenarioCase::CaseB | ScenarioCase::CaseBAveraged => FastSlowModel::case_b(self.eps),
            ScenarioCase::Custom => {
                FastSlowModel::from_profile(self.frequency, self.potential, self.eps)
            }
        }
    }

    fn initial_action(&self, model: &FastSlowModel) -> Result<f64> {
        match self.action_override {
            Some(i) => Ok(i),
            None => action(
                self.x0[idx::Q],
                self.x0[idx::P],
                self.x0[idx::SLOW_Q],
                model,
            ),
        }
    }

    fn averaging_mode(&self) -> AveragingMode {
        AveragingMode::from_secular(self.secular_tau_average)
    }
}

/// Extra diagnostics of an averaged run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedDiagnostics {
    pub action: f64,
    /// `−ω′(Q₀)·I`
    pub expected_slope: f64,
    /// Least-squares slope of `P` against `s`.
    pub fitted_slope: f64,
    pub slope_relative_error: f64,
    /// `max |Q(s) − Q(0)|`
    pub q_max_deviation: f64,
    /// `max |P(s) − P(0) − expected_slope·s|`
    pub linearity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub initial_action: f64,
    /// `max |I(s) − I(0)|`
    pub adiabatic_drift: f64,
    pub j_relative_drift: Option<f64>,
    pub h_relative_drift: Option<f64>,
    /// Largest departure of the clocks from `t = t₀ + s`, `τ = τ₀ + εs`.
    pub clock_residual: f64,
    pub averaged: Option<AveragedDiagnostics>,
    pub steps: StepStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub diagnostics: DiagnosticsReport,
    /// State coordinate names of `trajectory`.
    pub labels: Vec<String>,
}

impl ScenarioRun {
    pub fn is_averaged(&self) -> bool {
        self.diagnostics.averaged.is_some()
    }
}

/// The action `I` as a scalar field on the full phase space.
fn action_field(model: &FastSlowModel) -> ScalarField {
    let m = model.clone();
    ScalarField::new(move |x| action(x[idx::Q], x[idx::P], x[idx::SLOW_Q], &m).unwrap_or(f64::NAN))
}

fn max_abs_deviation(values: &[f64], reference: impl Fn(usize) -> f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - reference(k)).abs())
        .fold(0.0, f64::max)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let model = cfg.model()?;
    if cfg.is_averaged() {
        run_averaged(cfg, &model)
    } else {
        run_full(cfg, &model)
    }
}

fn run_full(cfg: &ScenarioConfig, model: &FastSlowModel) -> Result<ScenarioRun> {
    let j = match cfg.case {
        ScenarioCase::CaseA => momentum_map_case_a(cfg.omega0),
        _ => momentum_map_case_b(model),
    };
    let monitors = vec![
        ("I".to_string(), action_field(model)),
        ("J".to_string(), j),
        ("H".to_string(), hamiltonian(model)),
    ];
    let traj = integrate(
        &full_field(model),
        &cfg.x0,
        &cfg.integrator_config(),
        &monitors,
    )?;
    let actions = traj.monitor("I").expect("monitor registered");
    let i0 = actions[0];
    let clock_residual = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(s, y)| {
            let dt = (y[idx::T] - cfg.x0[idx::T] - s).abs();
            let dtau = (y[idx::TAU] - cfg.x0[idx::TAU] - model.eps * s).abs();
            dt.max(dtau)
        })
        .fold(0.0, f64::max);
    let diagnostics = DiagnosticsReport {
        initial_action: i0,
        adiabatic_drift: max_abs_deviation(actions, |_| i0),
        j_relative_drift: traj.relative_drift("J", 1e-300),
        h_relative_drift: traj.relative_drift("H", 1e-300),
        clock_residual,
        averaged: None,
        steps: traj.stats.clone(),
    };
    Ok(ScenarioRun {
        trajectory: traj,
        diagnostics,
        labels: LABELS.iter().map(|s| s.to_string()).collect(),
    })
}

fn run_averaged(cfg: &ScenarioConfig, model: &FastSlowModel) -> Result<ScenarioRun> {
    let i0 = cfg.initial_action(model)?;
    let field = averaged_slow_field(model, i0, cfg.averaging_mode(), cfg.averaging_nodes)?;
    let y0 = [cfg.x0[idx::TAU], cfg.x0[idx::SLOW_Q], cfg.x0[idx::SLOW_P]];
    let monitors = vec![("I".to_string(), ScalarField::constant(i0, 3))];
    let traj = integrate(&field, &y0, &cfg.integrator_config(), &monitors)?;

    let qs = traj.component(1);
    let ps = traj.component(2);
    let expected_slope = -model.omega_prime_at(y0[1]) * i0;
    let fitted_slope = least_squares_slope(&traj.times, &ps);
    let slope_relative_error = if expected_slope == 0.0 {
        fitted_slope.abs()
    } else {
        ((fitted_slope - expected_slope) / expected_slope).abs()
    };
    let averaged = AveragedDiagnostics {
        action: i0,
        expected_slope,
        fitted_slope,
        slope_relative_error,
        q_max_deviation: max_abs_deviation(&qs, |_| y0[1]),
        linearity_residual: max_abs_deviation(&ps, |k| y0[2] + expected_slope * traj.times[k]),
    };
    let clock_residual =
        max_abs_deviation(&traj.component(0), |k| y0[0] + model.eps * traj.times[k]);
    let diagnostics = DiagnosticsReport {
        initial_action: i0,
        adiabatic_drift: 0.0,
        j_relative_drift: None,
        h_relative_drift: None,
        clock_residual,
        averaged: Some(averaged),
        steps: traj.stats.clone(),
    };
    Ok(ScenarioRun {
        trajectory: traj,
        diagnostics,
        labels: super::AVERAGED_LABELS
            .iter()
            .map(|s| s.to_string())
            .collect(),
    })
}

/// Full versus averaged dynamics at `ε` and `ε/2`, each over `[0, 1/ε]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComparisonConfig {
    /// Supplies the model family, `ε`, `x0` and the quadrature nodes.
    pub scenario: ScenarioConfig,
    /// RK4 step shared by both systems so their samples coincide.
    pub dt: f64,
    pub secular_tau_average: bool,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::builtin(ScenarioCase::CaseB),
            dt: 1e-3,
            secular_tau_average: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRun {
    pub eps: f64,
    pub horizon: f64,
    pub full: Trajectory,
    /// States `(τ, Q, P)` on the same time grid as `full`.
    pub averaged: Trajectory,
    /// `|Q − Q_av|` at each sample.
    pub deviation_q: Vec<f64>,
    /// `|P − P_av|` at each sample.
    pub deviation_p: Vec<f64>,
    pub sup_deviation_q: f64,
    pub sup_deviation_p: f64,
    /// `max |I(s) − I(0)|` along the full run.
    pub sup_deviation_action: f64,
}

impl ComparisonRun {
    pub fn sup_deviation(&self) -> f64 {
        self.sup_deviation_q.max(self.sup_deviation_p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub runs: [ComparisonRun; 2],
    /// `sup_dev(ε) / sup_dev(ε/2)`
    pub ratio: f64,
    /// `log₂` of `ratio`: the empirical order in `ε`.
    pub exponent: f64,
}

fn compare_at(cfg: &ComparisonConfig, eps: f64) -> Result<ComparisonRun> {
    let scenario = ScenarioConfig {
        case: match cfg.scenario.case {
            ScenarioCase::CaseBAveraged => ScenarioCase::CaseB,
            c => c,
        },
        eps,
        ..cfg.scenario.clone()
    };
    let model = scenario.model()?;
    let horizon = 1.0 / eps;
    let mut icfg = IntegratorConfig::rk4(cfg.dt, horizon);
    icfg.method = Method::Rk4Fixed;
    let x0 = scenario.x0;

    let i_field = action_field(&model);
    let full = integrate(
        &full_field(&model),
        &x0,
        &icfg,
        &[("I".to_string(), i_field)],
    )?;
    let i0 = scenario.initial_action(&model)?;
    let mode = AveragingMode::from_secular(cfg.secular_tau_average);
    let av_field = averaged_slow_field(&model, i0, mode, scenario.averaging_nodes)?;
    let averaged = integrate(
        &av_field,
        &[x0[idx::TAU], x0[idx::SLOW_Q], x0[idx::SLOW_P]],
        &icfg,
        &[("I".to_string(), ScalarField::constant(i0, 3))],
    )?;
    debug_assert_eq!(full.times, averaged.times);

    let deviation_q: Vec<f64> = full
        .states
        .iter()
        .zip(&averaged.states)
        .map(|(a, b)| (a[idx::SLOW_Q] - b[1]).abs())
        .collect();
    let deviation_p: Vec<f64> = full
        .states
        .iter()
        .zip(&averaged.states)
        .map(|(a, b)| (a[idx::SLOW_P] - b[2]).abs())
        .collect();
    let actions = full.monitor("I").expect("monitor registered");
    let sup_deviation_action = max_abs_deviation(actions, |_| actions[0]);
    Ok(ComparisonRun {
        eps,
        horizon,
        sup_deviation_q: deviation_q.iter().copied().fold(0.0, f64::max),
        sup_deviation_p: deviation_p.iter().copied().fold(0.0, f64::max),
        sup_deviation_action,
        deviation_q,
        deviation_p,
        full,
        averaged,
    })
}

pub fn compare_full_vs_averaged(cfg: &ComparisonConfig) -> Result<ComparisonReport> {
    cfg.scenario.validate()?;
    let eps = cfg.scenario.eps;
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("comparison needs eps > 0".into()));
    }
    if !(cfg.dt.is_finite() && cfg.dt > 0.0 && cfg.dt <= 1.0 / eps) {
        return Err(Error::InvalidArgument(format!(
            "dt = {} must lie in (0, 1/eps]",
            cfg.dt
        )));
    }
    let (coarse, fine) = std::thread::scope(|scope| {
        let h = scope.spawn(|| compare_at(cfg, eps));
        let fine = compare_at(cfg, eps / 2.0);
        (h.join().expect("comparison thread panicked"), fine)
    });
    let runs = [coarse?, fine?];
    let ratio = runs[0].sup_deviation() / runs[1].sup_deviation();
    Ok(ComparisonReport {
        exponent: ratio.log2(),
        ratio,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_defaults() {
        let c = ScenarioConfig::builtin(ScenarioCase::CaseA);
        assert_eq!(c.eps, 0.05);
        assert_eq!(c.t_max, 200.0);
        assert_eq!(c.x0, [0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = ScenarioConfig::default();
        let bad = [
            ScenarioConfig {
                eps: -0.1,
                ..base.clone()
            },
            ScenarioConfig {
                t_max: 0.0,
                ..base.clone()
            },
            ScenarioConfig {
                averaging_nodes: 7,
                ..base.clone()
            },
            ScenarioConfig {
                action_override: Some(-1.0),
                ..base.clone()
            },
            ScenarioConfig {
                x0: [f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0],
                ..base
            },
        ];
        for c in bad {
            assert!(run_scenario(&c).is_err(), "{c:?}");
        }
    }

    #[test]
    fn clocks_run_at_unit_and_eps_rates() {
        let cfg = ScenarioConfig {
            t_max: 20.0,
            ..ScenarioConfig::builtin(ScenarioCase::CaseB)
        };
        let run = run_scenario(&cfg).unwrap();
        assert!(run.diagnostics.clock_residual < 1e-10);
        assert!(run.diagnostics.adiabatic_drift < 0.05);
        assert_eq!(run.labels.len(), 6);
    }

    #[test]
    fn averaged_case_b_moves_p_linearly() {
        let cfg = ScenarioConfig {
            t_max: 10.0,
            ..ScenarioConfig::builtin(ScenarioCase::CaseBAveraged)
        };
        let run = run_scenario(&cfg).unwrap();
        let av = run.diagnostics.averaged.unwrap();
        assert!((av.action - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((av.expected_slope + 0.5).abs() < 1e-14);
        assert!(av.slope_relative_error < 1e-10);
        assert!(av.q_max_deviation < 1e-12);
        assert_eq!(run.labels, ["tau", "Q", "P"]);
    }

    #[test]
    fn zero_potential_keeps_q_fixed_in_both_systems() {
        let cfg = ComparisonConfig {
            scenario: ScenarioConfig {
                case: ScenarioCase::Custom,
                eps: 0.5,
                potential: PotentialKind::Zero,
                ..ScenarioConfig::default()
            },
            dt: 1e-2,
            secular_tau_average: false,
        };
        let rep = compare_full_vs_averaged(&cfg).unwrap();
        for run in &rep.runs {
            assert_eq!(run.sup_deviation_q, 0.0);
            assert!(run.full.component(idx::SLOW_Q).iter().all(|&q| q == 1.0));
            assert_eq!(run.full.len(), run.averaged.len());
        }
    }
}
