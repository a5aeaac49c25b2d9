//! Sample-based verification of the q-cosymplectic axioms.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::exterior;
use crate::fd::FdConfig;
use crate::linalg::{rank, GuardedLu};
use crate::structure::QCosymplecticStructure;

/// Outcome of every check at one sample point. Residuals are `None` when the
/// check could not be evaluated (e.g. Reeb relations at a singular point).
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    pub antisymmetry_residual: f64,
    pub antisymmetric: bool,
    pub omega_rank: usize,
    pub rank_ok: bool,
    pub lambdas_independent: bool,
    pub lambda_closedness_residual: f64,
    pub lambdas_closed: bool,
    pub omega_closedness_residual: f64,
    pub omega_closed: bool,
    pub musical_condition: f64,
    pub musical_invertible: bool,
    pub reeb_residual: Option<f64>,
    pub reeb_ok: bool,
}

impl PointReport {
    pub fn passed(&self) -> bool {
        self.antisymmetric
            && self.rank_ok
            && self.lambdas_independent
            && self.lambdas_closed
            && self.omega_closed
            && self.musical_invertible
            && self.reeb_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub q: usize,
    pub passed: bool,
    pub points: Vec<PointReport>,
}

impl ValidationReport {
    /// Names of the checks that failed at some point.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut flag = |name: &'static str, bad: bool| {
            if bad && !out.contains(&name) {
                out.push(name);
            }
        };
        for p in &self.points {
            flag("antisymmetry", !p.antisymmetric);
            flag("rank", !p.rank_ok);
            flag("lambda-independence", !p.lambdas_independent);
            flag("lambda-closedness", !p.lambdas_closed);
            flag("omega-closedness", !p.omega_closed);
            flag("musical-invertibility", !p.musical_invertible);
            flag("reeb-relations", !p.reeb_ok);
        }
        out
    }
}

fn check_point(s: &QCosymplecticStructure, x: &[f64], cfg: &FdConfig) -> PointReport {
    let n = s.chart().n();
    let q = s.chart().q();
    let w = s.omega().eval(x);
    let lambdas: Vec<_> = s.lambdas().iter().map(|l| l.eval(x)).collect();

    let antisymmetry_residual = (&w + w.transpose()).amax();
    let omega_rank = rank(&w, cfg.tol_linear);

    let mut stacked = DMatrix::zeros(q, x.len());
    for (i, l) in lambdas.iter().enumerate() {
        stacked.set_row(i, &l.transpose());
    }
    let lambdas_independent = rank(&stacked, cfg.tol_linear) == q;

    let lambda_closedness_residual = s
        .lambdas()
        .iter()
        .map(|l| exterior::one_form_curl(&|p: &[f64]| Ok(l.eval(p)), x, cfg).unwrap_or(f64::NAN))
        .fold(
            0.0,
            |acc: f64, r| if r.is_nan() { f64::NAN } else { acc.max(r) },
        );
    let omega_closedness_residual =
        exterior::two_form_cyclic_sum(&|p: &[f64]| Ok(s.omega().eval(p)), x, cfg)
            .unwrap_or(f64::NAN);

    let b = QCosymplecticStructure::assemble_musical(&w, &lambdas);
    let lu = GuardedLu::new(b, cfg.cond_max);
    let musical_condition = match &lu {
        Ok(lu) => lu.cond(),
        Err(crate::Error::SingularMusicalMatrix { cond, .. }) => *cond,
        Err(_) => f64::INFINITY,
    };

    // Ω(Rᵢ, ·) = 0 and λⱼ(Rᵢ) = δᵢⱼ
    let reeb_residual = lu.as_ref().ok().map(|lu| {
        let mut worst = 0.0_f64;
        for (i, li) in lambdas.iter().enumerate() {
            let r = lu.solve(li);
            worst = worst.max((w.transpose() * &r).amax());
            for (j, lj) in lambdas.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((lj.dot(&r) - delta).abs());
            }
        }
        worst
    });
    let scale = w.amax().max(1.0);

    PointReport {
        point: x.to_vec(),
        antisymmetric: antisymmetry_residual <= cfg.tol_linear * scale,
        antisymmetry_residual,
        rank_ok: omega_rank == 2 * n,
        omega_rank,
        lambdas_independent,
        lambdas_closed: lambda_closedness_residual <= cfg.tol_closed,
        lambda_closedness_residual,
        omega_closed: omega_closedness_residual <= cfg.tol_closed,
        omega_closedness_residual,
        musical_invertible: lu.is_ok(),
        musical_condition,
        reeb_ok: reeb_residual.is_some_and(|r| r <= cfg.tol_linear * musical_condition.max(1.0)),
        reeb_residual,
    }
}

/// Runs every structural check at every sample point. Failures are reported,
/// never raised.
pub fn validate_structure(
    s: &QCosymplecticStructure,
    sample_points: &[Vec<f64>],
    cfg: &FdConfig,
) -> ValidationReport {
    let points: Vec<PointReport> = sample_points
        .iter()
        .map(|x| {
            if x.len() != s.dim() {
                PointReport {
                    point: x.clone(),
                    antisymmetry_residual: f64::NAN,
                    antisymmetric: false,
                    omega_rank: 0,
                    rank_ok: false,
                    lambdas_independent: false,
                    lambda_closedness_residual: f64::NAN,
                    lambdas_closed: false,
                    omega_closedness_residual: f64::NAN,
                    omega_closed: false,
                    musical_condition: f64::INFINITY,
                    musical_invertible: false,
                    reeb_residual: None,
                    reeb_ok: false,
                }
            } else {
                check_point(s, x, cfg)
            }
        })
        .collect();
    ValidationReport {
        n: s.chart().n(),
        q: s.chart().q(),
        passed: !points.is_empty() && points.iter().all(PointReport::passed),
        points,
    }
}
