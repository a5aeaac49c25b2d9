//! The symplectic manifold `(ℝ^q × M, ω̂)` with `ω̂ = pr*Ω + Σ dsᵢ ∧ pr*λᵢ`.
//!
//! Extended coordinates are ordered `(s₁, …, s_q, x₁, …, x_dim)`.
//!
//! Hamiltonian fields upstairs are taken in the column convention
//! `Ŵ·X_F = dF`, and `i_X ω̂` below means `Ŵ·X`. Brackets
//! `{F, K} = ω̂(X_F, X_K)` do not depend on this choice; under it the
//! extended Reeb fields are exactly the Hamiltonian fields of the `sᵢ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior;
use crate::fd::FdConfig;
use crate::field::{ScalarField, TwoFormField};
use crate::linalg::{rank, GuardedLu};
use crate::structure::QCosymplecticStructure;
use crate::vector_fields::poisson_bracket;

#[derive(Debug, Clone)]
pub struct SymplecticStructure {
    pub base: QCosymplecticStructure,
    /// `s₁..s_q` followed by the base labels; `n` of this chart is `n + q`.
    pub names: Vec<String>,
    pub omega_hat: TwoFormField,
}

impl SymplecticStructure {
    pub fn dim(&self) -> usize {
        self.base.dim() + self.base.chart().q()
    }

    pub fn q(&self) -> usize {
        self.base.chart().q()
    }

    /// `pr(s, x) = x`.
    pub fn project<'a>(&self, y: &'a [f64]) -> &'a [f64] {
        &y[self.q()..]
    }

    /// Solves `Ŵ·X = dF` at `y`.
    pub fn hamiltonian_vector(&self, y: &[f64], df: &DVector<f64>) -> Result<DVector<f64>> {
        let lu = GuardedLu::new(self.omega_hat.eval(y), self.base.fd_config().cond_max)?;
        Ok(lu.solve(df))
    }

    /// `{F, K}_ω̂(y) = ω̂(X_F, X_K)`.
    pub fn bracket(&self, f: &ScalarField, k: &ScalarField, y: &[f64]) -> Result<f64> {
        let cfg = self.base.fd_config();
        let xf = self.hamiltonian_vector(y, &f.differential(y, cfg))?;
        let xk = self.hamiltonian_vector(y, &k.differential(y, cfg))?;
        Ok(xf.dot(&(self.omega_hat.eval(y) * xk)))
    }

    pub fn determinant(&self, y: &[f64]) -> f64 {
        self.omega_hat.eval(y).determinant()
    }

    pub fn rank_at(&self, y: &[f64]) -> usize {
        rank(&self.omega_hat.eval(y), self.base.fd_config().tol_linear)
    }

    pub fn closedness_residual(&self, y: &[f64], cfg: &FdConfig) -> Result<f64> {
        exterior::two_form_cyclic_sum(&|p: &[f64]| Ok(self.omega_hat.eval(p)), y, cfg)
    }
}

/// Builds `ω̂` blockwise: `W` in the base block, `Ŵ[sᵢ, a] = λᵢ_a` and
/// `Ŵ[a, sᵢ] = −λᵢ_a` for the coupling.
///
/// Fails when the base musical matrix is singular at `probe`, which signals
/// an invalid input structure.
pub fn symplectize(s: &QCosymplecticStructure, probe: &[f64]) -> Result<SymplecticStructure> {
    s.frame_at(probe)?;
    let q = s.chart().q();
    let dim = s.dim();
    let mut names: Vec<String> = (1..=q).map(|i| format!("s{i}")).collect();
    names.extend(s.chart().names().iter().cloned());

    let omega = s.omega().clone();
    let lambdas = s.lambdas().to_vec();
    let omega_hat = TwoFormField::new(move |y| {
        let x = &y[q..];
        let mut w = DMatrix::zeros(dim + q, dim + q);
        w.view_mut((q, q), (dim, dim)).copy_from(&omega.eval(x));
        for (i, l) in lambdas.iter().enumerate() {
            let li = l.eval(x);
            for a in 0..dim {
                w[(i, q + a)] += li[a];
                w[(q + a, i)] -= li[a];
            }
        }
        w
    });
    Ok(SymplecticStructure {
        base: s.clone(),
        names,
        omega_hat,
    })
}

/// Largest `|{f∘pr, k∘pr}_ω̂ − {f, k} ∘ pr|` over the points of `ℝ^q × M`.
pub fn poisson_morphism_residual(
    sym: &SymplecticStructure,
    f: &ScalarField,
    k: &ScalarField,
    points: &[Vec<f64>],
) -> Result<f64> {
    let q = sym.q();
    let total = sym.dim();
    let fu = f.pulled_back_by_projection(q, total);
    let ku = k.pulled_back_by_projection(q, total);
    let mut worst = 0.0_f64;
    for y in points {
        if y.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: y.len(),
            });
        }
        let up = sym.bracket(&fu, &ku, y)?;
        let down = poisson_bracket(&sym.base, f, k, sym.project(y))?;
        worst = worst.max((up - down).abs());
    }
    Ok(worst)
}

/// True iff `pr` intertwines the brackets to 1e-8 at every point.
pub fn check_poisson_morphism(
    sym: &SymplecticStructure,
    f: &ScalarField,
    k: &ScalarField,
    points: &[Vec<f64>],
) -> bool {
    matches!(poisson_morphism_residual(sym, f, k, points), Ok(r) if r <= 1e-8)
}

/// `i_{R̂ᵢ} ω̂` (column convention) for a vector `v` on M extended by zeros.
pub fn contract_extended(sym: &SymplecticStructure, y: &[f64], v: &DVector<f64>) -> DVector<f64> {
    let q = sym.q();
    let mut ext = DVector::zeros(sym.dim());
    ext.rows_mut(q, v.len()).copy_from(v);
    sym.omega_hat.eval(y) * ext
}

/// Largest component of `i_{R̂ᵢ} ω̂ − dsᵢ` over all `i` and points.
pub fn extended_reeb_residual(sym: &SymplecticStructure, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for y in points {
        let frame = sym.base.frame_at(sym.project(y))?;
        for (i, r) in frame.reeb.iter().enumerate() {
            let mut c = contract_extended(sym, y, r);
            c[i] -= 1.0;
            worst = worst.max(c.amax());
        }
    }
    Ok(worst)
}

/// True iff every extended Reeb field is Hamiltonian for `sᵢ` to 1e-10.
pub fn extended_reeb_check(sym: &SymplecticStructure, points: &[Vec<f64>]) -> bool {
    matches!(extended_reeb_residual(sym, points), Ok(r) if r <= 1e-10)
}
