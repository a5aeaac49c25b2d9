//! Scalar functions, forms and vector fields in chart coordinates.
//!
//! Every field is a cheaply clonable handle around a `Send + Sync` closure,
//! so fields can be shared between threads and captured by derived fields.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fd::{self, FdConfig};

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type CovectorFn = dyn Fn(&[f64]) -> DVector<f64> + Send + Sync;
type MatrixFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type VectorFn = dyn Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync;

/// A smooth function with an optional analytic differential.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<ScalarFn>,
    grad: Option<Arc<CovectorFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.grad.is_some())
            .finish()
    }
}

impl ScalarField {
    /// Function without an analytic gradient; differentials fall back to central differences.
    pub fn new(eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            grad: None,
        }
    }

    pub fn with_gradient(
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            grad: Some(Arc::new(grad)),
        }
    }

    pub fn constant(c: f64, dim: usize) -> Self {
        Self::with_gradient(move |_| c, move |_| DVector::zeros(dim))
    }

    /// The coordinate function `x ↦ x_index`.
    pub fn coordinate(index: usize, dim: usize) -> Self {
        Self::with_gradient(
            move |x| x[index],
            move |_| {
                let mut g = DVector::zeros(dim);
                g[index] = 1.0;
                g
            },
        )
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `df(x)`, analytic when available.
    pub fn differential(&self, x: &[f64], cfg: &FdConfig) -> DVector<f64> {
        match &self.grad {
            Some(g) => g(x),
            None => fd::gradient(&*self.eval, x, cfg),
        }
    }

    /// `df(x)` by central differences, ignoring any analytic gradient.
    pub fn fd_differential(&self, x: &[f64], cfg: &FdConfig) -> DVector<f64> {
        fd::gradient(&*self.eval, x, cfg)
    }

    /// Largest componentwise gap between the analytic and the finite-difference
    /// gradient; zero when no analytic gradient is attached.
    pub fn gradient_mismatch(&self, x: &[f64], cfg: &FdConfig) -> f64 {
        match &self.grad {
            Some(g) => (g(x) - self.fd_differential(x, cfg)).amax(),
            None => 0.0,
        }
    }

    /// Pointwise product, with the product rule applied to analytic gradients.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let (f, g) = (self.clone(), other.clone());
        let eval = {
            let (f, g) = (f.clone(), g.clone());
            move |x: &[f64]| f.eval(x) * g.eval(x)
        };
        match (&f.grad, &g.grad) {
            (Some(df), Some(dg)) => {
                let (df, dg) = (df.clone(), dg.clone());
                let (fe, ge) = (f.eval.clone(), g.eval.clone());
                ScalarField::with_gradient(eval, move |x| df(x) * ge(x) + dg(x) * fe(x))
            }
            _ => ScalarField::new(eval),
        }
    }

    /// Composition with a linear projection `y ↦ y[offset..offset + len]`.
    pub fn pulled_back_by_projection(&self, offset: usize, total_dim: usize) -> ScalarField {
        let f = self.clone();
        let eval = {
            let f = f.clone();
            move |y: &[f64]| f.eval(&y[offset..])
        };
        match &f.grad {
            Some(g) => {
                let g = g.clone();
                ScalarField::with_gradient(eval, move |y| {
                    let inner = g(&y[offset..]);
                    let mut out = DVector::zeros(total_dim);
                    out.rows_mut(offset, inner.len()).copy_from(&inner);
                    out
                })
            }
            None => ScalarField::new(eval),
        }
    }
}

/// A 1-form, given by its covector components `λ_a(x)`.
#[derive(Clone)]
pub struct OneFormField {
    eval: Arc<CovectorFn>,
}

impl fmt::Debug for OneFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OneFormField")
    }
}

impl OneFormField {
    pub fn new(eval: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
        }
    }

    pub fn constant(components: DVector<f64>) -> Self {
        Self::new(move |_| components.clone())
    }

    /// `dx_index`.
    pub fn coordinate_differential(index: usize, dim: usize) -> Self {
        let mut c = DVector::zeros(dim);
        c[index] = 1.0;
        Self::constant(c)
    }

    /// The exact form `df`.
    pub fn exact(f: &ScalarField, cfg: FdConfig) -> Self {
        let f = f.clone();
        Self::new(move |x| f.differential(x, &cfg))
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        (self.eval)(x)
    }
}

/// A 2-form, given by the antisymmetric component matrix `W_ab = Ω(e_a, e_b)`.
#[derive(Clone)]
pub struct TwoFormField {
    eval: Arc<MatrixFn>,
}

impl fmt::Debug for TwoFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TwoFormField")
    }
}

impl TwoFormField {
    pub fn new(eval: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
        }
    }

    pub fn constant(w: DMatrix<f64>) -> Self {
        Self::new(move |_| w.clone())
    }

    /// `Σ_j dx_{a_j} ∧ dx_{b_j}` for the given index pairs.
    pub fn darboux(dim: usize, pairs: &[(usize, usize)]) -> Self {
        let mut w = DMatrix::zeros(dim, dim);
        for &(a, b) in pairs {
            w[(a, b)] += 1.0;
            w[(b, a)] -= 1.0;
        }
        Self::constant(w)
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        (self.eval)(x)
    }
}

/// Components of `α ∧ β`: `α_a β_b − α_b β_a`.
pub fn wedge(alpha: &DVector<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    alpha * beta.transpose() - beta * alpha.transpose()
}

/// A vector field in chart coordinates.
///
/// Evaluation is fallible because derived fields invert the musical matrix.
#[derive(Clone)]
pub struct VectorField {
    eval: Arc<VectorFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("VectorField")
    }
}

impl VectorField {
    pub fn new(eval: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(move |x| Ok(eval(x))),
        }
    }

    pub fn fallible(eval: impl Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(move |_| DVector::zeros(dim))
    }

    pub fn constant(components: DVector<f64>) -> Self {
        Self::new(move |_| components.clone())
    }

    /// `∂/∂x_index`.
    pub fn coordinate(index: usize, dim: usize) -> Self {
        let mut c = DVector::zeros(dim);
        c[index] = 1.0;
        Self::constant(c)
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Result<DVector<f64>> {
        (self.eval)(x)
    }

    /// Directional derivative `X(f)(x) = df(X)`.
    pub fn apply(&self, f: &ScalarField, x: &[f64], cfg: &FdConfig) -> Result<f64> {
        let v = self.eval(x)?;
        let df = f.differential(x, cfg);
        if df.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                got: df.len(),
            });
        }
        Ok(df.dot(&v))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let (a, b) = (self.clone(), other.clone());
        VectorField::fallible(move |x| Ok(a.eval(x)? + b.eval(x)?))
    }

    pub fn scale(&self, c: f64) -> VectorField {
        let a = self.clone();
        VectorField::fallible(move |x| Ok(a.eval(x)? * c))
    }
}
