//! Numerics for q-cosymplectic manifolds.
//!
//! A q-cosymplectic structure on a `(2n + q)`-manifold is a closed 2-form `Ω`
//! of rank `2n` together with `q` closed, pointwise independent 1-forms
//! `λᵢ` such that `ker Ω` is complementary to `∩ ker λᵢ`. This crate works in
//! a single chart and provides
//!
//! - the musical isomorphism and the Reeb, gradient, Hamiltonian and
//!   evolution fields ([`structure`], [`vector_fields`]);
//! - the Poisson bracket, Lie brackets, sample-based axiom checks and
//!   deformations ([`validate`], [`deform`]);
//! - the symplectization `(ℝ^q × M, ω̂)` ([`symplectization`]);
//! - RK4 / Dormand–Prince integration with monitored first integrals ([`flow`]);
//! - the fast–slow oscillator on `ℝ⁶` with action–angle variables, averaging
//!   and momentum maps ([`fastslow`]).

pub use nalgebra;

pub mod catalog;
pub mod chart;
pub mod deform;
pub mod error;
pub mod exterior;
pub mod fastslow;
pub mod fd;
pub mod field;
pub mod flow;
pub mod linalg;
pub mod sampling;
pub mod structure;
pub mod symplectization;
pub mod validate;
pub mod vector_fields;

pub use chart::Chart;
pub use deform::deform_structure;
pub use error::{Error, Result};
pub use fd::FdConfig;
pub use field::{OneFormField, ScalarField, TwoFormField, VectorField};
pub use flow::{integrate, IntegratorConfig, Method, Trajectory};
pub use structure::{PointFrame, QCosymplecticStructure};
pub use symplectization::{symplectize, SymplecticStructure};
pub use validate::{validate_structure, ValidationReport};
pub use vector_fields::{
    bracket_field, check_automorphism, evolution_field, gradient_field, hamiltonian_field,
    is_local_gradient, lie_bracket, poisson_bracket,
};
