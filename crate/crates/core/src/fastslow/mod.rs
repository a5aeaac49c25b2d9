//! The fast–slow oscillator on the 2-cosymplectic manifold
//! `ℝ_t × ℝ_τ × T*ℝ × T*ℝ` with coordinates `(t, τ, q, p, Q, P)`:
//!
//! ```text
//! λ₁ = dt,  λ₂ = dτ,  Ω = dq∧dp + dQ∧dP
//! H  = ½p² + ½ω(Q)²q² + ε V(q, Q, P, τ)
//! ```
//!
//! `(q, p)` is a fast oscillator of frequency `ω(Q)`; `(Q, P)` drift slowly.

mod action_angle;
mod averaging;
mod model;
mod momentum;
mod scenario;

pub use action_angle::{action, from_action_angle, to_action_angle, ActionAngle};
pub use averaging::{
    averaged_hamiltonian, averaged_slow_field, slow_drift, theta_average, AveragingMode,
    AVERAGED_LABELS, DEFAULT_AVERAGING_NODES,
};
pub use model::{
    build_structure, full_field, hamiltonian, FastSlowModel, FrequencyProfile, Potential,
    PotentialKind,
};
pub use momentum::{
    generator_case_a, generator_case_b, momentum_map_case_a, momentum_map_case_b,
    momentum_map_residual,
};
pub use scenario::{
    compare_full_vs_averaged, run_scenario, AveragedDiagnostics, ComparisonConfig,
    ComparisonReport, ComparisonRun, DiagnosticsReport, ScenarioCase, ScenarioConfig, ScenarioRun,
};

/// Positions of the coordinates in a state vector.
pub mod idx {
    pub const T: usize = 0;
    pub const TAU: usize = 1;
    pub const Q: usize = 2;
    pub const P: usize = 3;
    pub const SLOW_Q: usize = 4;
    pub const SLOW_P: usize = 5;
}

pub const LABELS: [&str; 6] = ["t", "tau", "q", "p", "Q", "P"];
