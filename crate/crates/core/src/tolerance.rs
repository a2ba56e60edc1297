//! Centralised numerical tolerances.

use serde::{Deserialize, Serialize};

/// Every threshold used by validation and numerics lives here.
///
/// Run configurations may override individual fields; anything omitted keeps
/// its default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Entrywise `|A_ij − conj(A_ji)|` allowed for a Hermitian operator.
    pub hermitian: f64,
    /// `|tr ρ − 1|` allowed for a density operator.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a density operator.
    pub psd: f64,
    /// Eigendecomposition reconstruction error, per entry.
    pub eig_reconstruction: f64,
    /// `λ_i + λ_j` below this is treated as zero support by the SLD solver.
    pub sld_support: f64,
    /// Derivative entries below this on zero support are set to zero.
    pub sld_derivative_zero: f64,
    /// Traceless check on `∂_β ρ` for the SLD solver.
    pub traceless: f64,
    /// Relative gap (to `‖H_S‖`) below which two levels are degenerate.
    pub degenerate_gap: f64,
    /// Second-order state eigenvalues below `-positivity` are an error.
    pub positivity: f64,
    /// Trace drift that triggers renormalisation of the second-order state.
    pub trace_drift: f64,
    /// `|⟨B⟩_B|` below this counts as vanishing.
    pub assumption_ii: f64,
    /// Relative finite-difference step in β.
    pub fd_step: f64,
    /// Richardson step-halving agreement required for exact Fisher informations.
    pub richardson: f64,
    /// Thermal population allowed in the highest retained Fock level.
    pub tail_population: f64,
    /// Order fits discard deviations below this absolute value.
    pub noise_floor: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        trace: 1e-12,
        psd: 1e-12,
        eig_reconstruction: 1e-10,
        sld_support: 1e-14,
        sld_derivative_zero: 1e-12,
        traceless: 1e-10,
        degenerate_gap: 1e-10,
        positivity: 1e-8,
        trace_drift: 1e-12,
        assumption_ii: 1e-12,
        fd_step: 1e-5,
        richardson: 1e-8,
        tail_population: 1e-8,
        noise_floor: 1e3 * f64::EPSILON,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
