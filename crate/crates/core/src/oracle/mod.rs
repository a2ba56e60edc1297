//! Exact brute-force references for small probe–sample systems.
//!
//! Nothing here uses the perturbative machinery: states come from exact
//! diagonalisation of the joint Hamiltonian and β-derivatives from central
//! differences.

mod appendix;
mod fit;
mod series;

#[cfg(test)]
mod references;

pub use appendix::{appendix_a1, appendix_a2, appendix_a2_transposed, appendix_models, Extracted, AppendixA1, AppendixA2, AppendixModels};
pub use fit::{log_grid, order_fit, order_fit_with, FitStatus, OrderFit};
pub use series::{bath_corr_series, hurwitz_zeta};

use crate::linalg::{
    gibbs_state, identity, kron, partial_trace_bath, CMatrix, DensityOperator, HermitianOperator,
};
use crate::metrology::fishers_from_state;
use crate::models::{Discrete, ProbeModel};
use crate::{Error, Result, Tolerances, C64};

/// Largest joint dimension the oracle will diagonalise.
pub const MAX_JOINT_DIM: usize = 4096;

/// `H = H_S ⊗ 𝟙 + 𝟙 ⊗ H_B + γ S ⊗ B`, probe index slowest.
#[derive(Debug, Clone)]
pub struct JointModel {
    probe: ProbeModel,
    bath: Discrete,
    gamma: f64,
    h_total: HermitianOperator,
}

impl JointModel {
    pub fn new(probe: ProbeModel, bath: Discrete, gamma: f64) -> Result<Self> {
        let dim = probe.dim() * bath.dim();
        if dim > MAX_JOINT_DIM {
            return Err(Error::DimensionLimit { dim, limit: MAX_JOINT_DIM });
        }
        if !gamma.is_finite() {
            return Err(Error::Domain("γ must be finite".into()));
        }
        let ds = probe.dim();
        let db = bath.dim();
        let h = kron(probe.hamiltonian().matrix(), &identity(db))
            + kron(&identity(ds), bath.hamiltonian().matrix())
            + kron(probe.coupling().matrix(), bath.coupling().matrix()) * C64::new(gamma, 0.0);
        let h_total = HermitianOperator::symmetrized(&h);
        Ok(Self {
            probe,
            bath,
            gamma,
            h_total,
        })
    }

    pub fn probe(&self) -> &ProbeModel {
        &self.probe
    }

    pub fn bath(&self) -> &Discrete {
        &self.bath
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h_total
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.probe.clone(), self.bath.clone(), gamma)
    }
}

/// `tr_B e^{−βH}/Z̃`.
pub fn exact_mfg(j: &JointModel, beta: f64) -> Result<DensityOperator> {
    let g = gibbs_state(&j.h_total, beta)?;
    let reduced = partial_trace_bath(g.state.matrix(), j.probe.dim(), j.bath.dim())?;
    DensityOperator::new(crate::linalg::hermitian_part(&reduced))
}

/// Exact mean-force state, its β-derivative, SLD and Fisher informations.
#[derive(Debug, Clone)]
pub struct ExactFishers {
    pub qfi: f64,
    /// Energy-measurement CFI.
    pub cfi: f64,
    pub state: DensityOperator,
    pub derivative: HermitianOperator,
    pub sld: HermitianOperator,
    /// `|F(h) − F(h/2)| / F` of the two central differences.
    pub richardson_gap: f64,
}

/// Central differences at steps `h` and `h/2`, Richardson-combined.
/// `h = None` uses `fd_step · β`.
pub fn exact_fishers(j: &JointModel, beta: f64, h: Option<f64>) -> Result<ExactFishers> {
    exact_fishers_with(j, beta, h, &Tolerances::DEFAULT)
}

pub fn exact_fishers_with(j: &JointModel, beta: f64, h: Option<f64>, tol: &Tolerances) -> Result<ExactFishers> {
    let h = h.unwrap_or(tol.fd_step * beta);
    if !(h > 0.0) || h >= beta {
        return Err(Error::Domain(format!("difference step must lie in (0, β), got {h}")));
    }
    let state = exact_mfg(j, beta)?;
    let central = |h: f64| -> Result<CMatrix> {
        let hi = exact_mfg(j, beta + h)?;
        let lo = exact_mfg(j, beta - h)?;
        Ok((hi.matrix() - lo.matrix()) * C64::new(0.5 / h, 0.0))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let basis = j.probe.spectrum();
    let traceless = |m: CMatrix| {
        let shift = crate::linalg::trace(&m) / m.nrows() as f64;
        HermitianOperator::symmetrized(&(m - identity(basis.dim()) * shift))
    };
    let (f1, _) = fishers_from_state(&state, &traceless(d1.clone()), basis)?;
    let (f2, _) = fishers_from_state(&state, &traceless(d2.clone()), basis)?;
    let gap = (f1 - f2).abs() / f2.abs().max(f64::MIN_POSITIVE);
    if gap > tol.richardson && (f1 - f2).abs() > tol.noise_floor {
        return Err(Error::Numerical(format!(
            "finite-difference QFI not converged at β={beta}: relative change {gap:.3e} on halving h"
        )));
    }
    let derivative = traceless((&d2 * C64::new(4.0, 0.0) - &d1) * C64::new(1.0 / 3.0, 0.0));
    let (qfi, cfi) = fishers_from_state(&state, &derivative, basis)?;
    let sld = crate::linalg::sld_solve(&state, &derivative)?;
    Ok(ExactFishers {
        qfi,
        cfi,
        state,
        derivative,
        sld,
        richardson_gap: gap,
    })
}

/// Low-order Taylor coefficients in γ of exact quantities, from symmetric
/// `±γ` differences at one β.
#[derive(Debug, Clone)]
pub struct GammaCoefficients {
    pub gamma: f64,
    /// `∂_γ π̃_S` at γ = 0.
    pub state_first: CMatrix,
    /// `½ ∂²_γ π̃_S` at γ = 0.
    pub state_second: CMatrix,
    /// `∂_γ L_S` at γ = 0.
    pub sld_first: CMatrix,
    /// `∂_γ 𝓕` at γ = 0.
    pub qfi_first: f64,
    /// `½ ∂²_γ (𝓕 − 𝓘)` at γ = 0.
    pub fi_gap_second: f64,
}

pub fn gamma_coefficients(j: &JointModel, beta: f64, gamma: f64) -> Result<GammaCoefficients> {
    let plus = exact_fishers(&j.with_gamma(gamma)?, beta, None)?;
    let minus = exact_fishers(&j.with_gamma(-gamma)?, beta, None)?;
    let zero = exact_mfg(&j.with_gamma(0.0)?, beta)?;
    let odd = |a: &CMatrix, b: &CMatrix| (a - b) * C64::new(0.5 / gamma, 0.0);
    let state_second = (plus.state.matrix() + minus.state.matrix() - zero.matrix() * C64::new(2.0, 0.0))
        * C64::new(0.5 / (gamma * gamma), 0.0);
    Ok(GammaCoefficients {
        gamma,
        state_first: odd(plus.state.matrix(), minus.state.matrix()),
        state_second,
        sld_first: odd(plus.sld.matrix(), minus.sld.matrix()),
        qfi_first: (plus.qfi - minus.qfi) / (2.0 * gamma),
        fi_gap_second: ((plus.qfi - plus.cfi) + (minus.qfi - minus.cfi)) / (2.0 * gamma * gamma),
    })
}
