//! Two-qubit models with closed-form low-order coefficients.
//!
//! Both use `H_S = σ_z`, `H_B = σ_z`. Coefficients are read off in the
//! computational basis, `|↑⟩` first.

use super::{gamma_coefficients, JointModel};
use crate::linalg::{pauli, HermitianOperator};
use crate::models::{bath_qubit, BathQubitCoupling, Discrete, ProbeModel};
use crate::Result;

fn probe_sigma_z(coupling: ndarray::Array2<crate::C64>, label: &str) -> Result<ProbeModel> {
    ProbeModel::new(HermitianOperator::new(pauli::sigma_z())?, HermitianOperator::new(coupling)?, 0.0, label)
}

/// Coefficients extracted from the exact model at one β.
#[derive(Debug, Clone, Copy)]
pub struct Extracted {
    pub p1: f64,
    pub p2: f64,
    pub l1: f64,
    /// `∂_γ𝓕` for A.1, `(𝓕 − 𝓘)/γ²` for A.2.
    pub fisher: f64,
    /// Largest change of the four numbers when γ is halved.
    pub refinement_gap: f64,
}

/// `S = σ_z`, `B = σ_z`: everything commutes, `⟨B⟩ = −tanh β ≠ 0`.
#[derive(Debug, Clone)]
pub struct AppendixA1 {
    pub joint: JointModel,
}

/// `S = σ_x`, `B = |↑⟩⟨↑|`: `⟨B⟩ = (1 − tanh β)/2 ≠ 0`.
#[derive(Debug, Clone)]
pub struct AppendixA2 {
    pub joint: JointModel,
}

pub fn appendix_a1() -> Result<AppendixA1> {
    let probe = probe_sigma_z(pauli::sigma_z(), "σ_z probe, σ_z coupling")?;
    Ok(AppendixA1 {
        joint: JointModel::new(probe, bath_qubit(1.0, BathQubitCoupling::SigmaZ)?, 0.0)?,
    })
}

pub fn appendix_a2() -> Result<AppendixA2> {
    let probe = probe_sigma_z(pauli::sigma_x(), "σ_z probe, σ_x coupling")?;
    Ok(AppendixA2 {
        joint: JointModel::new(probe, bath_qubit(1.0, BathQubitCoupling::Projector)?, 0.0)?,
    })
}

/// The projector placed on the probe and `σ_x` on the sample instead. The
/// reduced state stays diagonal, so `𝓕 = 𝓘` identically.
pub fn appendix_a2_transposed() -> Result<JointModel> {
    let probe = probe_sigma_z(pauli::projector_up(), "σ_z probe, projector coupling")?;
    let bath = Discrete::new(
        HermitianOperator::new(pauli::sigma_z())?,
        HermitianOperator::new(pauli::sigma_x())?,
    )?;
    JointModel::new(probe, bath, 0.0)
}

#[derive(Debug, Clone)]
pub struct AppendixModels {
    pub a1: AppendixA1,
    pub a2: AppendixA2,
}

pub fn appendix_models() -> Result<AppendixModels> {
    Ok(AppendixModels {
        a1: appendix_a1()?,
        a2: appendix_a2()?,
    })
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn extract(j: &JointModel, beta: f64, gamma: f64, read: impl Fn(&super::GammaCoefficients) -> [f64; 4]) -> Result<Extracted> {
    let a = read(&gamma_coefficients(j, beta, gamma)?);
    let b = read(&gamma_coefficients(j, beta, 0.5 * gamma)?);
    let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Extracted {
        p1: b[0],
        p2: b[1],
        l1: b[2],
        fisher: b[3],
        refinement_gap: gap,
    })
}

impl AppendixA1 {
    pub fn p1(beta: f64) -> f64 {
        0.5 * beta * sech(beta).powi(2) * beta.tanh()
    }

    pub fn p2(beta: f64) -> f64 {
        0.5 * beta * beta * sech(beta).powi(2) * beta.tanh().powi(3)
    }

    pub fn l1(beta: f64) -> f64 {
        let t = beta.tanh();
        1.0 + t + sech(beta).powi(2) * (beta + 2.0 * beta * t - 1.0)
    }

    /// `∂_γ𝓕` at γ = 0.
    pub fn qfi_first(beta: f64) -> f64 {
        sech(beta).powi(4) * (beta * ((2.0 * beta).cosh() - 3.0) - (2.0 * beta).sinh())
    }

    pub fn extract(&self, beta: f64, gamma: f64) -> Result<Extracted> {
        extract(&self.joint, beta, gamma, |c| {
            [c.state_first[[0, 0]].re, c.state_second[[0, 0]].re, c.sld_first[[0, 0]].re, c.qfi_first]
        })
    }
}

impl AppendixA2 {
    pub fn p1(beta: f64) -> f64 {
        let t = beta.tanh();
        0.25 * t * (t - 1.0)
    }

    pub fn p2(beta: f64) -> f64 {
        let t = beta.tanh();
        0.125 * sech(beta) * (t - 1.0) * (beta * sech(beta) - beta.sinh())
    }

    /// Closed form as usually quoted; drops the `{H_S, p₁}` piece of the
    /// linear SLD.
    pub fn l1_quoted(beta: f64) -> f64 {
        0.5 * sech(beta).powi(2) * (2.0 * beta.tanh() - 1.0)
    }

    /// Off-diagonal entry of the linear SLD including the `t²(t − 1)/2` term.
    pub fn l1(beta: f64) -> f64 {
        let t = beta.tanh();
        Self::l1_quoted(beta) + 0.5 * t * t * (t - 1.0)
    }

    pub fn fi_gap_quoted(beta: f64) -> f64 {
        Self::l1_quoted(beta).powi(2)
    }

    /// `(𝓕 − 𝓘)/γ²`: the off-diagonal SLD entry squared.
    pub fn fi_gap(beta: f64) -> f64 {
        Self::l1(beta).powi(2)
    }

    pub fn extract(&self, beta: f64, gamma: f64) -> Result<Extracted> {
        extract(&self.joint, beta, gamma, |c| {
            [c.state_first[[0, 1]].re, c.state_second[[0, 0]].re, c.sld_first[[0, 1]].re, c.fi_gap_second]
        })
    }
}
