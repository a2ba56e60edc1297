//! Gibbs states, dephasing and the symmetric logarithmic derivative.

use super::{
    check_same_dim, eigendecompose, real_trace_product, trace, CMatrix, DensityOperator,
    HermitianOperator, SpectralDecomposition,
};
use crate::{Error, Result, Tolerances, C64};

/// Thermal state `e^{−βH}/Z` together with `ln Z` and the spectral data it
/// was built from.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub state: DensityOperator,
    pub log_z: f64,
    /// Boltzmann weights in the order of `spectrum.eigenvalues()`.
    pub populations: Vec<f64>,
    pub spectrum: SpectralDecomposition,
}

/// `e^{−βH}/tr e^{−βH}`, exponentiated in the eigenbasis after shifting by the
/// ground energy so no weight exceeds one.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<GibbsState> {
    let spectrum = eigendecompose(h)?;
    gibbs_from_spectrum(spectrum, beta)
}

pub fn gibbs_from_spectrum(spectrum: SpectralDecomposition, beta: f64) -> Result<GibbsState> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("β must be finite and ≥ 0, got {beta}")));
    }
    let (populations, log_z) = boltzmann(spectrum.eigenvalues(), beta);
    let state = DensityOperator::from_trusted(super::hermitian_part(&spectrum.from_diagonal(&populations)));
    Ok(GibbsState {
        state,
        log_z,
        populations,
        spectrum,
    })
}

/// Normalised Boltzmann weights and `ln Z` for a list of energies.
pub fn boltzmann(energies: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-beta * (e - ground)).exp()).collect();
    let z: f64 = w.iter().sum();
    (w.iter().map(|x| x / z).collect(), z.ln() - beta * ground)
}

/// Keep only the diagonal of `q` in `basis`.
pub fn dephase(q: &HermitianOperator, basis: &SpectralDecomposition) -> Result<HermitianOperator> {
    if q.dim() != basis.dim() {
        return Err(Error::Validation(format!(
            "dephase: operator dim {} vs basis dim {}",
            q.dim(),
            basis.dim()
        )));
    }
    let inb = basis.to_basis(q.matrix());
    let d: Vec<f64> = inb.diag().iter().map(|z| z.re).collect();
    Ok(HermitianOperator::symmetrized(&basis.from_diagonal(&d)))
}

/// Solve `∂ρ = ½{L, ρ}` for the Hermitian `L`.
pub fn sld_solve(rho: &DensityOperator, drho: &HermitianOperator) -> Result<HermitianOperator> {
    sld_solve_with(rho, drho, &Tolerances::DEFAULT)
}

pub fn sld_solve_with(
    rho: &DensityOperator,
    drho: &HermitianOperator,
    tol: &Tolerances,
) -> Result<HermitianOperator> {
    check_same_dim(rho.matrix(), drho.matrix())?;
    let tr = trace(drho.matrix()).norm();
    if tr > tol.traceless {
        return Err(Error::Validation(format!("∂ρ must be traceless, |tr| = {tr:.3e}")));
    }
    let spec = eigendecompose(&rho.as_hermitian())?;
    let d = spec.to_basis(drho.matrix());
    let lam = spec.eigenvalues();
    let n = lam.len();
    let mut l = CMatrix::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let denom = lam[i] + lam[j];
            if denom < tol.sld_support {
                if d[[i, j]].norm() > tol.sld_derivative_zero {
                    return Err(Error::SingularSupport(format!(
                        "λ_{i} + λ_{j} = {denom:.3e} but |∂ρ_{i}{j}| = {:.3e}",
                        d[[i, j]].norm()
                    )));
                }
                continue;
            }
            l[[i, j]] = d[[i, j]] * (2.0 / denom);
        }
    }
    Ok(HermitianOperator::symmetrized(&spec.from_basis(&l)))
}

/// Quantum Fisher information `tr(L²ρ)`.
pub fn qfi_from_sld(rho: &DensityOperator, l: &HermitianOperator) -> Result<f64> {
    check_same_dim(rho.matrix(), l.matrix())?;
    let l2 = l.matrix().dot(l.matrix());
    Ok(real_trace_product(&l2, rho.matrix()))
}

/// `{L, ρ} − 2∂ρ`, the residual of the SLD equation.
pub fn sld_residual(rho: &DensityOperator, drho: &HermitianOperator, l: &HermitianOperator) -> CMatrix {
    super::anticommutator(l.matrix(), rho.matrix()) - drho.matrix() * C64::new(2.0, 0.0)
}
