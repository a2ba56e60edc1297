//! Probe and sample models and their imaginary-time correlation functions.
//!
//! Correlators are evaluated at `t = −iu` with `u ∈ [0, β]` and are real.
//! Every evaluator also returns its β-derivative at fixed `u`; the second
//! derivative is available for probe correlators, which is all the
//! Fisher-information integrals need.

mod bath;
mod correlation;

pub use bath::{
    bath_corr_bosonic, bath_corr_discrete, bath_qubit, bosonic_mode, spectral_density, thermal_kernel, BathModel,
    BathQubitCoupling, BathSpec, BosonicCorrelation, Continuum, Discrete,
};
pub use correlation::{
    probe_corr_closed, probe_corr_numeric, ClosedForm, ClosedFormCorrelation, CorrPoint,
    CorrelationFn, EigenCorrelation,
};

use crate::linalg::{
    eigendecompose, pauli, CMatrix, HermitianOperator, SpectralDecomposition,
};
use crate::{Error, Result, Tolerances, C64};

/// Probe Hamiltonian `H_S` and coupling operator `S`.
#[derive(Debug, Clone)]
pub struct ProbeModel {
    h: HermitianOperator,
    s: HermitianOperator,
    spec: SpectralDecomposition,
    s_eig: CMatrix,
    mu: f64,
    label: String,
    closed_form: Option<ClosedForm>,
}

/// Populations and energy moments of the bare probe Gibbs state.
#[derive(Debug, Clone)]
pub struct ProbeThermal {
    pub beta: f64,
    /// `p_n`, ordered like the eigenvalues of `H_S`.
    pub populations: Vec<f64>,
    pub log_z: f64,
    pub mean_energy: f64,
    /// `Var(H_S) = ∂²_β ln Z_S`.
    pub variance: f64,
    /// `Δ_n = ε_n − ⟨H_S⟩`.
    pub delta: Vec<f64>,
}

impl ProbeModel {
    /// `mu` is the dimension exponent of `S` (`[S] = [ω]^μ`).
    pub fn new(h: HermitianOperator, s: HermitianOperator, mu: f64, label: impl Into<String>) -> Result<Self> {
        if h.dim() != s.dim() {
            return Err(Error::Validation(format!(
                "H_S has dim {} but S has dim {}",
                h.dim(),
                s.dim()
            )));
        }
        if !mu.is_finite() {
            return Err(Error::Validation("dimension exponent μ must be finite".into()));
        }
        let spec = eigendecompose(&h)?;
        let s_eig = spec.to_basis(s.matrix());
        Ok(Self {
            h,
            s,
            spec,
            s_eig,
            mu,
            label: label.into(),
            closed_form: None,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn coupling(&self) -> &HermitianOperator {
        &self.s
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spec
    }

    pub fn energies(&self) -> &[f64] {
        self.spec.eigenvalues()
    }

    /// `S_nk = ⟨ε_n|S|ε_k⟩`.
    pub fn coupling_in_eigenbasis(&self) -> &CMatrix {
        &self.s_eig
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Spectral-density exponent `a = 1 − 2μ` implied by the units of `S`.
    pub fn spectral_exponent(&self) -> f64 {
        1.0 - 2.0 * self.mu
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Analytic correlator matching this probe, if it is a built-in one.
    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn thermal(&self, beta: f64) -> Result<ProbeThermal> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("β must be finite and ≥ 0, got {beta}")));
        }
        let e = self.energies();
        let (p, log_z) = crate::linalg::boltzmann_weights(e, beta);
        let mean: f64 = p.iter().zip(e).map(|(p, e)| p * e).sum();
        let delta: Vec<f64> = e.iter().map(|e| e - mean).collect();
        let variance = p.iter().zip(&delta).map(|(p, d)| p * d * d).sum();
        Ok(ProbeThermal {
            beta,
            populations: p,
            log_z,
            mean_energy: mean,
            variance,
            delta,
        })
    }

    /// Largest `|ε_n|`, the scale for degeneracy thresholds.
    pub fn energy_scale(&self) -> f64 {
        self.spec.norm().max(f64::MIN_POSITIVE)
    }

    /// Nonzero `(n, k, S_nk)` triples of the coupling in the eigenbasis.
    pub fn coupling_entries(&self) -> Vec<(usize, usize, C64)> {
        let cut = 1e-15 * crate::linalg::max_abs(&self.s_eig);
        self.s_eig
            .indexed_iter()
            .filter(|(_, z)| z.norm() > cut)
            .map(|((n, k), z)| (n, k, *z))
            .collect()
    }
}

/// Qubit `H_S = (ε/2)σ_z` coupled through `S = cos θ σ_z − sin θ σ_x`.
pub fn probe_qubit(epsilon: f64, theta: f64) -> Result<ProbeModel> {
    if !(epsilon > 0.0) || !epsilon.is_finite() || !theta.is_finite() {
        return Err(Error::Domain(format!("probe_qubit needs ε > 0 and finite θ (ε={epsilon}, θ={theta})")));
    }
    let h = HermitianOperator::new(pauli::sigma_z() * C64::new(0.5 * epsilon, 0.0))?;
    let s = HermitianOperator::new(
        pauli::sigma_z() * C64::new(theta.cos(), 0.0) - pauli::sigma_x() * C64::new(theta.sin(), 0.0),
    )?;
    let mut m = ProbeModel::new(h, s, 0.0, format!("qubit(ε={epsilon}, θ={theta})"))?;
    m.closed_form = Some(ClosedForm::SpinBoson { epsilon, theta });
    Ok(m)
}

/// Harmonic oscillator on `n_trunc` Fock levels coupled through its position.
///
/// Fails with [`Error::Truncation`] when the untruncated thermal population
/// of level `n_trunc − 1` exceeds the tail tolerance at `beta_design`.
pub fn probe_oscillator(omega0: f64, n_trunc: usize, beta_design: f64) -> Result<ProbeModel> {
    probe_oscillator_with(omega0, n_trunc, beta_design, Tolerances::DEFAULT.tail_population)
}

pub fn probe_oscillator_with(omega0: f64, n_trunc: usize, beta_design: f64, tail: f64) -> Result<ProbeModel> {
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::Domain(format!("oscillator frequency must be positive, got {omega0}")));
    }
    if n_trunc < 2 {
        return Err(Error::Domain(format!("n_trunc must be ≥ 2, got {n_trunc}")));
    }
    if !(beta_design > 0.0) {
        return Err(Error::Domain(format!("design β must be positive, got {beta_design}")));
    }
    let top = oscillator_tail_population(omega0, n_trunc, beta_design);
    if top > tail {
        return Err(Error::Truncation(format!(
            "{n_trunc} levels leave population {top:.3e} > {tail:.1e} in the top level at β={beta_design}"
        )));
    }
    let (h, x) = ladder_operators(omega0, n_trunc);
    let mut m = ProbeModel::new(h, x, -0.5, format!("oscillator(ω₀={omega0}, n={n_trunc})"))?;
    m.closed_form = Some(ClosedForm::Oscillator { omega0 });
    Ok(m)
}

/// [`probe_oscillator`] starting from 40 levels and doubling until the tail
/// criterion holds.
pub fn probe_oscillator_auto(omega0: f64, beta_design: f64, tail: f64) -> Result<ProbeModel> {
    const MAX_LEVELS: usize = 2560;
    let mut n = 40;
    while oscillator_tail_population(omega0, n, beta_design) > tail {
        n *= 2;
        if n > MAX_LEVELS {
            return Err(Error::Truncation(format!(
                "more than {MAX_LEVELS} levels needed at β={beta_design}, ω₀={omega0}"
            )));
        }
    }
    probe_oscillator_with(omega0, n, beta_design, tail)
}

/// Population `(1 − e^{−βω})e^{−βω(n−1)}` of the top retained level.
pub fn oscillator_tail_population(omega0: f64, n_trunc: usize, beta: f64) -> f64 {
    let x = beta * omega0;
    -(-x).exp_m1() * (-x * (n_trunc as f64 - 1.0)).exp()
}

/// `(H, x)` for a truncated oscillator: `H = diag((n + ½)ω)`,
/// `x_{n,n+1} = √((n+1)/(2ω))`.
pub(crate) fn ladder_operators(omega: f64, n: usize) -> (HermitianOperator, HermitianOperator) {
    let h = HermitianOperator::diagonal(&(0..n).map(|k| (k as f64 + 0.5) * omega).collect::<Vec<_>>());
    let mut x = CMatrix::zeros((n, n));
    for k in 0..n - 1 {
        let v = ((k as f64 + 1.0) / (2.0 * omega)).sqrt();
        x[[k, k + 1]] = C64::new(v, 0.0);
        x[[k + 1, k]] = C64::new(v, 0.0);
    }
    (h, HermitianOperator::symmetrized(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs};
    use std::f64::consts::PI;

    #[test]
    fn qubit_couplings() {
        let m = probe_qubit(1.0, 0.0).unwrap();
        assert!(max_abs(&commutator(m.coupling().matrix(), m.hamiltonian().matrix())) < 1e-15);
        assert_eq!(m.spectral_exponent(), 1.0);
        let m = probe_qubit(1.0, 1.5 * PI).unwrap();
        assert!(max_abs(&(m.coupling().matrix() - pauli::sigma_x())) < 1e-15);
        let m = probe_qubit(1.0, PI / 4.0).unwrap();
        let s = m.coupling().matrix();
        assert!((s[[0, 0]].re.abs() - s[[0, 1]].re.abs()).abs() < 1e-15);
        assert!(probe_qubit(0.0, 0.0).is_err());
    }

    #[test]
    fn oscillator_matrix_elements() {
        let m = probe_oscillator(1.0, 40, 1.0).unwrap();
        assert!((m.coupling().matrix()[[0, 1]].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.spectral_exponent(), 2.0);
        assert_eq!(m.energies()[0], 0.5);
    }

    #[test]
    fn oscillator_truncation_guard() {
        assert!(matches!(probe_oscillator(1.0, 10, 0.1), Err(Error::Truncation(_))));
        let m = probe_oscillator_auto(1.0, 0.1, 1e-8).unwrap();
        assert!(oscillator_tail_population(1.0, m.dim(), 0.1) <= 1e-8);
        assert!(m.dim() >= 160);
    }

    #[test]
    fn thermal_moments_of_qubit() {
        let m = probe_qubit(1.0, 0.3).unwrap();
        let t = m.thermal(1.0).unwrap();
        assert!((t.variance - 0.25 / 0.5f64.cosh().powi(2)).abs() < 1e-15);
        assert!((t.mean_energy + 0.5 * 0.5f64.tanh()).abs() < 1e-15);
        assert!(t.delta.iter().zip(&t.populations).map(|(d, p)| d * p).sum::<f64>().abs() < 1e-16);
    }
}
