//! Fisher information, heat capacity and the signal-to-noise decomposition
//! `β²𝓕 = C_S + γ²ξ`.

use crate::linalg::{
    dephase, eigendecompose, real_trace_product, sld_solve, DensityOperator, HermitianOperator,
    SpectralDecomposition,
};
use crate::models::{
    probe_corr_closed, probe_corr_numeric, spectral_density, thermal_kernel, BathModel, ClosedForm, Continuum, CorrelationFn,
    ProbeModel,
};
use crate::perturbation::{imaginary_time_rule, sld_second_order, ExpansionOptions, MeanForceExpansion};
use crate::quadrature::QuadratureRule;
use crate::special::gamma as gamma_fn;
use crate::{Error, Result, C64};

/// `𝓕 = F0 + γ² F2 + O(γ⁴)` (or the same split of a classical FI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherExpansion {
    pub f0: f64,
    pub f2: f64,
}

impl FisherExpansion {
    pub fn total(&self, gamma: f64) -> f64 {
        self.f0 + gamma * gamma * self.f2
    }
}

/// Everything reported at one `(β, γ)` point.
#[derive(Debug, Clone)]
pub struct MetrologyReport {
    pub beta: f64,
    pub temperature: f64,
    pub gamma: f64,
    /// `∂²_β ln Z_S = Var(H_S)`.
    pub f0: f64,
    /// γ² coefficient of the QFI from the correlation integral.
    pub f2: f64,
    /// Same coefficient from the eigen-sum form.
    pub f2_sum: f64,
    pub qfi: f64,
    /// γ² coefficient of the energy-measurement CFI.
    pub i2: f64,
    pub cfi: f64,
    /// `C_S = β² Var(H_S)`.
    pub heat_capacity: f64,
    pub xi: f64,
    /// `β²𝓕 = C_S + γ²ξ`.
    pub snr_sq: f64,
    /// `(X_S)_01` in the eigenbasis of `H_S`.
    pub x01: C64,
    pub alpha01: C64,
    pub assumption_ii: bool,
}

impl MetrologyReport {
    /// Second-order report for `probe` coupled to `bath`.
    ///
    /// If the sample has `⟨B⟩_B ≠ 0` the report only carries the local
    /// thermal quantities; second-order fields are NaN and `assumption_ii`
    /// is false.
    pub fn compute(probe: &ProbeModel, bath: &BathModel, beta: f64, gamma: f64, opts: &ExpansionOptions) -> Result<Self> {
        match MeanForceExpansion::compute(probe, bath, beta, gamma, opts) {
            Ok(x) => Self::from_expansion(&x, bath, opts),
            Err(Error::AssumptionII { .. }) => Self::local_only(probe, beta, gamma),
            Err(e) => Err(e),
        }
    }

    pub fn from_expansion(x: &MeanForceExpansion, bath: &BathModel, opts: &ExpansionOptions) -> Result<Self> {
        let (beta, gamma) = (x.beta(), x.gamma());
        let probe = x.probe();
        // the closed form avoids truncation error, which the high-T
        // cancellation in the integral amplifies
        let phi_s: Box<dyn CorrelationFn> = match probe.closed_form() {
            Some(kind) => Box::new(probe_corr_closed(kind, beta)?),
            None => Box::new(probe_corr_numeric(probe, beta)?),
        };
        let phi_b = bath.correlation(beta)?;
        let scale = bath.frequency_scale();
        let rule = imaginary_time_rule(opts.n_u, beta, scale)?.scaled_unit(beta);
        let integral = qfi_perturbative_integral(probe, phi_s.as_ref(), phi_b.as_ref(), &rule)?;
        let sum = qfi_perturbative_sum(x);
        let cfi = cfi_energy_perturbative(x);
        let (c_s, xi, snr_sq) = snr_bound(integral, beta, gamma);
        let alpha = sld_second_order(x).alpha;
        let (x01, alpha01) = if probe.dim() > 1 {
            (x.x()[[0, 1]], alpha[[0, 1]])
        } else {
            (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        };
        Ok(Self {
            beta,
            temperature: 1.0 / beta,
            gamma,
            f0: integral.f0,
            f2: integral.f2,
            f2_sum: sum.f2,
            qfi: integral.total(gamma),
            i2: cfi.f2,
            cfi: cfi.total(gamma),
            heat_capacity: c_s,
            xi,
            snr_sq,
            x01,
            alpha01,
            assumption_ii: true,
        })
    }

    pub fn local_only(probe: &ProbeModel, beta: f64, gamma: f64) -> Result<Self> {
        let f0 = probe.thermal(beta)?.variance;
        let nan = f64::NAN;
        Ok(Self {
            beta,
            temperature: 1.0 / beta,
            gamma,
            f0,
            f2: nan,
            f2_sum: nan,
            qfi: nan,
            i2: nan,
            cfi: nan,
            heat_capacity: beta * beta * f0,
            xi: nan,
            snr_sq: nan,
            x01: C64::new(nan, nan),
            alpha01: C64::new(nan, nan),
            assumption_ii: false,
        })
    }
}

/// `𝓕 = ∂²_β ln Z_S + γ² ∫₀^β du [Φ̃_B ∂²_βΦ_S + 2 ∂_βΦ̃_B ∂_βΦ_S]` on a
/// rule over `[0, β]`.
pub fn qfi_perturbative_integral(
    p: &ProbeModel,
    phi_s: &dyn CorrelationFn,
    phi_b: &dyn CorrelationFn,
    rule: &QuadratureRule,
) -> Result<FisherExpansion> {
    let beta = phi_b.beta();
    if (phi_s.beta() - beta).abs() > 1e-15 * beta {
        return Err(Error::Validation("probe and sample correlators at different β".into()));
    }
    let f0 = p.thermal(beta)?.variance;
    let mut f2 = 0.0;
    for (u, w) in rule.iter() {
        let s = phi_s.eval(u);
        let d2 = s
            .d2_beta
            .ok_or_else(|| Error::Validation("probe correlator must provide ∂²_β".into()))?;
        let (t, dt) = phi_b.modified(u);
        f2 += w * (t * d2 + 2.0 * dt * s.d_beta);
    }
    if !f2.is_finite() {
        return Err(Error::Numerical(format!("QFI correlation integral not finite at β={beta}")));
    }
    Ok(FisherExpansion { f0, f2 })
}

/// `𝓕 = ∂²_β ln Z_S + γ² Σ_n [p_n Δ_n² X_nn − 2 p_n Δ_n α_nn]`.
pub fn qfi_perturbative_sum(x: &MeanForceExpansion) -> FisherExpansion {
    let alpha = sld_second_order(x).alpha;
    let th = x.thermal();
    let f2 = (0..th.populations.len())
        .map(|n| {
            let (p, d) = (th.populations[n], th.delta[n]);
            p * d * d * x.x()[[n, n]].re - 2.0 * p * d * alpha[[n, n]].re
        })
        .sum();
    FisherExpansion { f0: th.variance, f2 }
}

/// Energy-measurement CFI to second order,
/// `∂²_β ln Z_S + γ² Σ_n [p_n Δ_n² X_nn − 2 p_n Δ_n ∂_β X_nn]`.
pub fn cfi_energy_perturbative(x: &MeanForceExpansion) -> FisherExpansion {
    let th = x.thermal();
    let f2 = (0..th.populations.len())
        .map(|n| {
            let (p, d) = (th.populations[n], th.delta[n]);
            p * d * d * x.x()[[n, n]].re - 2.0 * p * d * x.dx()[[n, n]].re
        })
        .sum();
    FisherExpansion { f0: th.variance, f2 }
}

/// `Σ_n (∂_β p̃_n)²/p̃_n` for populations in `basis`.
pub fn cfi_energy_general(rho: &DensityOperator, drho: &HermitianOperator, basis: &SpectralDecomposition) -> Result<f64> {
    if rho.dim() != basis.dim() || drho.dim() != basis.dim() {
        return Err(Error::Validation("cfi_energy_general: dimension mismatch".into()));
    }
    let p = basis.to_basis(rho.matrix());
    let dp = basis.to_basis(drho.matrix());
    let mut total = 0.0;
    for n in 0..basis.dim() {
        let (pn, dpn) = (p[[n, n]].re, dp[[n, n]].re);
        if pn <= 0.0 {
            if dpn.abs() > 1e-12 {
                return Err(Error::SingularSupport(format!("population {n} is {pn:.3e} with derivative {dpn:.3e}")));
            }
            continue;
        }
        total += dpn * dpn / pn;
    }
    Ok(total)
}

/// Dephased form `tr(𝒟(L)² 𝒟(ρ̃))` with `L` the SLD of `(ρ̃, ∂ρ̃)`.
///
/// Coincides with [`cfi_energy_general`] when `ρ̃` is diagonal in `basis`;
/// with coherences present the two differ at the order of the product of the
/// coherences of `ρ̃` and `L`.
pub fn cfi_energy_dephased(rho: &DensityOperator, drho: &HermitianOperator, basis: &SpectralDecomposition) -> Result<f64> {
    let l = sld_solve(rho, drho)?;
    let dl = dephase(&l, basis)?;
    let dr = dephase(&rho.as_hermitian(), basis)?;
    Ok(real_trace_product(&dl.matrix().dot(dl.matrix()), dr.matrix()))
}

/// `(C_S, ξ, β²𝓕)` with `C_S = β² ∂²_β ln Z_S` and `ξ = β² F2`.
pub fn snr_bound(f: FisherExpansion, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let b2 = beta * beta;
    let c_s = b2 * f.f0;
    let xi = b2 * f.f2;
    (c_s, xi, c_s + gamma * gamma * xi)
}

/// Heat capacity `C_S = β² Var(H_S)` of the bare probe.
pub fn heat_capacity(p: &ProbeModel, beta: f64) -> Result<f64> {
    Ok(beta * beta * p.thermal(beta)?.variance)
}

/// Spectral kernel `f_S(T, ω)` with `ξ(T) = ∫₀^∞ dω J(ω) f_S(T, ω)`:
///
/// `f_S = (β²/π) ∫₀^β du [(β−u) G ∂²_βΦ_S + ∂_βΦ_S (2G + 2(β−u)∂_βG)]`,
/// `G = cosh(βω/2 − uω)/sinh(βω/2)`. The printed `2/(β−u)` term is already
/// multiplied through by its `(β−u)` prefactor, so nothing is singular at
/// `u = β`. `rule` covers `[0, β]`.
pub fn f_s_kernel(phi_s: &dyn CorrelationFn, omega: f64, rule: &QuadratureRule) -> Result<f64> {
    let beta = phi_s.beta();
    let mut acc = 0.0;
    for (u, w) in rule.iter() {
        let s = phi_s.eval(u);
        let d2 = s
            .d2_beta
            .ok_or_else(|| Error::Validation("probe correlator must provide ∂²_β".into()))?;
        let (g, dg) = thermal_kernel(u, beta, omega);
        let span = beta - u;
        acc += w * (span * g * d2 + s.d_beta * (2.0 * g + 2.0 * span * dg));
    }
    Ok(beta * beta * acc / std::f64::consts::PI)
}

/// `ξ(T) = ∫₀^∞ dω J(ω) f_S(T, ω)`, frequency integral outermost.
pub fn xi_via_spectral_kernel(
    phi_s: &dyn CorrelationFn,
    bath: &Continuum,
    u_rule: &QuadratureRule,
    omega_rule: &QuadratureRule,
) -> Result<f64> {
    let mut xi = 0.0;
    for (omega, w) in omega_rule.iter() {
        let j = spectral_density(bath, omega)?;
        if j == 0.0 {
            continue;
        }
        xi += w * j * f_s_kernel(phi_s, omega, u_rule)?;
    }
    if !xi.is_finite() {
        return Err(Error::Numerical("ξ spectral integral not finite".into()));
    }
    Ok(xi)
}

/// High-temperature expressions for ξ as printed for the two built-in probes:
/// `−4 sin²θ ε² Ω^a Γ(s) β³/(3π)` (spin-boson) and `−Ω^a Γ(s) β²/(3π)`
/// (oscillator, unit mass), with `a = 1` and `a = 2` respectively in the
/// matched case.
///
/// The integrated ξ tends to half of these values; see
/// [`high_t_leading_order`].
pub fn high_t_asymptote(kind: ClosedForm, bath: &Continuum, beta: f64) -> Result<f64> {
    let g = gamma_fn(bath.s)?;
    let scale = bath.amplitude * bath.omega_c.powf(bath.a) * g / (3.0 * std::f64::consts::PI);
    Ok(match kind {
        ClosedForm::SpinBoson { epsilon, theta } => -4.0 * theta.sin().powi(2) * epsilon * epsilon * scale * beta.powi(3),
        ClosedForm::Oscillator { .. } => -scale * beta * beta,
    })
}

/// Leading `β → 0` term of the integrated ξ: with `G → 2/(βω)`,
/// `Φ̃_B → K(1 − u/β)`, `K = 2Ω^aΓ(s)/π`, and the probe correlator expanded
/// to first order in β, the integral gives exactly half of
/// [`high_t_asymptote`].
pub fn high_t_leading_order(kind: ClosedForm, bath: &Continuum, beta: f64) -> Result<f64> {
    Ok(0.5 * high_t_asymptote(kind, bath, beta)?)
}

/// Exact-state Fisher informations from a state and its β-derivative.
pub fn fishers_from_state(rho: &DensityOperator, drho: &HermitianOperator, energy_basis: &SpectralDecomposition) -> Result<(f64, f64)> {
    let l = sld_solve(rho, drho)?;
    let spec = eigendecompose(&rho.as_hermitian())?;
    // tr(L²ρ) evaluated as Σ_ij |L_ij|² (λ_i + λ_j)/2 to keep it non-negative
    let lb = spec.to_basis(l.matrix());
    let lam = spec.eigenvalues();
    let mut f = 0.0;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            f += lb[[i, j]].norm_sqr() * 0.5 * (lam[i] + lam[j]);
        }
    }
    let i = cfi_energy_general(rho, drho, energy_basis)?;
    Ok((f, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gibbs_state;
    use crate::models::{bath_qubit, probe_oscillator, probe_qubit, BathQubitCoupling};
    use std::f64::consts::PI;

    fn sb_bath() -> BathModel {
        BathModel::continuum(Continuum::new(1.0, 100.0, 1.0).unwrap(), 64).unwrap()
    }

    #[test]
    fn zeroth_order_qubit() {
        let probe = probe_qubit(1.0, 0.4).unwrap();
        let r = MetrologyReport::compute(&probe, &sb_bath(), 1.0, 0.0, &Default::default()).unwrap();
        assert!((r.f0 - 0.25 / 0.5f64.cosh().powi(2)).abs() < 1e-15);
        assert!((r.qfi - 0.196612).abs() < 1e-6);
        assert_eq!(r.snr_sq, r.heat_capacity);
        assert!((r.heat_capacity - 0.196612).abs() < 1e-6);
    }

    #[test]
    fn commuting_coupling_has_no_second_order() {
        let probe = probe_qubit(1.0, 0.0).unwrap();
        let r = MetrologyReport::compute(&probe, &sb_bath(), 1.0, 0.1, &Default::default()).unwrap();
        assert!(r.f2.abs() < 1e-14, "{}", r.f2);
        assert!(r.f2_sum.abs() < 1e-15);
    }

    #[test]
    fn dual_forms_agree() {
        for theta in [PI / 4.0, 1.5 * PI] {
            let probe = probe_qubit(1.0, theta).unwrap();
            for beta in [0.5, 1.0, 2.0] {
                let r = MetrologyReport::compute(&probe, &sb_bath(), beta, 0.1, &Default::default()).unwrap();
                assert!((r.f2 - r.f2_sum).abs() <= 1e-7 * r.f2.abs(), "{} vs {}", r.f2, r.f2_sum);
                assert!((r.i2 - r.f2_sum).abs() <= 1e-14 * r.f2.abs().max(1.0));
                assert!((r.snr_sq - beta * beta * r.qfi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fubini_exchange() {
        let beta = 1.0;
        let bath = Continuum::new(1.0, 100.0, 1.0).unwrap();
        let model = BathModel::continuum(bath, 64).unwrap();
        let probe = probe_qubit(1.0, PI / 4.0).unwrap();
        let kind = probe.closed_form().unwrap();
        let phi_s = probe_corr_closed(kind, beta).unwrap();
        let u = imaginary_time_rule(64, beta, 100.0).unwrap().scaled_unit(beta);
        let xi = xi_via_spectral_kernel(&phi_s, &bath, &u, model.omega_rule().unwrap()).unwrap();
        let f = qfi_perturbative_integral(&probe, &phi_s, model.correlation(beta).unwrap().as_ref(), &u).unwrap();
        assert!((xi - beta * beta * f.f2).abs() <= 1e-6 * xi.abs(), "{xi} vs {}", f.f2);
        assert!(xi < 0.0);
    }

    #[test]
    fn kernel_negative_for_spin_boson() {
        let beta = 1.0;
        let phi_s = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: PI / 4.0 }, beta).unwrap();
        let u = QuadratureRule::gauss_legendre(64, 0.0, beta).unwrap();
        for omega in [1e-3, 0.1, 1.0, 10.0, 100.0, 1000.0] {
            assert!(f_s_kernel(&phi_s, omega, &u).unwrap() < 0.0);
        }
        let flat = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: 0.0 }, beta).unwrap();
        assert_eq!(f_s_kernel(&flat, 1.0, &u).unwrap(), 0.0);
    }

    #[test]
    fn asymptote_formulas() {
        let c = Continuum::new(1.0, 100.0, 2.0).unwrap();
        let q = high_t_asymptote(ClosedForm::Oscillator { omega0: 1.0 }, &c, 0.01).unwrap();
        assert!((q + 1.0 / (3.0 * PI)).abs() < 1e-12);
        assert!((q + 0.106103).abs() < 1e-6);
        let c1 = Continuum::new(1.0, 100.0, 1.0).unwrap();
        assert_eq!(high_t_asymptote(ClosedForm::SpinBoson { epsilon: 1.0, theta: 0.0 }, &c1, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn cfi_of_bare_gibbs_equals_variance() {
        let probe = probe_qubit(1.3, 0.2).unwrap();
        let beta = 0.8;
        let g = gibbs_state(probe.hamiltonian(), beta).unwrap();
        let th = probe.thermal(beta).unwrap();
        let dh = probe.hamiltonian().matrix() - crate::linalg::identity(2) * C64::new(th.mean_energy, 0.0);
        let drho = HermitianOperator::symmetrized(&(-dh.dot(g.state.matrix())));
        let i = cfi_energy_general(&g.state, &drho, probe.spectrum()).unwrap();
        let id = cfi_energy_dephased(&g.state, &drho, probe.spectrum()).unwrap();
        assert!((i - th.variance).abs() < 1e-15);
        assert!((i - id).abs() < 1e-10);
        let (f, i2) = fishers_from_state(&g.state, &drho, probe.spectrum()).unwrap();
        assert!((f - i2).abs() < 1e-15);
    }

    #[test]
    fn oscillator_dual_forms() {
        let probe = probe_oscillator(1.0, 40, 1.0).unwrap();
        let bath = BathModel::continuum(Continuum::new(1.0, 100.0, 2.0).unwrap(), 64).unwrap();
        let r = MetrologyReport::compute(&probe, &bath, 1.0, 0.1, &Default::default()).unwrap();
        assert!((r.f2 - r.f2_sum).abs() <= 1e-7 * r.f2.abs());
    }

    #[test]
    fn assumption_failure_reports_local_only() {
        let bath = BathModel::discrete(bath_qubit(1.0, BathQubitCoupling::SigmaZ).unwrap());
        let r = MetrologyReport::compute(&probe_qubit(1.0, 1.0).unwrap(), &bath, 1.0, 0.1, &Default::default()).unwrap();
        assert!(!r.assumption_ii);
        assert!(r.xi.is_nan());
        assert!(r.heat_capacity > 0.0);
    }
}
