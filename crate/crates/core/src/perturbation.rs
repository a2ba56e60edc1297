//! Second-order mean-force Gibbs state and symmetric logarithmic derivative.
//!
//! With `H_int = γ S ⊗ B` and `⟨B⟩_B = 0` the reduced equilibrium state is
//! `π̃_S = π_S(𝟙 + γ²X_S) + O(γ⁴)`. All matrices here are stored in the
//! eigenbasis of `H_S` (ascending energies) unless a method says otherwise.

use crate::linalg::{CMatrix, DensityOperator, HermitianOperator};
use crate::models::{BathModel, CorrelationFn, ProbeModel, ProbeThermal};
use crate::quadrature::{Domain, QuadratureRule};
use crate::special::exprel;
use crate::{Error, Result, Tolerances, C64};

/// How `∂_β X_S` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    /// Differentiate under the integral using the correlators' β-derivatives.
    Analytic,
    /// Central differences of `X_S` at `β ± h` with a Richardson check.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpansionOptions {
    /// Gauss–Legendre order per imaginary-time panel.
    pub n_u: usize,
    pub derivative: DerivativeMethod,
    pub tolerances: Tolerances,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self {
            n_u: 64,
            derivative: DerivativeMethod::Analytic,
            tolerances: Tolerances::DEFAULT,
        }
    }
}

/// Imaginary-time rule on `[0, 1]`, graded toward both ends so that features
/// of width `1/(β · scale)` are resolved. Scale it with
/// [`QuadratureRule::scaled_unit`].
pub fn imaginary_time_rule(n_u: usize, beta: f64, scale: f64) -> Result<QuadratureRule> {
    let layer = if scale > 0.0 { 1.0 / (beta * scale) } else { 1.0 };
    QuadratureRule::graded_interval(n_u, 0.0, 1.0, layer)
}

/// `π_S`, `X_S` and `∂_β X_S` at one inverse temperature.
#[derive(Debug, Clone)]
pub struct MeanForceExpansion {
    probe: ProbeModel,
    thermal: ProbeThermal,
    gamma: f64,
    x: CMatrix,
    dx: CMatrix,
    method: DerivativeMethod,
    fd_discrepancy: Option<f64>,
    tolerances: Tolerances,
}

impl MeanForceExpansion {
    /// Fails with [`Error::AssumptionII`] when `⟨B⟩_B ≠ 0`.
    pub fn compute(
        probe: &ProbeModel,
        bath: &BathModel,
        beta: f64,
        gamma: f64,
        opts: &ExpansionOptions,
    ) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("β must be positive, got {beta}")));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::Domain(format!("γ must be finite and ≥ 0, got {gamma}")));
        }
        let tol = &opts.tolerances;
        let phi_b = bath.correlation(beta)?;
        check_assumption(phi_b.mean(), tol)?;
        let unit = imaginary_time_rule(opts.n_u, beta, bath.frequency_scale().max(coupling_gap_scale(probe)))?;
        let rule = unit.scaled_unit(beta);
        let terms = KernelTerms::new(probe, beta, tol)?;
        let (x, dx_analytic) = terms.integrate(phi_b.as_ref(), &rule, true);
        let (dx, fd_discrepancy) = match opts.derivative {
            DerivativeMethod::Analytic => (dx_analytic.unwrap_or_else(|| x.clone()), None),
            DerivativeMethod::FiniteDifference => {
                let (d, err) = x_derivative_fd(probe, bath, beta, &unit, tol)?;
                (d, Some(err))
            }
        };
        Ok(Self {
            probe: probe.clone(),
            thermal: probe.thermal(beta)?,
            gamma,
            x,
            dx,
            method: opts.derivative,
            fd_discrepancy,
            tolerances: *tol,
        })
    }

    pub fn probe(&self) -> &ProbeModel {
        &self.probe
    }

    pub fn beta(&self) -> f64 {
        self.thermal.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same expansion at a different coupling strength (`X_S` is γ-free).
    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..self.clone() }
    }

    pub fn thermal(&self) -> &ProbeThermal {
        &self.thermal
    }

    pub fn populations(&self) -> &[f64] {
        &self.thermal.populations
    }

    /// `(X_S)_nm` in the eigenbasis of `H_S`.
    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    /// `∂_β (X_S)_nm`.
    pub fn dx(&self) -> &CMatrix {
        &self.dx
    }

    pub fn derivative_method(&self) -> DerivativeMethod {
        self.method
    }

    /// `max |D(h) − D(h/2)|` of the finite-difference derivative, if used.
    pub fn fd_discrepancy(&self) -> Option<f64> {
        self.fd_discrepancy
    }

    /// `tr(π_S X_S)`, zero up to rounding.
    pub fn weighted_trace(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| p * self.x[[n, n]].re).sum()
    }

    /// `p̃_n = p_n (1 + γ²(X_S)_nn)`.
    pub fn populations_second_order(&self) -> Vec<f64> {
        let g2 = self.gamma * self.gamma;
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| p * (1.0 + g2 * self.x[[n, n]].re))
            .collect()
    }

    /// `π_S X_S` (Hermitian) in the eigenbasis.
    pub fn pi_x(&self) -> CMatrix {
        let mut m = self.x.clone();
        for (n, mut row) in m.rows_mut().into_iter().enumerate() {
            let p = self.thermal.populations[n];
            row.mapv_inplace(|z| z * p);
        }
        crate::linalg::hermitian_part(&m)
    }

    /// `∂_β π̃_S = −ΔH_S π_S + γ² ∂_β(π_S X_S)` in the eigenbasis, with
    /// `∂_β(π_S X_S)_nm = p_n(∂_β X_nm − Δ_n X_nm)`.
    pub fn state_derivative_eigenbasis(&self) -> CMatrix {
        let n = self.x.nrows();
        let g2 = self.gamma * self.gamma;
        let (p, d) = (&self.thermal.populations, &self.thermal.delta);
        let mut out = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = (self.dx[[i, j]] - self.x[[i, j]] * d[i]) * (g2 * p[i]);
            }
            out[[i, i]] -= C64::new(d[i] * p[i], 0.0);
        }
        crate::linalg::hermitian_part(&out)
    }

    pub fn state_derivative(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(&self.probe.spectrum().from_basis(&self.state_derivative_eigenbasis()))
    }

    /// Unnormalised `π_S(𝟙 + γ²X_S)`, symmetrised, in the eigenbasis, and its
    /// trace drift `|tr − 1|`.
    pub fn raw_state_eigenbasis(&self) -> (CMatrix, f64) {
        let g2 = self.gamma * self.gamma;
        let mut m = self.pi_x() * C64::new(g2, 0.0);
        for (n, p) in self.thermal.populations.iter().enumerate() {
            m[[n, n]] += C64::new(*p, 0.0);
        }
        let drift = (crate::linalg::trace(&m).re - 1.0).abs();
        (m, drift)
    }
}

fn check_assumption(avg_b: f64, tol: &Tolerances) -> Result<()> {
    if avg_b.abs() >= tol.assumption_ii {
        return Err(Error::AssumptionII { avg_b });
    }
    Ok(())
}

/// Largest `|ε_k − ε_n|` with `S_nk ≠ 0`.
fn coupling_gap_scale(p: &ProbeModel) -> f64 {
    let e = p.energies();
    p.coupling_entries().iter().fold(0.0, |m, (n, k, _)| m.max((e[*k] - e[*n]).abs()))
}

/// Sparse eigenbasis data entering the `X_S` integrals at one β.
struct KernelTerms {
    beta: f64,
    p: Vec<f64>,
    delta: Vec<f64>,
    // (n, |S_nk|², Δ_kn = ε_n − ε_k)
    diag: Vec<(usize, f64, f64)>,
    // (n, m, S_nk S_km, Δ_kn, δ = ε_n − ε_m), n ≠ m
    off: Vec<(usize, usize, C64, f64, f64)>,
    dim: usize,
}

impl KernelTerms {
    fn new(probe: &ProbeModel, beta: f64, tol: &Tolerances) -> Result<Self> {
        let th = probe.thermal(beta)?;
        let e = probe.energies();
        let dim = probe.dim();
        let entries = probe.coupling_entries();
        let mut by_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (n, k, z) in &entries {
            by_row[*n].push((*k, *z));
        }
        let degenerate = tol.degenerate_gap * probe.energy_scale();
        let diag = entries.iter().map(|(n, k, z)| (*n, z.norm_sqr(), e[*n] - e[*k])).collect();
        let mut off = Vec::new();
        for n in 0..dim {
            for (k, snk) in &by_row[n] {
                for (m, skm) in &by_row[*k] {
                    if *m == n {
                        continue;
                    }
                    let mut d = e[n] - e[*m];
                    if d.abs() < degenerate {
                        d = 0.0;
                    }
                    off.push((n, *m, snk * skm, e[n] - e[*k], d));
                }
            }
        }
        Ok(Self {
            beta,
            p: th.populations,
            delta: th.delta,
            diag,
            off,
            dim,
        })
    }

    /// `X_S` and optionally its analytic β-derivative on a rule over `[0, β]`.
    fn integrate(&self, phi_b: &dyn CorrelationFn, rule: &QuadratureRule, derivative: bool) -> (CMatrix, Option<CMatrix>) {
        let dim = self.dim;
        let beta = self.beta;
        let mut x = CMatrix::zeros((dim, dim));
        let mut dx = CMatrix::zeros((dim, dim));
        let mut r = vec![0.0; dim];
        for (u, w) in rule.iter() {
            let pb = phi_b.eval(u);
            let span = beta - u;
            let (tilde, d_tilde) = (span * pb.value, pb.value + span * pb.d_beta);

            r.iter_mut().for_each(|v| *v = 0.0);
            for (n, s2, gap) in &self.diag {
                r[*n] += s2 * (u * gap).exp();
            }
            let phi_s: f64 = self.p.iter().zip(&r).map(|(p, r)| p * r).sum();
            let d_phi_s: f64 = -(0..dim).map(|n| self.p[n] * self.delta[n] * r[n]).sum::<f64>();
            for n in 0..dim {
                let c = r[n] - phi_s;
                x[[n, n]] += C64::new(w * tilde * c, 0.0);
                if derivative {
                    dx[[n, n]] += C64::new(w * (d_tilde * c - tilde * d_phi_s), 0.0);
                }
            }

            for (n, m, coef, gap, d) in &self.off {
                let e = (u * gap).exp();
                let k = span * exprel(span * d);
                x[[*n, *m]] += coef * (w * pb.value * e * k);
                if derivative {
                    dx[[*n, *m]] += coef * (w * e * (pb.d_beta * k + pb.value * (span * d).exp()));
                }
            }
        }
        (x, derivative.then_some(dx))
    }
}

fn check_rule(rule: &QuadratureRule, beta: f64) -> Result<()> {
    match rule.domain() {
        Domain::Finite { a, b } if a.abs() <= 1e-12 * beta && (b - beta).abs() <= 1e-12 * beta => Ok(()),
        d => Err(Error::Validation(format!("imaginary-time rule must cover [0, {beta}], got {d:?}"))),
    }
}

/// Diagonal `(X_S)_nn = ∫₀^β du (β−u)Φ_B(−iu)(Σ_k |S_nk|² e^{−uΔ_nk} − Φ_S(−iu))`.
pub fn x_diag(p: &ProbeModel, phi_b: &dyn CorrelationFn, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let x = x_full(p, phi_b, rule, &Tolerances::DEFAULT)?;
    Ok(x.diag().iter().map(|z| z.re).collect())
}

/// Off-diagonal `(X_S)_{n≠m}` (the diagonal of the result is zero).
///
/// Evaluated as `Σ_k S_nk S_km ∫du Φ_B e^{uΔ_kn}(β−u) exprel((β−u)(ε_n−ε_m))`,
/// which is the printed `1/Δ_mn` form with the removable singularity at
/// degeneracy taken care of; gaps below the degeneracy threshold use the
/// exact limit.
pub fn x_offdiag(p: &ProbeModel, phi_b: &dyn CorrelationFn, rule: &QuadratureRule) -> Result<CMatrix> {
    let mut x = x_full(p, phi_b, rule, &Tolerances::DEFAULT)?;
    for n in 0..x.nrows() {
        x[[n, n]] = C64::new(0.0, 0.0);
    }
    Ok(x)
}

/// Full `X_S` in the eigenbasis on a rule over `[0, β]`.
pub fn x_full(p: &ProbeModel, phi_b: &dyn CorrelationFn, rule: &QuadratureRule, tol: &Tolerances) -> Result<CMatrix> {
    let beta = phi_b.beta();
    check_rule(rule, beta)?;
    check_assumption(phi_b.mean(), tol)?;
    let terms = KernelTerms::new(p, beta, tol)?;
    let x = terms.integrate(phi_b, rule, false).0;
    check_finite(&x)?;
    Ok(x)
}

/// Analytic `∂_β X_S` on a rule over `[0, β]`.
pub fn x_derivative_analytic(
    p: &ProbeModel,
    phi_b: &dyn CorrelationFn,
    rule: &QuadratureRule,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let beta = phi_b.beta();
    check_rule(rule, beta)?;
    check_assumption(phi_b.mean(), tol)?;
    let terms = KernelTerms::new(p, beta, tol)?;
    let dx = terms.integrate(phi_b, rule, true).1.unwrap_or_default();
    check_finite(&dx)?;
    Ok(dx)
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("X_S integral produced non-finite entries".into()));
    }
    Ok(())
}

fn x_at(p: &ProbeModel, bath: &BathModel, beta: f64, unit: &QuadratureRule, tol: &Tolerances) -> Result<CMatrix> {
    let phi_b = bath.correlation(beta)?;
    x_full(p, phi_b.as_ref(), &unit.scaled_unit(beta), tol)
}

/// Richardson-extrapolated central difference of `X_S`, returning the
/// derivative and `max |D(h) − D(h/2)|`. The same unit-interval rule is
/// rescaled to every β so discretisation error cancels in the difference.
pub fn x_derivative_fd(
    p: &ProbeModel,
    bath: &BathModel,
    beta: f64,
    unit: &QuadratureRule,
    tol: &Tolerances,
) -> Result<(CMatrix, f64)> {
    let h = tol.fd_step * beta;
    let central = |h: f64| -> Result<CMatrix> {
        let hi = x_at(p, bath, beta + h, unit, tol)?;
        let lo = x_at(p, bath, beta - h, unit, tol)?;
        Ok((hi - lo) * C64::new(0.5 / h, 0.0))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let err = crate::linalg::max_abs(&(&d1 - &d2));
    Ok(((&d2 * C64::new(4.0, 0.0) - &d1) * C64::new(1.0 / 3.0, 0.0), err))
}

/// `π̃_S ≈ π_S(𝟙 + γ²X_S)`, Hermitian-symmetrised and returned in the
/// computational basis.
///
/// The trace is renormalised when it drifts by more than the tolerance
/// (see [`MeanForceExpansion::raw_state_eigenbasis`] for the drift itself).
/// A minimum eigenvalue below `−positivity` means the coupling is outside
/// the perturbative regime.
pub fn mfg_second_order(x: &MeanForceExpansion) -> Result<DensityOperator> {
    let tol = &x.tolerances;
    let (mut m, drift) = x.raw_state_eigenbasis();
    if drift > tol.trace_drift {
        let tr = crate::linalg::trace(&m).re;
        m.mapv_inplace(|z| z / tr);
    }
    let h = HermitianOperator::symmetrized(&m);
    let min = crate::linalg::eigendecompose(&h)?.eigenvalues()[0];
    if min < -tol.positivity {
        return Err(Error::PerturbativeRegime { min_eig: min });
    }
    let full = crate::linalg::hermitian_part(&x.probe.spectrum().from_basis(h.matrix()));
    DensityOperator::with_tolerances(
        full,
        &Tolerances {
            psd: tol.positivity,
            trace: tol.trace.max(1e-12),
            ..*tol
        },
    )
}

/// First-order state correction `p₁ = −⟨B⟩ π_S ∫₀^β dβ₁ e^{β₁H_S} S̄ e^{−β₁H_S}`
/// with `S̄ = S − ⟨S⟩`, in the computational basis.
///
/// In the eigenbasis `(p₁)_nm = −⟨B⟩ p_n S̄_nm (e^{β(ε_n−ε_m)} − 1)/(ε_n − ε_m)`,
/// which equals `−⟨B⟩ S̄_nm (p_m − p_n)/(ε_n − ε_m)` and is Hermitian.
pub fn p1_operator(p: &ProbeModel, avg_b: f64, beta: f64) -> Result<HermitianOperator> {
    let th = p.thermal(beta)?;
    let e = p.energies();
    let s = p.coupling_in_eigenbasis();
    let dim = p.dim();
    let mean_s: f64 = (0..dim).map(|n| th.populations[n] * s[[n, n]].re).sum();
    let mut out = CMatrix::zeros((dim, dim));
    if avg_b == 0.0 {
        return Ok(HermitianOperator::zeros(dim));
    }
    for n in 0..dim {
        for m in 0..dim {
            let mut sbar = s[[n, m]];
            if n == m {
                sbar -= C64::new(mean_s, 0.0);
            }
            let tau = beta * exprel(beta * (e[n] - e[m]));
            out[[n, m]] = sbar * (-avg_b * th.populations[n] * tau);
        }
    }
    Ok(HermitianOperator::symmetrized(&p.spectrum().from_basis(&out)))
}

/// `L_S = −ΔH_S + γ² Σ_nm α_nm |ε_n⟩⟨ε_m| + O(γ⁴)`.
#[derive(Debug, Clone)]
pub struct SldExpansion {
    /// `−Δ_n`, the diagonal of the zeroth-order SLD in the eigenbasis.
    pub zeroth: Vec<f64>,
    /// `α_nm` in the eigenbasis.
    pub alpha: CMatrix,
    pub gamma: f64,
    basis: crate::linalg::SpectralDecomposition,
}

impl SldExpansion {
    /// Assembled SLD in the eigenbasis.
    pub fn assemble_eigenbasis(&self) -> CMatrix {
        let g2 = self.gamma * self.gamma;
        let mut l = &self.alpha * C64::new(g2, 0.0);
        for (n, z) in self.zeroth.iter().enumerate() {
            l[[n, n]] += C64::new(*z, 0.0);
        }
        l
    }

    /// Assembled SLD in the computational basis (symmetrised).
    pub fn assemble(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(&self.basis.from_basis(&self.assemble_eigenbasis()))
    }

    pub fn zeroth_operator(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(&self.basis.from_diagonal(&self.zeroth))
    }
}

/// `α_nm = [2 p_n ∂_β X_nm + p_n Δ_nm X_nm]/(p_n + p_m)` with `Δ_nm = ε_m − ε_n`.
pub fn sld_second_order(x: &MeanForceExpansion) -> SldExpansion {
    let p = x.populations();
    let e = x.probe.energies();
    let dim = p.len();
    let mut alpha = CMatrix::zeros((dim, dim));
    for n in 0..dim {
        for m in 0..dim {
            let den = p[n] + p[m];
            if den == 0.0 {
                continue;
            }
            alpha[[n, m]] = (x.dx[[n, m]] * (2.0 * p[n]) + x.x[[n, m]] * (p[n] * (e[m] - e[n]))) / den;
        }
    }
    SldExpansion {
        zeroth: x.thermal.delta.iter().map(|d| -d).collect(),
        alpha,
        gamma: x.gamma,
        basis: x.probe.spectrum().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs};
    use crate::models::{
        bath_qubit, probe_qubit, BathQubitCoupling, Continuum, ProbeModel,
    };
    use std::f64::consts::PI;

    fn sb_bath() -> BathModel {
        BathModel::continuum(Continuum::new(1.0, 100.0, 1.0).unwrap(), 64).unwrap()
    }

    fn qubit_bath() -> BathModel {
        BathModel::discrete(bath_qubit(0.8, BathQubitCoupling::SigmaX).unwrap())
    }

    #[test]
    fn commuting_coupling_has_no_correction() {
        let x = MeanForceExpansion::compute(&probe_qubit(1.0, 0.0).unwrap(), &qubit_bath(), 1.0, 0.1, &Default::default()).unwrap();
        assert!(max_abs(x.x()) < 1e-14);
        assert!(max_abs(x.dx()) < 1e-14);
    }

    #[test]
    fn weighted_trace_vanishes() {
        for theta in [PI / 4.0, 1.0, 1.5 * PI] {
            for bath in [qubit_bath(), sb_bath()] {
                let x = MeanForceExpansion::compute(&probe_qubit(1.0, theta).unwrap(), &bath, 1.0, 0.1, &Default::default()).unwrap();
                assert!(x.weighted_trace().abs() < 1e-10);
                assert!(hermiticity_defect(&x.pi_x()) < 1e-12);
            }
        }
    }

    #[test]
    fn assumption_ii_enforced() {
        let bath = BathModel::discrete(bath_qubit(1.0, BathQubitCoupling::SigmaZ).unwrap());
        let r = MeanForceExpansion::compute(&probe_qubit(1.0, 1.0).unwrap(), &bath, 1.0, 0.1, &Default::default());
        assert!(matches!(r, Err(Error::AssumptionII { .. })));
    }

    #[test]
    fn tilted_coupling_generates_real_coherence() {
        let x = MeanForceExpansion::compute(&probe_qubit(1.0, PI / 4.0).unwrap(), &sb_bath(), 1.0, 0.1, &Default::default()).unwrap();
        let x01 = x.x()[[0, 1]];
        assert!(x01.re.abs() > 1e-3);
        assert!(x01.im.abs() < 1e-12);
    }

    #[test]
    fn analytic_and_finite_difference_derivatives_agree() {
        for bath in [qubit_bath(), sb_bath()] {
            let probe = probe_qubit(1.0, 0.7).unwrap();
            let a = MeanForceExpansion::compute(&probe, &bath, 1.2, 0.1, &Default::default()).unwrap();
            let opts = ExpansionOptions {
                derivative: DerivativeMethod::FiniteDifference,
                ..Default::default()
            };
            let f = MeanForceExpansion::compute(&probe, &bath, 1.2, 0.1, &opts).unwrap();
            let scale = max_abs(a.dx()).max(1.0);
            assert!(max_abs(&(a.dx() - f.dx())) / scale < 1e-7, "{:?} vs {:?}", a.dx(), f.dx());
            assert!(f.fd_discrepancy().unwrap() < 1e-6 * scale);
        }
    }

    #[test]
    fn alpha_diagonal_is_derivative_and_sld_hermitian() {
        // σ_x coupling: Σ_k S_0k S_k1 = 0, so no coherence; θ = π/4 has one
        for (theta, coherent) in [(1.5 * PI, false), (PI / 4.0, true)] {
            let x = MeanForceExpansion::compute(&probe_qubit(1.0, theta).unwrap(), &sb_bath(), 2.0, 0.1, &Default::default()).unwrap();
            let l = sld_second_order(&x);
            for n in 0..2 {
                assert!((l.alpha[[n, n]] - x.dx()[[n, n]]).norm() < 1e-10);
            }
            assert!(hermiticity_defect(&l.assemble_eigenbasis()) < 1e-10);
            assert_eq!(l.alpha[[0, 1]].norm() > 1e-4, coherent);
        }
    }

    #[test]
    fn zero_coupling_sld_is_energy_fluctuation() {
        let probe = probe_qubit(1.0, 0.3).unwrap();
        let x = MeanForceExpansion::compute(&probe, &qubit_bath(), 1.0, 0.0, &Default::default()).unwrap();
        let l = sld_second_order(&x).assemble();
        let th = probe.thermal(1.0).unwrap();
        let expect = crate::linalg::identity(2) * C64::new(th.mean_energy, 0.0) - probe.hamiltonian().matrix();
        assert!(max_abs(&(l.matrix() - &expect)) < 1e-14);
        let rho = mfg_second_order(&x).unwrap();
        let pi = crate::linalg::gibbs_state(probe.hamiltonian(), 1.0).unwrap().state;
        assert!(max_abs(&(rho.matrix() - pi.matrix())) < 1e-15);
    }

    #[test]
    fn sld_equation_residual_is_fourth_order() {
        let probe = probe_qubit(1.0, PI / 4.0).unwrap();
        let base = MeanForceExpansion::compute(&probe, &qubit_bath(), 1.0, 0.0, &Default::default()).unwrap();
        for gamma in [1e-3, 1e-2, 3e-2, 1e-1] {
            let x = base.with_gamma(gamma);
            let (rho, _) = x.raw_state_eigenbasis();
            let drho = x.state_derivative_eigenbasis();
            let l = sld_second_order(&x).assemble_eigenbasis();
            let res = crate::linalg::anticommutator(&l, &rho) - drho * C64::new(2.0, 0.0);
            assert!(max_abs(&res) <= 10.0 * gamma.powi(4), "γ={gamma}: {}", max_abs(&res));
        }
    }

    #[test]
    fn populations_follow_diagonal() {
        let x = MeanForceExpansion::compute(&probe_qubit(1.0, 1.0).unwrap(), &qubit_bath(), 1.0, 0.05, &Default::default()).unwrap();
        let rho = mfg_second_order(&x).unwrap();
        let pops = rho.populations(x.probe().spectrum());
        for (a, b) in pops.iter().zip(x.populations_second_order()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn strong_coupling_flagged() {
        let x = MeanForceExpansion::compute(&probe_qubit(1.0, 1.5 * PI).unwrap(), &sb_bath(), 5.0, 3.0, &Default::default()).unwrap();
        assert!(matches!(mfg_second_order(&x), Err(Error::PerturbativeRegime { .. })));
    }

    #[test]
    fn p1_vanishes_without_mean_and_is_hermitian_traceless() {
        let probe = probe_qubit(1.0, 0.4).unwrap();
        assert!(max_abs(p1_operator(&probe, 0.0, 1.0).unwrap().matrix()) < 1e-300);
        let p1 = p1_operator(&probe, -0.3, 1.7).unwrap();
        assert!(crate::linalg::trace(p1.matrix()).norm() < 1e-12);
    }

    fn three_level(gap: f64) -> ProbeModel {
        let h = HermitianOperator::diagonal(&[0.0, gap, 1.0]);
        let s = HermitianOperator::from_real(&[&[0.2, 0.7, 0.3], &[0.7, -0.4, 0.5], &[0.3, 0.5, 0.1]]).unwrap();
        ProbeModel::new(h, s, 0.0, "three-level").unwrap()
    }

    #[test]
    fn degenerate_limit_is_continuous() {
        let bath = qubit_bath();
        let beta = 1.3;
        let phi = bath.correlation(beta).unwrap();
        let rule = QuadratureRule::gauss_legendre(64, 0.0, beta).unwrap();
        let near = x_offdiag(&three_level(1e-6), phi.as_ref(), &rule).unwrap();
        let at = x_offdiag(&three_level(0.0), phi.as_ref(), &rule).unwrap();
        for (a, b) in near.iter().zip(at.iter()) {
            assert!((a - b).norm() <= 1e-5 * b.norm().max(1e-12), "{a} vs {b}");
        }
        assert!(x_diag(&three_level(0.5), phi.as_ref(), &QuadratureRule::gauss_legendre(8, 0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn entries_real_for_real_coupling() {
        let x = MeanForceExpansion::compute(&three_level(0.4), &qubit_bath(), 0.9, 0.1, &Default::default()).unwrap();
        assert!(x.x().iter().all(|z| z.im.abs() < 1e-12));
        assert!(x.weighted_trace().abs() < 1e-10);
    }
}
