use serde::{Deserialize, Serialize};

use super::correlation::{CorrPoint, CorrelationFn, EigenCorrelation};
use crate::linalg::{eigendecompose, pauli, CMatrix, HermitianOperator, SpectralDecomposition};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result, C64};

/// Bosonic continuum with `J(ω) = A Ω^{a−s} ω^s e^{−ω/Ω}`.
///
/// `amplitude` (`A`, default 1) only exists so a switched-off bath can be
/// expressed; the coupling strength proper is `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Continuum {
    pub s: f64,
    #[serde(alias = "Omega")]
    pub omega_c: f64,
    pub a: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl Continuum {
    pub fn new(s: f64, omega_c: f64, a: f64) -> Result<Self> {
        let c = Self {
            s,
            omega_c,
            a,
            amplitude: 1.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::Domain(format!("Ohmicity s must be positive, got {}", self.s)));
        }
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::Domain(format!("cutoff Ω must be positive, got {}", self.omega_c)));
        }
        if !self.a.is_finite() {
            return Err(Error::Domain("exponent a must be finite".into()));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Domain(format!("amplitude must be ≥ 0, got {}", self.amplitude)));
        }
        Ok(())
    }
}

/// Finite sample with Hamiltonian `H_B` and coupling operator `B`.
#[derive(Debug, Clone)]
pub struct Discrete {
    h: HermitianOperator,
    b: HermitianOperator,
    spec: SpectralDecomposition,
    b_eig: CMatrix,
}

impl Discrete {
    pub fn new(h: HermitianOperator, b: HermitianOperator) -> Result<Self> {
        if h.dim() != b.dim() {
            return Err(Error::Validation(format!("H_B has dim {} but B has dim {}", h.dim(), b.dim())));
        }
        let spec = eigendecompose(&h)?;
        let b_eig = spec.to_basis(b.matrix());
        Ok(Self { h, b, spec, b_eig })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn coupling(&self) -> &HermitianOperator {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// `⟨B⟩_B` in the bare sample Gibbs state.
    pub fn mean_coupling(&self, beta: f64) -> Result<f64> {
        Ok(bath_corr_discrete(self, beta)?.mean())
    }

    /// Largest transition frequency `|ε_k − ε_n|` connected by `B`.
    pub fn frequency_scale(&self) -> f64 {
        let e = self.spec.eigenvalues();
        let mut m: f64 = 0.0;
        for ((n, k), z) in self.b_eig.indexed_iter() {
            if z.norm() > 0.0 {
                m = m.max((e[k] - e[n]).abs());
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub enum BathSpec {
    Continuum(Continuum),
    Discrete(Discrete),
}

/// A sample ready for evaluation: its specification plus, for a continuum,
/// the frequency rule used for `∫₀^∞ dω`.
#[derive(Debug, Clone)]
pub struct BathModel {
    spec: BathSpec,
    omega_rule: Option<QuadratureRule>,
}

impl BathModel {
    /// `n_omega` is the Gauss–Legendre order per frequency panel; unused for
    /// a discrete sample.
    pub fn new(spec: BathSpec, n_omega: usize) -> Result<Self> {
        let omega_rule = match &spec {
            BathSpec::Continuum(c) => {
                c.validate()?;
                // integrand ~ ω^{s−1} near zero: the first panel leaves an error ~ head^s
                let head = if c.s < 1.0 { 1e-12f64.powf(1.0 / c.s).max(1e-280) } else { 1e-10 };
                Some(QuadratureRule::graded_semi_infinite_to(n_omega, c.omega_c, head)?)
            }
            BathSpec::Discrete(_) => None,
        };
        Ok(Self { spec, omega_rule })
    }

    pub fn continuum(c: Continuum, n_omega: usize) -> Result<Self> {
        Self::new(BathSpec::Continuum(c), n_omega)
    }

    pub fn discrete(d: Discrete) -> Self {
        Self {
            spec: BathSpec::Discrete(d),
            omega_rule: None,
        }
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn omega_rule(&self) -> Option<&QuadratureRule> {
        self.omega_rule.as_ref()
    }

    pub fn correlation(&self, beta: f64) -> Result<Box<dyn CorrelationFn>> {
        match (&self.spec, &self.omega_rule) {
            (BathSpec::Continuum(c), Some(rule)) => Ok(Box::new(bath_corr_bosonic(c, beta, rule)?)),
            (BathSpec::Discrete(d), _) => Ok(Box::new(bath_corr_discrete(d, beta)?)),
            (BathSpec::Continuum(_), None) => Err(Error::Numerical("continuum sample without frequency rule".into())),
        }
    }

    /// `⟨B⟩_B`; identically zero for a bosonic continuum coupled linearly.
    pub fn mean_coupling(&self, beta: f64) -> Result<f64> {
        match &self.spec {
            BathSpec::Continuum(_) => Ok(0.0),
            BathSpec::Discrete(d) => d.mean_coupling(beta),
        }
    }

    /// Frequency beyond which the correlator varies on imaginary-time scales
    /// shorter than `1/scale`: the cutoff for a continuum, the largest
    /// coupled gap for a discrete sample.
    pub fn frequency_scale(&self) -> f64 {
        match &self.spec {
            BathSpec::Continuum(c) => c.omega_c,
            BathSpec::Discrete(d) => d.frequency_scale(),
        }
    }
}

pub fn spectral_density(b: &Continuum, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("frequency must be ≥ 0, got {omega}")));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    let x = omega / b.omega_c;
    Ok(b.amplitude * b.omega_c.powf(b.a) * x.powf(b.s) * (-x).exp())
}

/// `G = cosh(βω/2 − uω)/sinh(βω/2)` and `∂_β G` at fixed `u`, written with
/// decaying exponentials only.
pub fn thermal_kernel(u: f64, beta: f64, omega: f64) -> (f64, f64) {
    let e_beta = (-beta * omega).exp();
    let den = -(-beta * omega).exp_m1();
    let (a, b) = ((-u * omega).exp(), (-(beta - u) * omega).exp());
    let g = (a + b) / den;
    let s_minus = (a - b) / den;
    let coth = (1.0 + e_beta) / den;
    (g, 0.5 * omega * (s_minus - g * coth))
}

/// `Φ_B(−iu) = (1/π)∫₀^∞ dω J(ω) G(u, ω)` on a fixed frequency rule.
#[derive(Debug, Clone)]
pub struct BosonicCorrelation {
    beta: f64,
    omega: Vec<f64>,
    // w_i J(ω_i)/π
    weight: Vec<f64>,
}

pub fn bath_corr_bosonic(b: &Continuum, beta: f64, rule: &QuadratureRule) -> Result<BosonicCorrelation> {
    b.validate()?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    let mut omega = Vec::with_capacity(rule.len());
    let mut weight = Vec::with_capacity(rule.len());
    for (w, q) in rule.iter() {
        let j = spectral_density(b, w)?;
        omega.push(w);
        weight.push(q * j / std::f64::consts::PI);
    }
    let c = BosonicCorrelation { beta, omega, weight };
    let p = c.eval(0.0);
    if !p.value.is_finite() || !p.d_beta.is_finite() {
        return Err(Error::Numerical(format!(
            "bath correlator not finite at u=0 (s={}, Ω={}, β={beta}): value {}, ∂_β {}",
            b.s, b.omega_c, p.value, p.d_beta
        )));
    }
    Ok(c)
}

impl CorrelationFn for BosonicCorrelation {
    fn beta(&self) -> f64 {
        self.beta
    }

    fn mean(&self) -> f64 {
        0.0
    }

    fn eval(&self, u: f64) -> CorrPoint {
        let (mut v, mut d) = (0.0, 0.0);
        for (w, q) in self.omega.iter().zip(&self.weight) {
            let (g, dg) = thermal_kernel(u, self.beta, *w);
            v += q * g;
            d += q * dg;
        }
        CorrPoint {
            value: v,
            d_beta: d,
            d2_beta: None,
        }
    }
}

/// `Φ_B` of a finite sample; `mean()` of the result is `⟨B⟩_B`.
pub fn bath_corr_discrete(b: &Discrete, beta: f64) -> Result<EigenCorrelation> {
    EigenCorrelation::new(b.spec.eigenvalues(), &b.b_eig, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathQubitCoupling {
    /// `B = σ_x`: `⟨B⟩_B = 0`.
    SigmaX,
    /// `B = σ_z`: `⟨B⟩_B = −tanh(βω_B)`.
    SigmaZ,
    /// `B = |↑⟩⟨↑|`.
    Projector,
}

/// Single-qubit sample `H_B = ω_B σ_z`.
pub fn bath_qubit(omega_b: f64, coupling: BathQubitCoupling) -> Result<Discrete> {
    if !omega_b.is_finite() {
        return Err(Error::Domain("ω_B must be finite".into()));
    }
    let h = HermitianOperator::new(pauli::sigma_z() * C64::new(omega_b, 0.0))?;
    let b = match coupling {
        BathQubitCoupling::SigmaX => pauli::sigma_x(),
        BathQubitCoupling::SigmaZ => pauli::sigma_z(),
        BathQubitCoupling::Projector => pauli::projector_up(),
    };
    Discrete::new(h, HermitianOperator::new(b)?)
}

/// One bosonic mode truncated to `n_levels`, coupled through its position.
pub fn bosonic_mode(omega: f64, n_levels: usize, beta_design: f64, tail: f64) -> Result<Discrete> {
    if !(omega > 0.0) || n_levels < 2 {
        return Err(Error::Domain(format!("bosonic mode needs ω > 0 and ≥ 2 levels (ω={omega}, n={n_levels})")));
    }
    let top = super::oscillator_tail_population(omega, n_levels, beta_design);
    if top > tail {
        return Err(Error::Truncation(format!(
            "{n_levels} mode levels leave population {top:.3e} > {tail:.1e} at β={beta_design}"
        )));
    }
    let (h, x) = super::ladder_operators(omega, n_levels);
    Discrete::new(h, x)
}
