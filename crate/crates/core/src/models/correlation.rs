use super::ProbeModel;
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Value of a correlator at one imaginary time together with its
/// β-derivatives at fixed `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrPoint {
    pub value: f64,
    pub d_beta: f64,
    /// Not provided by continuum bath correlators.
    pub d2_beta: Option<f64>,
}

/// Imaginary-time autocorrelation `Φ(−iu) = ⟨A(−iu) A⟩` at a fixed β.
pub trait CorrelationFn: Send + Sync {
    fn beta(&self) -> f64;

    fn eval(&self, u: f64) -> CorrPoint;

    /// Thermal mean `⟨A⟩` of the coupling operator at this β.
    fn mean(&self) -> f64;

    /// `Φ̃(−iu) = (β − u)Φ(−iu)` and its full β-derivative
    /// `Φ + (β − u)∂_βΦ`.
    fn modified(&self, u: f64) -> (f64, f64) {
        let p = self.eval(u);
        let w = self.beta() - u;
        (w * p.value, p.value + w * p.d_beta)
    }
}

/// Eigenbasis sum `Σ_nk p_n |A_nk|² e^{−uΔ_nk}` for a finite system.
#[derive(Debug, Clone)]
pub struct EigenCorrelation {
    beta: f64,
    // (ln p_n, |A_nk|², Δ_nk, Δ_n, Δ_n² − Var)
    terms: Vec<[f64; 5]>,
    mean: f64,
}

impl EigenCorrelation {
    /// `energies` ascending, `a` the coupling operator in the same eigenbasis.
    pub fn new(energies: &[f64], a: &CMatrix, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("β must be positive, got {beta}")));
        }
        let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let log_w: Vec<f64> = energies.iter().map(|e| -beta * (e - ground)).collect();
        let log_z = log_w.iter().map(|l| l.exp()).sum::<f64>().ln();
        let p: Vec<f64> = log_w.iter().map(|l| (l - log_z).exp()).collect();
        let mean_e: f64 = p.iter().zip(energies).map(|(p, e)| p * e).sum();
        let var: f64 = p.iter().zip(energies).map(|(p, e)| p * (e - mean_e).powi(2)).sum();
        let mut terms = Vec::new();
        let cut = 1e-15 * crate::linalg::max_abs(a);
        for ((n, k), z) in a.indexed_iter() {
            if z.norm() <= cut {
                continue;
            }
            let dn = energies[n] - mean_e;
            terms.push([log_w[n] - log_z, z.norm_sqr(), energies[k] - energies[n], dn, dn * dn - var]);
        }
        let mean = (0..energies.len()).map(|n| p[n] * a[[n, n]].re).sum();
        Ok(Self { beta, terms, mean })
    }

}

impl CorrelationFn for EigenCorrelation {
    fn beta(&self) -> f64 {
        self.beta
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn eval(&self, u: f64) -> CorrPoint {
        let (mut v, mut d, mut d2) = (0.0, 0.0, 0.0);
        for [lp, w, gap, dn, c2] in &self.terms {
            let t = w * (lp - u * gap).exp();
            v += t;
            d -= dn * t;
            d2 += c2 * t;
        }
        CorrPoint {
            value: v,
            d_beta: d,
            d2_beta: Some(d2),
        }
    }
}

/// `Φ_S` of a probe from its eigen-decomposition, with analytic derivatives
/// from `∂_β p_n = −p_n Δ_n` and `∂²_β p_n = p_n(Δ_n² − Var H_S)`.
pub fn probe_corr_numeric(p: &ProbeModel, beta: f64) -> Result<EigenCorrelation> {
    EigenCorrelation::new(p.energies(), p.coupling_in_eigenbasis(), beta)
}

/// Built-in probes with closed-form correlators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// Qubit `(ε/2)σ_z` with `S = cos θ σ_z − sin θ σ_x`.
    SpinBoson { epsilon: f64, theta: f64 },
    /// Oscillator of frequency `ω₀` coupled through its position.
    Oscillator { omega0: f64 },
}

impl ClosedForm {
    pub fn from_name(kind: &str, a: f64, b: f64) -> Result<Self> {
        match kind {
            "spin_boson" => Ok(ClosedForm::SpinBoson { epsilon: a, theta: b }),
            "qbm" => Ok(ClosedForm::Oscillator { omega0: a }),
            other => Err(Error::Validation(format!("unknown closed-form model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClosedFormCorrelation {
    kind: ClosedForm,
    beta: f64,
}

pub fn probe_corr_closed(kind: ClosedForm, beta: f64) -> Result<ClosedFormCorrelation> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    match kind {
        ClosedForm::SpinBoson { epsilon, theta } if epsilon > 0.0 && theta.is_finite() => {}
        ClosedForm::Oscillator { omega0 } if omega0 > 0.0 => {}
        _ => return Err(Error::Domain(format!("invalid closed-form parameters {kind:?}"))),
    }
    Ok(ClosedFormCorrelation { kind, beta })
}

impl ClosedFormCorrelation {
    pub fn kind(&self) -> ClosedForm {
        self.kind
    }
}

impl CorrelationFn for ClosedFormCorrelation {
    fn beta(&self) -> f64 {
        self.beta
    }

    fn mean(&self) -> f64 {
        match self.kind {
            ClosedForm::SpinBoson { epsilon, theta } => -theta.cos() * (0.5 * self.beta * epsilon).tanh(),
            ClosedForm::Oscillator { .. } => 0.0,
        }
    }

    fn eval(&self, u: f64) -> CorrPoint {
        let beta = self.beta;
        match self.kind {
            ClosedForm::SpinBoson { epsilon, theta } => {
                // cos²θ + sin²θ cosh(A)/cosh(B), A = εu − βε/2, B = βε/2
                let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
                let a = epsilon * u - 0.5 * beta * epsilon;
                let b = 0.5 * beta * epsilon;
                let (ch, sh) = hyperbolic_ratios(a, b);
                let t = b.tanh();
                let d = -0.5 * epsilon * (sh + ch * t);
                CorrPoint {
                    value: c2 + s2 * ch,
                    d_beta: s2 * d,
                    d2_beta: Some(-s2 * epsilon * t * d),
                }
            }
            ClosedForm::Oscillator { omega0: w } => {
                let n = 1.0 / (beta * w).exp_m1();
                let ch = (u * w).cosh();
                let nn1 = n * (n + 1.0);
                CorrPoint {
                    value: (-u * w).exp() / (2.0 * w) + ch * n / w,
                    d_beta: -ch * nn1,
                    d2_beta: Some(ch * w * nn1 * (2.0 * n + 1.0)),
                }
            }
        }
    }
}

/// `(cosh A / cosh B, sinh A / cosh B)` for `|A| ≤ B`, without overflow.
fn hyperbolic_ratios(a: f64, b: f64) -> (f64, f64) {
    if b < 20.0 {
        return (a.cosh() / b.cosh(), a.sinh() / b.cosh());
    }
    let scale = (a.abs() - b).exp() / (1.0 + (-2.0 * b).exp());
    let e = (-2.0 * a.abs()).exp();
    (scale * (1.0 + e), a.signum() * scale * (1.0 - e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{probe_oscillator, probe_qubit};
    use std::f64::consts::PI;

    fn grid(beta: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| beta * i as f64 / (n - 1) as f64)
    }

    fn fd_check(make: &dyn Fn(f64) -> Box<dyn CorrelationFn>, beta: f64) {
        let h = 1e-5 * beta;
        let c = make(beta);
        let (lo, hi) = (make(beta - h), make(beta + h));
        for u in grid(beta - h, 17) {
            let p = c.eval(u);
            let fd = (hi.eval(u).value - lo.eval(u).value) / (2.0 * h);
            assert!((fd - p.d_beta).abs() / p.d_beta.abs().max(1.0) < 1e-6, "u={u}: {fd} vs {}", p.d_beta);
            if let Some(d2) = p.d2_beta {
                let fd2 = (hi.eval(u).d_beta - lo.eval(u).d_beta) / (2.0 * h);
                assert!((fd2 - d2).abs() / d2.abs().max(1.0) < 1e-6, "u={u}: {fd2} vs {d2}");
            }
            let (_, dt) = c.modified(u);
            let fdt = (hi.modified(u).0 - lo.modified(u).0) / (2.0 * h);
            assert!((fdt - dt).abs() / dt.abs().max(1.0) < 1e-6);
        }
    }

    #[test]
    fn qubit_numeric_matches_closed_form() {
        for theta in [0.0, PI / 4.0, 1.0, 1.5 * PI] {
            for beta in [0.3, 1.0, 4.0] {
                let num = probe_corr_numeric(&probe_qubit(1.0, theta).unwrap(), beta).unwrap();
                let cf = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta }, beta).unwrap();
                for u in grid(beta, 64) {
                    let (a, b) = (num.eval(u), cf.eval(u));
                    assert!((a.value - b.value).abs() < 1e-12);
                    assert!((a.d_beta - b.d_beta).abs() < 1e-12);
                    assert!((a.d2_beta.unwrap() - b.d2_beta.unwrap()).abs() < 1e-12);
                }
                assert!((num.eval(0.0).value - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn commuting_qubit_correlator_is_constant() {
        let cf = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: 0.0 }, 2.0).unwrap();
        for u in grid(2.0, 9) {
            assert_eq!(cf.eval(u).value, 1.0);
            assert_eq!(cf.eval(u).d_beta, 0.0);
        }
    }

    #[test]
    fn oscillator_numeric_matches_closed_form() {
        let beta = 1.0;
        let m = probe_oscillator(1.0, 40, beta).unwrap();
        let num = probe_corr_numeric(&m, beta).unwrap();
        let cf = probe_corr_closed(ClosedForm::Oscillator { omega0: 1.0 }, beta).unwrap();
        assert!((num.eval(0.0).value - 0.5 / (0.5f64).tanh()).abs() < 1e-10);
        assert!((num.eval(0.0).value - 1.081977).abs() < 1e-6);
        for u in grid(beta, 64) {
            let (a, b) = (num.eval(u), cf.eval(u));
            assert!((a.value - b.value).abs() < 1e-10);
            assert!((a.d_beta - b.d_beta).abs() < 1e-8);
        }
        assert!((num.eval(0.5).value - cf.eval(0.5).value).abs() < 1e-10);
    }

    #[test]
    fn oscillator_truncation_converged() {
        let beta = 1.0;
        let a = probe_corr_numeric(&probe_oscillator(1.0, 40, beta).unwrap(), beta).unwrap();
        let b = probe_corr_numeric(&probe_oscillator(1.0, 80, beta).unwrap(), beta).unwrap();
        for u in grid(beta, 33) {
            assert!((a.eval(u).value - b.eval(u).value).abs() < 1e-10);
        }
    }

    #[test]
    fn kms_reflection() {
        let osc = probe_oscillator(1.0, 60, 1.3).unwrap();
        let cs: Vec<Box<dyn CorrelationFn>> = vec![
            Box::new(probe_corr_numeric(&probe_qubit(1.3, 0.7).unwrap(), 2.0).unwrap()),
            Box::new(probe_corr_numeric(&osc, 1.3).unwrap()),
            Box::new(probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: 0.4 }, 3.0).unwrap()),
            Box::new(probe_corr_closed(ClosedForm::Oscillator { omega0: 2.0 }, 1.5).unwrap()),
        ];
        for c in &cs {
            let beta = c.beta();
            for u in grid(beta, 64) {
                assert!((c.eval(u).value - c.eval(beta - u).value).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        fd_check(&|b| Box::new(probe_corr_numeric(&probe_qubit(1.0, 0.9).unwrap(), b).unwrap()), 1.0);
        fd_check(
            &|b| Box::new(probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: PI / 4.0 }, b).unwrap()),
            2.0,
        );
        fd_check(&|b| Box::new(probe_corr_closed(ClosedForm::Oscillator { omega0: 1.0 }, b).unwrap()), 0.7);
        let osc = probe_oscillator(1.0, 60, 1.0).unwrap();
        fd_check(&|b| Box::new(probe_corr_numeric(&osc, b).unwrap()), 1.0);
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let cf = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: 1.0 }, 200.0).unwrap();
        let p = cf.eval(200.0);
        assert!(p.value.is_finite() && p.d_beta.is_finite());
        assert!((p.value - 1.0).abs() < 1e-12);
        assert!(probe_corr_closed(ClosedForm::Oscillator { omega0: -1.0 }, 1.0).is_err());
        assert!(ClosedForm::from_name("ising", 1.0, 0.0).is_err());
    }
}
