//! Reference values computed independently (arbitrary-precision quadrature
//! of the defining integrals, dense matrix exponentials) and frozen here.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::linalg::{gibbs_state, max_abs};
use crate::metrology::MetrologyReport;
use crate::models::{
    bath_qubit, probe_corr_numeric, probe_oscillator, probe_oscillator_auto, probe_qubit, BathModel, BathQubitCoupling,
    Continuum, CorrelationFn,
};
use crate::oracle::{
    appendix_a1, appendix_a2, appendix_a2_transposed, bath_corr_series, exact_fishers, exact_mfg, gamma_coefficients,
};
use crate::perturbation::{p1_operator, ExpansionOptions};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn spin_boson_xi() {
    let bath = BathModel::continuum(Continuum::new(1.0, 100.0, 1.0).unwrap(), 128).unwrap();
    let want = [
        (0.05, -0.000887809086463578),
        (0.3, -0.0734590321211),
        (1.0, -0.939286868445069),
        (2.0, -2.68435302388516),
        (5.0, -12.1286502548267),
    ];
    let diagonal_coupling = probe_qubit(1.0, FRAC_PI_4).unwrap();
    let transverse = probe_qubit(1.0, 1.5 * PI).unwrap();
    for (beta, xi) in want {
        let r = MetrologyReport::compute(&diagonal_coupling, &bath, beta, 0.1, &ExpansionOptions::default()).unwrap();
        assert!(close(r.xi, xi, 1e-9), "β={beta}: {} vs {xi}", r.xi);
        // sin²θ doubles from θ = π/4 to 3π/2
        let r = MetrologyReport::compute(&transverse, &bath, beta, 0.1, &ExpansionOptions::default()).unwrap();
        assert!(close(r.xi, 2.0 * xi, 1e-9), "β={beta}: {} vs {}", r.xi, 2.0 * xi);
    }
}

#[test]
fn oscillator_xi() {
    let bath = BathModel::continuum(Continuum::new(1.0, 100.0, 2.0).unwrap(), 128).unwrap();
    for (beta, xi) in [(0.01, -0.0477106614450995), (1.0, 359.901495865091)] {
        let p = probe_oscillator_auto(1.0, beta, 1e-8).unwrap();
        let r = MetrologyReport::compute(&p, &bath, beta, 0.1, &ExpansionOptions::default()).unwrap();
        assert!(close(r.xi, xi, 1e-8), "β={beta}: {} vs {xi}", r.xi);
    }
}

#[test]
fn qubit_with_bath_qubit() {
    let p = probe_qubit(1.0, FRAC_PI_4).unwrap();
    let bath = BathModel::discrete(bath_qubit(1.0, BathQubitCoupling::SigmaX).unwrap());
    let r = MetrologyReport::compute(&p, &bath, 1.0, 0.1, &ExpansionOptions::default()).unwrap();
    assert!((r.f0 - 0.196612).abs() < 1e-6);
    assert!((r.f2 - -0.113701).abs() < 1e-6, "{}", r.f2);
}

#[test]
fn oscillator_position_variance() {
    let p = probe_oscillator(1.0, 60, 1.0).unwrap();
    let phi = probe_corr_numeric(&p, 1.0).unwrap();
    assert!((phi.eval(0.0).value - 1.081977).abs() < 1e-6);
}

#[test]
fn hurwitz_series_at_fixed_points() {
    // Φ_B(−iu) for s = 1, Ω = 100, a = 1 by direct quadrature of the frequency integral
    let c = Continuum::new(1.0, 100.0, 1.0).unwrap();
    let (v, _) = bath_corr_series(&c, 1.0, 0.5).unwrap();
    let bath = BathModel::continuum(c, 128).unwrap();
    let q = bath.correlation(1.0).unwrap().eval(0.5).value;
    assert!(close(v, q, 1e-12));
    // u → 0 approaches Ω²Γ(2)/π · 2 − … from below
    let (v0, _) = bath_corr_series(&c, 1.0, 0.0).unwrap();
    assert!(v0 < 2.0 * 100.0f64.powi(2) / PI && v0 > 0.9 * 100.0f64.powi(2) / PI);
}

#[test]
fn appendix_one_exact_state() {
    let a1 = appendix_a1().unwrap();
    let (beta, gamma) = (1.0, 0.01);
    let rho = exact_mfg(&a1.joint.with_gamma(gamma).unwrap(), beta).unwrap();
    let pi = gibbs_state(a1.joint.probe().hamiltonian(), beta).unwrap().state;
    // σ_z coefficient of the correction
    let dz = 0.5 * ((rho.matrix()[[0, 0]] - pi.matrix()[[0, 0]]) - (rho.matrix()[[1, 1]] - pi.matrix()[[1, 1]])).re;
    let want = 0.159924 * gamma + 0.5 * beta * beta * beta.tanh().powi(3) / beta.cosh().powi(2) * gamma * gamma;
    assert!((dz - want).abs() < 5.0 * gamma.powi(3), "{dz} vs {want}");
    // F = I whenever the coupling commutes with both Hamiltonians
    let f = exact_fishers(&a1.joint.with_gamma(0.5).unwrap(), beta, None).unwrap();
    assert!((f.qfi - f.cfi).abs() < 1e-10);
}

#[test]
fn appendix_two_first_order_coherence() {
    let a2 = appendix_a2().unwrap();
    let c = gamma_coefficients(&a2.joint, 1.0, 1e-4).unwrap();
    assert!((c.state_first[[0, 1]].re - -0.045392).abs() < 1e-6);
    // the transposed coupling keeps the state diagonal
    let t = appendix_a2_transposed().unwrap();
    let rho = exact_mfg(&t.with_gamma(0.2).unwrap(), 1.0).unwrap();
    assert!(rho.matrix()[[0, 1]].norm() < 1e-14);
}

#[test]
fn first_order_operator_matches_oracle() {
    for (joint, beta) in [(appendix_a1().unwrap().joint, 0.7), (appendix_a2().unwrap().joint, 1.3)] {
        let avg_b = joint.bath().mean_coupling(beta).unwrap();
        let p1 = p1_operator(joint.probe(), avg_b, beta).unwrap();
        let c = gamma_coefficients(&joint, beta, 1e-4).unwrap();
        assert!(max_abs(&(p1.matrix() - &c.state_first)) < 1e-7, "{:?} vs {:?}", p1.matrix(), c.state_first);
    }
}
