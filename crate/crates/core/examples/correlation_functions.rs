//! Imaginary-time correlators: closed form against eigen-sum for the
//! spin-boson probe, and the Ohmic bath correlator.

use std::f64::consts::FRAC_PI_4;

use thermometry::models::{
    bath_corr_bosonic, probe_corr_closed, probe_corr_numeric, probe_qubit, BathModel, ClosedForm, Continuum, CorrelationFn,
};

fn main() -> thermometry::Result<()> {
    let beta = 1.0;
    let probe = probe_qubit(1.0, FRAC_PI_4)?;
    let closed = probe_corr_closed(ClosedForm::SpinBoson { epsilon: 1.0, theta: FRAC_PI_4 }, beta)?;
    let numeric = probe_corr_numeric(&probe, beta)?;
    let ohmic = Continuum::new(1.0, 100.0, 1.0)?;
    let bath = BathModel::continuum(ohmic, 128)?;
    let phi_b = bath_corr_bosonic(&ohmic, beta, bath.omega_rule().expect("continuum bath has a frequency rule"))?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "u", "Φ_S closed", "Φ_S sum", "∂_βΦ_S", "Φ_B");
    for k in 0..=10 {
        let u = beta * k as f64 / 10.0;
        let c = closed.eval(u);
        let n = numeric.eval(u);
        println!("{u:6.2} {:14.10} {:14.10} {:14.10} {:14.6}", c.value, n.value, c.d_beta, phi_b.eval(u).value);
    }
    Ok(())
}
