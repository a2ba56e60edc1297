//! ξ from the frequency-resolved kernel `f_S(T, ω)` and its high-temperature
//! behaviour.

use std::f64::consts::FRAC_PI_4;

use thermometry::metrology::{high_t_asymptote, high_t_leading_order, xi_via_spectral_kernel, MetrologyReport};
use thermometry::models::{probe_corr_closed, probe_qubit, BathModel, ClosedForm, Continuum};
use thermometry::perturbation::{imaginary_time_rule, ExpansionOptions};

fn main() -> thermometry::Result<()> {
    let kind = ClosedForm::SpinBoson { epsilon: 1.0, theta: FRAC_PI_4 };
    let c = Continuum::new(1.0, 100.0, 1.0)?;
    let bath = BathModel::continuum(c, 128)?;
    let probe = probe_qubit(1.0, FRAC_PI_4)?;
    for beta in [0.01, 0.1, 1.0] {
        let phi_s = probe_corr_closed(kind, beta)?;
        let u = imaginary_time_rule(64, beta, bath.frequency_scale())?.scaled_unit(beta);
        let xi = xi_via_spectral_kernel(&phi_s, &c, &u, bath.omega_rule().expect("continuum"))?;
        let direct = MetrologyReport::compute(&probe, &bath, beta, 0.0, &ExpansionOptions::default())?.xi;
        println!(
            "β = {beta:5}: ξ kernel {xi:.8e}, ξ direct {direct:.8e}, leading order {:.4e}, printed asymptote {:.4e}",
            high_t_leading_order(kind, &c, beta)?,
            high_t_asymptote(kind, &c, beta)?
        );
    }
    Ok(())
}
