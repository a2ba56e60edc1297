//! QFI and energy-measurement CFI to second order, with the signal-to-noise
//! split `β²𝓕 = C_S + γ²ξ`.

use std::f64::consts::FRAC_PI_4;

use thermometry::metrology::MetrologyReport;
use thermometry::models::{probe_qubit, BathModel, Continuum};
use thermometry::perturbation::ExpansionOptions;

fn main() -> thermometry::Result<()> {
    let probe = probe_qubit(1.0, FRAC_PI_4)?;
    let bath = BathModel::continuum(Continuum::new(1.0, 100.0, 1.0)?, 128)?;
    let gamma = 0.1;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}", "β", "F0", "F2", "I2", "C_S", "ξ");
    for beta in [0.2, 0.5, 1.0, 2.0, 4.0] {
        let r = MetrologyReport::compute(&probe, &bath, beta, gamma, &ExpansionOptions::default())?;
        println!(
            "{beta:6.2} {:12.6e} {:12.6e} {:12.6e} {:12.6e} {:12.6e}",
            r.f0, r.f2, r.i2, r.heat_capacity, r.xi
        );
    }
    Ok(())
}
