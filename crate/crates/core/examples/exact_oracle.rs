//! Brute-force reference: diagonalise probe + bath-qubit, trace out the bath
//! and compare the Fisher informations with the perturbative ones.

use std::f64::consts::FRAC_PI_4;

use thermometry::metrology::{cfi_energy_perturbative, qfi_perturbative_sum};
use thermometry::models::{bath_qubit, probe_qubit, BathModel, BathQubitCoupling};
use thermometry::oracle::{exact_fishers, JointModel};
use thermometry::perturbation::{ExpansionOptions, MeanForceExpansion};

fn main() -> thermometry::Result<()> {
    let probe = probe_qubit(1.0, FRAC_PI_4)?;
    let sample = bath_qubit(0.8, BathQubitCoupling::SigmaX)?;
    let bath = BathModel::discrete(sample.clone());
    let beta = 1.0;
    let x0 = MeanForceExpansion::compute(&probe, &bath, beta, 0.0, &ExpansionOptions::default())?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "γ", "QFI exact", "QFI pert", "CFI exact", "CFI pert");
    for gamma in [0.01, 0.05, 0.1, 0.2] {
        let j = JointModel::new(probe.clone(), sample.clone(), gamma)?;
        let e = exact_fishers(&j, beta, None)?;
        let x = x0.with_gamma(gamma);
        println!(
            "{gamma:6.2} {:14.10} {:14.10} {:14.10} {:14.10}",
            e.qfi,
            qfi_perturbative_sum(&x).total(gamma),
            e.cfi,
            cfi_energy_perturbative(&x).total(gamma)
        );
    }
    Ok(())
}
