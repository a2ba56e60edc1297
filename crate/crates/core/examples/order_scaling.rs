//! Log-log order fit of the QFI−CFI gap against γ for a case where it is
//! fourth order and one where it is second order.

use std::f64::consts::FRAC_PI_4;

use thermometry::models::{bath_qubit, probe_qubit, BathQubitCoupling};
use thermometry::oracle::{appendix_a2, exact_fishers, log_grid, order_fit, JointModel};

fn gap_fit(j: &JointModel, gammas: &[f64]) -> thermometry::Result<f64> {
    let mut d = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let e = exact_fishers(&j.with_gamma(g)?, 1.0, None)?;
        d.push(e.qfi - e.cfi);
    }
    Ok(order_fit(gammas, &d)?.slope)
}

fn main() -> thermometry::Result<()> {
    let gammas = log_grid(1e-2, 1e-1, 8);
    let sb = JointModel::new(probe_qubit(1.0, FRAC_PI_4)?, bath_qubit(0.8, BathQubitCoupling::SigmaX)?, 0.0)?;
    println!("⟨B⟩ = 0: QFI − CFI ∝ γ^{:.3}", gap_fit(&sb, &gammas)?);
    println!("⟨B⟩ ≠ 0: QFI − CFI ∝ γ^{:.3}", gap_fit(&appendix_a2()?.joint, &gammas)?);
    Ok(())
}
