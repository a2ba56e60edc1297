//! Second-order mean-force correction `X_S` for a qubit in an Ohmic bath and
//! the resulting state, compared with the bare Gibbs populations.

use thermometry::models::{probe_qubit, BathModel, Continuum};
use thermometry::perturbation::{mfg_second_order, ExpansionOptions, MeanForceExpansion};

fn main() -> thermometry::Result<()> {
    let probe = probe_qubit(1.0, 0.3)?;
    let bath = BathModel::continuum(Continuum::new(1.0, 10.0, 1.0)?, 128)?;
    let gamma = 0.05;
    for beta in [0.5, 1.0, 2.0] {
        let x = MeanForceExpansion::compute(&probe, &bath, beta, gamma, &ExpansionOptions::default())?;
        let rho = mfg_second_order(&x)?;
        println!(
            "β = {beta}: X_00 = {:.6}, X_01 = {:.6}, bare p = {:.6?}, dressed p = {:.6?}, tr(π X) = {:.1e}",
            x.x()[[0, 0]].re,
            x.x()[[0, 1]],
            x.populations(),
            x.populations_second_order(),
            x.weighted_trace()
        );
        println!("  state: {:.6}", rho.matrix());
    }
    Ok(())
}
