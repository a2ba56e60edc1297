//! Gibbs state of a qubit, its β-derivative and the SLD; the QFI of a bare
//! Gibbs state equals the energy variance.

use thermometry::linalg::{gibbs_state, pauli, qfi_from_sld, sld_solve, HermitianOperator};

fn main() -> thermometry::Result<()> {
    let h = HermitianOperator::new(pauli::sigma_z() * thermometry::C64::new(0.5, 0.0))?;
    for beta in [0.5, 1.0, 2.0] {
        let g = gibbs_state(&h, beta)?;
        let mean: f64 = g.spectrum.eigenvalues().iter().zip(&g.populations).map(|(e, p)| e * p).sum();
        let var: f64 = g.spectrum.eigenvalues().iter().zip(&g.populations).map(|(e, p)| p * (e - mean).powi(2)).sum();
        // ∂_β ρ = −ρ(H − ⟨H⟩)
        let dp: Vec<f64> = g.spectrum.eigenvalues().iter().zip(&g.populations).map(|(e, p)| -p * (e - mean)).collect();
        let drho = HermitianOperator::new(g.spectrum.from_diagonal(&dp))?;
        let l = sld_solve(&g.state, &drho)?;
        let qfi = qfi_from_sld(&g.state, &l)?;
        println!("β = {beta:4.1}  ln Z = {:.6}  QFI = {qfi:.10}  Var(H) = {var:.10}", g.log_z);
    }
    Ok(())
}
