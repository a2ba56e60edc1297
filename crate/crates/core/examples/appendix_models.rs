//! Two-qubit models with ⟨B⟩ ≠ 0, where the state picks up a first-order
//! correction. Exact extraction against the closed forms.

use thermometry::oracle::{appendix_a1, appendix_a2, AppendixA1, AppendixA2};

fn main() -> thermometry::Result<()> {
    let a1 = appendix_a1()?;
    let a2 = appendix_a2()?;
    for beta in [0.5, 1.0, 2.0] {
        let e = a1.extract(beta, 1e-3)?;
        println!(
            "σ_z·σ_z  β = {beta}: p1 {:.6} ({:.6}), p2 {:.6} ({:.6}), l1 {:.6} ({:.6})",
            e.p1,
            AppendixA1::p1(beta),
            e.p2,
            AppendixA1::p2(beta),
            e.l1,
            AppendixA1::l1(beta)
        );
        let e = a2.extract(beta, 1e-3)?;
        println!(
            "σ_x·proj β = {beta}: p1 {:.6} ({:.6}), l1 {:.6} ({:.6}), (F−I)/γ² {:.6} ({:.6})",
            e.p1,
            AppendixA2::p1(beta),
            e.l1,
            AppendixA2::l1(beta),
            e.fisher,
            AppendixA2::fi_gap(beta)
        );
    }
    Ok(())
}
