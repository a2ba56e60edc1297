//! Dense complex Hermitian linear algebra.
//!
//! Operators are small (dimension ≲ 10³) dense `ndarray` matrices. The two
//! validated wrappers are [`HermitianOperator`] and [`DensityOperator`];
//! everything else works on plain [`CMatrix`] values.

mod eigen;
mod thermal;

pub use eigen::{eigendecompose, SpectralDecomposition};
pub use thermal::{
    boltzmann as boltzmann_weights, dephase, gibbs_from_spectrum, gibbs_state, qfi_from_sld, sld_residual, sld_solve, sld_solve_with,
    GibbsState,
};

use ndarray::{Array2, Axis};

use crate::{Error, Result, Tolerances, C64};

pub type CMatrix = Array2<C64>;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Validates shape and Hermiticity (entrywise, absolute tolerance).
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::DEFAULT.hermitian)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        let (r, c) = m.dim();
        if r == 0 || r != c {
            return Err(Error::Validation(format!("operator must be square with dim ≥ 1, got {r}×{c}")));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("operator has non-finite entries".into()));
        }
        let dev = hermiticity_defect(&m);
        if dev > tol {
            return Err(Error::Validation(format!("operator is not Hermitian: max |A − A†| = {dev:.3e}")));
        }
        Ok(Self { m })
    }

    /// Symmetrises `(A + A†)/2` without checking; for results that are
    /// Hermitian by construction up to rounding.
    pub fn symmetrized(m: &CMatrix) -> Self {
        Self {
            m: hermitian_part(m),
        }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation("ragged matrix rows".into()));
            }
            for (j, v) in row.iter().enumerate() {
                m[[i, j]] = C64::new(*v, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros((n, n));
        for (i, v) in values.iter().enumerate() {
            m[[i, i]] = C64::new(*v, 0.0);
        }
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: CMatrix::zeros((dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Largest absolute eigenvalue bound `max_i Σ_j |A_ij|`.
    pub fn norm_bound(&self) -> f64 {
        self.m
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { m: &self.m * C64::new(k, 0.0) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_dim(&self.m, &other.m)?;
        Ok(Self { m: &self.m + &other.m })
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    m: CMatrix,
}

impl DensityOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let h = HermitianOperator::with_tolerance(m, tol.hermitian)?;
        let tr = trace(h.matrix());
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::Validation(format!("density operator trace is {tr}, expected 1")));
        }
        let spec = eigendecompose(&h)?;
        let min = spec.eigenvalues()[0];
        if min < -tol.psd {
            return Err(Error::Validation(format!("density operator has eigenvalue {min:.3e} < 0")));
        }
        Ok(Self { m: h.into_matrix() })
    }

    /// Trusted constructor for states built as Gibbs weights in an eigenbasis.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator { m: self.m.clone() }
    }

    /// Diagonal entries `⟨e_n|ρ|e_n⟩` in the given basis.
    pub fn populations(&self, basis: &SpectralDecomposition) -> Vec<f64> {
        let rb = basis.to_basis(&self.m);
        rb.diag().iter().map(|z| z.re).collect()
    }
}

pub fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Validation(format!("dimension mismatch: {:?} vs {:?}", a.dim(), b.dim())));
    }
    Ok(())
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &dagger(m)) * C64::new(0.5, 0.0)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().iter().sum()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) + b.dot(a)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// `tr_B` of an operator on `S ⊗ B` with the bath index running fastest.
pub fn partial_trace_bath(m: &CMatrix, dim_s: usize, dim_b: usize) -> Result<CMatrix> {
    if m.dim() != (dim_s * dim_b, dim_s * dim_b) {
        return Err(Error::Validation(format!(
            "partial trace: {:?} is not ({dim_s}·{dim_b})²",
            m.dim()
        )));
    }
    let mut out = CMatrix::zeros((dim_s, dim_s));
    for i in 0..dim_s {
        for j in 0..dim_s {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim_b {
                acc += m[[i * dim_b + k, j * dim_b + k]];
            }
            out[[i, j]] = acc;
        }
    }
    Ok(out)
}

/// Trace distance `½‖A − B‖₁` between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    let diff = HermitianOperator::symmetrized(&(a - b));
    let spec = eigendecompose(&diff)?;
    Ok(0.5 * spec.eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}

pub fn real_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    // tr(AB) = Σ_ij A_ij B_ji
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    acc.re
}

pub fn column_sums_abs(m: &CMatrix) -> Vec<f64> {
    m.axis_iter(Axis(1)).map(|c| c.iter().map(|z| z.norm()).sum()).collect()
}

/// Pauli matrices and friends.
pub mod pauli {
    use super::CMatrix;
    use crate::C64;

    pub fn sigma_x() -> CMatrix {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 1]] = C64::new(1.0, 0.0);
        m[[1, 0]] = C64::new(1.0, 0.0);
        m
    }

    pub fn sigma_y() -> CMatrix {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 1]] = C64::new(0.0, -1.0);
        m[[1, 0]] = C64::new(0.0, 1.0);
        m
    }

    /// `diag(+1, −1)`; index 0 is the `σ_z = +1` state.
    pub fn sigma_z() -> CMatrix {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 0]] = C64::new(1.0, 0.0);
        m[[1, 1]] = C64::new(-1.0, 0.0);
        m
    }

    /// Projector onto the `σ_z = +1` state, `diag(1, 0)`.
    pub fn projector_up() -> CMatrix {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 0]] = C64::new(1.0, 0.0);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_hermitian_rejected() {
        let mut m = pauli::sigma_x();
        m[[0, 1]] = C64::new(2.0, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::Validation(_))));
        assert!(HermitianOperator::new(CMatrix::zeros((2, 3))).is_err());
        assert!(HermitianOperator::new(CMatrix::zeros((0, 0))).is_err());
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(identity(2) * C64::new(0.5, 0.0)).is_ok());
        assert!(DensityOperator::new(identity(2)).is_err());
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 0]] = C64::new(1.5, 0.0);
        m[[1, 1]] = C64::new(-0.5, 0.0);
        assert!(DensityOperator::new(m).is_err());
    }

    #[test]
    fn kron_and_partial_trace() {
        let a = pauli::sigma_z() * C64::new(0.25, 0.0) + identity(2) * C64::new(0.5, 0.0);
        let b = identity(3) * C64::new(1.0 / 3.0, 0.0);
        let ab = kron(&a, &b);
        let back = partial_trace_bath(&ab, 2, 3).unwrap();
        assert!(max_abs(&(&back - &a)) < 1e-15);
        assert!(partial_trace_bath(&ab, 3, 3).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let up = pauli::projector_up();
        let down = identity(2) - &up;
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-14);
    }
}
