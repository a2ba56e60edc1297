//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use std::cmp::Ordering;

use super::{CMatrix, HermitianOperator};
use crate::{Error, Result, C64};

const MAX_SWEEPS: usize = 100;

/// `A = U diag(λ) U†` with ascending `λ`.
///
/// Within a degenerate cluster the columns of `U` are ordered
/// lexicographically by their entries (real part, then imaginary part), and
/// every column is phased so its largest-modulus entry is real and positive.
/// Both choices make the ordering reproducible across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Unitary matrix whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Spectral norm `max |λ|`.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.from_diagonal(&self.values)
    }

    /// `U diag(d) U†`.
    pub fn from_diagonal(&self, d: &[f64]) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|z| z * d[j]);
        }
        scaled.dot(&super::dagger(&self.vectors))
    }

    /// Matrix elements `⟨e_i|M|e_j⟩`, i.e. `U† M U`.
    pub fn to_basis(&self, m: &CMatrix) -> CMatrix {
        if self.is_identity_basis() {
            return m.clone();
        }
        super::dagger(&self.vectors).dot(m).dot(&self.vectors)
    }

    /// Inverse of [`to_basis`](Self::to_basis): `U M U†`.
    pub fn from_basis(&self, m: &CMatrix) -> CMatrix {
        if self.is_identity_basis() {
            return m.clone();
        }
        self.vectors.dot(m).dot(&super::dagger(&self.vectors))
    }

    fn is_identity_basis(&self) -> bool {
        self.vectors.indexed_iter().all(|((i, j), z)| {
            if i == j {
                *z == C64::new(1.0, 0.0)
            } else {
                *z == C64::new(0.0, 0.0)
            }
        })
    }
}

pub fn eigendecompose(op: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = super::identity(n);

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut converged = total == 0.0 || n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a);
        if off <= f64::EPSILON * 1e-2 * total {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > 1e-12 * total {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dim {n})"
        )));
    }

    let values: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    for mut col in v.columns_mut() {
        let (mut best, mut phase) = (0.0, C64::new(1.0, 0.0));
        for z in col.iter() {
            // strict comparison keeps the first of equal-modulus entries
            if z.norm() > best * (1.0 + 1e-12) {
                best = z.norm();
                phase = z.conj() / z.norm();
            }
        }
        col.mapv_inplace(|z| z * phase);
    }

    let scale = values.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    // runs of near-degenerate eigenvalues are ordered by their vectors
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] - values[order[end - 1]] <= 1e-12 * scale {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| lexicographic(&v, i, j));
        start = end;
    }
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = CMatrix::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.column_mut(dst).assign(&v.column(src));
    }
    Ok(SpectralDecomposition {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

fn lexicographic(v: &CMatrix, i: usize, j: usize) -> Ordering {
    // larger leading components first
    for k in 0..v.nrows() {
        let (a, b) = (v[[k, i]], v[[k, j]]);
        let o = b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let mut s = 0.0;
    for ((i, j), z) in a.indexed_iter() {
        if i != j {
            s += z.norm_sqr();
        }
    }
    s.sqrt()
}

/// One unitary rotation zeroing `a[p][q]`: `A ← G†AG`, `V ← VG`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let z = a[[p, q]];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[[p, q]] = C64::new(0.0, 0.0);
        a[[q, p]] = C64::new(0.0, 0.0);
        return;
    }
    let e = z / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[c, s e], [−s ē, c]] on the (p, q) plane
    let g_qp = -e.conj() * s;
    let g_pq = e * s;

    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[[k, p]], a[[k, q]]);
        a[[k, p]] = akp * c + akq * g_qp;
        a[[k, q]] = akp * g_pq + akq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (a[[p, k]], a[[q, k]]);
        a[[p, k]] = apk * c + aqk * g_qp.conj();
        a[[q, k]] = apk * g_pq.conj() + aqk * c;
    }
    a[[p, q]] = C64::new(0.0, 0.0);
    a[[q, p]] = C64::new(0.0, 0.0);
    a[[p, p]] = C64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = C64::new(a[[q, q]].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
        v[[k, p]] = vkp * c + vkq * g_qp;
        v[[k, q]] = vkp * g_pq + vkq * c;
    }
}
