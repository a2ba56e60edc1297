//! Gaussian quadrature rules.
//!
//! A [`QuadratureRule`] approximates `∫ f(x) dx ≈ Σ wᵢ f(xᵢ)` over its domain.
//! Besides the plain Gauss–Legendre and scaled Gauss–Laguerre rules there are
//! two composite builders used by the correlation integrals:
//!
//! * [`QuadratureRule::graded_interval`] grades Gauss–Legendre panels
//!   geometrically toward both ends of an interval, which resolves the sharp
//!   boundary layers of width `1/Ω` that a bosonic bath correlator develops
//!   at `u = 0` and `u = β`;
//! * [`QuadratureRule::graded_semi_infinite`] covers `[0, ∞)` with panels
//!   that are geometric from far below the scale up to `80 × scale`.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    SemiInfinite { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
}

/// Geometric ratio between consecutive graded panels.
const GRADING_RATIO: f64 = 4.0;
/// Semi-infinite composite rules stop at this multiple of the scale.
const TAIL_MULTIPLE: f64 = 80.0;
/// Semi-infinite composite rules start grading at this fraction of the scale.
const HEAD_FRACTION: f64 = 1e-10;

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule on `[a, b]`; exact to degree `2n − 1`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 || !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "gauss_legendre needs n ≥ 2 and finite a < b (n={n}, a={a}, b={b})"
            )));
        }
        let (x, w) = legendre_reference(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Ok(Self {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| half * v).collect(),
            domain: Domain::Finite { a, b },
        })
    }

    /// `n`-point Gauss–Laguerre rule for `∫₀^∞ f(ω) dω`, exact when `f` is a
    /// polynomial of degree ≤ `2n − 1` times `e^{−ω/scale}`.
    ///
    /// The exponential weight is folded into the returned weights, so the rule
    /// is applied to the full integrand.
    pub fn gauss_laguerre(n: usize, scale: f64) -> Result<Self> {
        if n < 2 || !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!(
                "gauss_laguerre needs n ≥ 2 and scale > 0 (n={n}, scale={scale})"
            )));
        }
        let (x, log_w) = laguerre_reference(n)?;
        Ok(Self {
            nodes: x.iter().map(|t| scale * t).collect(),
            weights: x
                .iter()
                .zip(&log_w)
                .map(|(t, lw)| scale * (lw + t).exp())
                .collect(),
            domain: Domain::SemiInfinite { scale },
        })
    }

    /// Composite Gauss–Legendre on `[a, b]`, graded geometrically toward both
    /// endpoints down to panels of width `0.001 × layer`.
    ///
    /// With `layer ≥ (b − a)/8` this is two plain panels.
    pub fn graded_interval(n: usize, a: f64, b: f64, layer: f64) -> Result<Self> {
        if !(layer > 0.0) {
            return Err(Error::Domain(format!("layer width must be positive, got {layer}")));
        }
        let half = 0.5 * (b - a);
        let mut dist = vec![half];
        if layer < half / 4.0 {
            let floor = 1e-3 * layer;
            let mut d = half;
            while d > floor {
                d /= GRADING_RATIO;
                dist.push(d);
            }
        }
        let mut breaks = vec![a];
        for d in dist.iter().rev() {
            breaks.push(a + d);
        }
        for d in dist.iter().skip(1) {
            breaks.push(b - d);
        }
        breaks.push(b);
        let mut rule = Self::composite(n, &breaks)?;
        rule.domain = Domain::Finite { a, b };
        Ok(rule)
    }

    /// Composite Gauss–Legendre covering `[0, 80 × scale]` with panels graded
    /// geometrically from `1e-10 × scale`; the tail beyond is dropped.
    ///
    /// Intended for integrands carrying an `e^{−ω/scale}` cutoff but with
    /// structure on scales much shorter than `scale`.
    pub fn graded_semi_infinite(n: usize, scale: f64) -> Result<Self> {
        Self::graded_semi_infinite_to(n, scale, HEAD_FRACTION)
    }

    /// As [`graded_semi_infinite`](Self::graded_semi_infinite) with the
    /// innermost break at `head · scale`, for integrable endpoint
    /// singularities at ω = 0.
    pub fn graded_semi_infinite_to(n: usize, scale: f64, head: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        if !(head > 0.0 && head < 1.0) {
            return Err(Error::Domain(format!("head fraction must lie in (0, 1), got {head}")));
        }
        let top = TAIL_MULTIPLE * scale;
        let mut breaks = vec![top];
        while breaks.last().copied().unwrap_or(0.0) > head * scale {
            let next = breaks.last().copied().unwrap_or(0.0) / GRADING_RATIO;
            breaks.push(next);
        }
        breaks.push(0.0);
        breaks.reverse();
        let mut rule = Self::composite(n, &breaks)?;
        rule.domain = Domain::SemiInfinite { scale };
        Ok(rule)
    }

    fn composite(n: usize, breaks: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("panel order must be ≥ 2, got {n}")));
        }
        let (x, w) = legendre_reference(n);
        let mut nodes = Vec::with_capacity(n * breaks.len());
        let mut weights = Vec::with_capacity(n * breaks.len());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(a < b) {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            nodes.extend(x.iter().map(|t| mid + half * t));
            weights.extend(w.iter().map(|v| half * v));
        }
        let a = breaks.first().copied().unwrap_or(0.0);
        let b = breaks.last().copied().unwrap_or(0.0);
        Ok(Self {
            nodes,
            weights,
            domain: Domain::Finite { a, b },
        })
    }

    /// Rescale a rule on `[0, 1]` to `[0, length]`.
    pub fn scaled_unit(&self, length: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|x| x * length).collect(),
            weights: self.weights.iter().map(|w| w * length).collect(),
            domain: Domain::Finite { a: 0.0, b: length },
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on the
/// three-term recurrence.
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Laguerre (α = 0) nodes and log-weights.
fn laguerre_reference(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut log_w = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut converged = false;
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            // last-ulp cycling is common for large n, so accept a few ulps
            if (z - z1).abs() <= 4.0 * f64::EPSILON * z.abs() {
                converged = true;
                break;
            }
            converged = (z - z1).abs() <= 1e-12 * z.abs();
        }
        if !converged || !z.is_finite() {
            return Err(Error::Numerical(format!("Gauss–Laguerre root {i} of {n} did not converge")));
        }
        x[i] = z;
        log_w[i] = -(pp * nf * p2).abs().ln();
    }
    Ok((x, log_w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_cubic_on_unit_interval() {
        let r = QuadratureRule::gauss_legendre(8, 0.0, 1.0).unwrap();
        assert!((r.integrate(|x| x * x * x) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn legendre_linear_on_beta_interval() {
        let beta = 2.0;
        let r = QuadratureRule::gauss_legendre(16, 0.0, beta).unwrap();
        assert!((r.integrate(|u| beta - u) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_exact_to_degree_2n_minus_1() {
        for n in [2usize, 5, 12, 33] {
            let r = QuadratureRule::gauss_legendre(n, -0.5, 1.5).unwrap();
            for deg in 0..(2 * n) as i32 {
                let exact = (1.5f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
                let got = r.integrate(|x| x.powi(deg));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} deg={deg}: {got} vs {exact}"
                );
            }
            assert!(r.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn laguerre_gamma_moment() {
        // ∫ ω e^{−ω/Ω} dω = Γ(2) Ω²
        let r = QuadratureRule::gauss_laguerre(32, 100.0).unwrap();
        let got = r.integrate(|w| w * (-w / 100.0).exp());
        assert!((got - 1e4).abs() / 1e4 < 1e-9, "{got}");
    }

    #[test]
    fn laguerre_exact_to_degree_2n_minus_1() {
        let n = 10;
        let r = QuadratureRule::gauss_laguerre(n, 1.0).unwrap();
        let mut fact = 1.0;
        for deg in 0..(2 * n) as i32 {
            if deg > 0 {
                fact *= deg as f64;
            }
            let got = r.integrate(|x| x.powi(deg) * (-x).exp());
            assert!((got - fact).abs() / fact < 1e-12, "deg={deg}: {got} vs {fact}");
        }
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn laguerre_large_order_weights_finite() {
        let r = QuadratureRule::gauss_laguerre(128, 1.0).unwrap();
        assert!(r.weights().iter().all(|w| w.is_finite() && *w > 0.0));
        let got = r.integrate(|x| x * x * (-x).exp());
        assert!((got - 2.0).abs() < 1e-10, "{got}");
    }

    #[test]
    fn graded_interval_resolves_boundary_layer() {
        // ∫₀¹ e^{−u/ε} du with ε = 1e-3
        let eps = 1e-3;
        let r = QuadratureRule::graded_interval(16, 0.0, 1.0, eps).unwrap();
        let exact = eps * (1.0 - (-1.0 / eps).exp());
        let got = r.integrate(|u| (-u / eps).exp());
        assert!((got - exact).abs() / exact < 1e-13, "{got} vs {exact}");
        let plain = QuadratureRule::gauss_legendre(64, 0.0, 1.0).unwrap();
        assert!((plain.integrate(|u| (-u / eps).exp()) - exact).abs() / exact > 1e-10);
    }

    #[test]
    fn graded_interval_wide_layer_is_two_panels() {
        let r = QuadratureRule::graded_interval(8, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(r.len(), 16);
    }

    #[test]
    fn graded_semi_infinite_gamma_moments() {
        let scale = 100.0;
        let r = QuadratureRule::graded_semi_infinite(16, scale).unwrap();
        for (k, fact) in [(0, 1.0), (1, 1.0), (3, 6.0)] {
            let exact = fact * scale.powi(k + 1);
            let got = r.integrate(|w| w.powi(k) * (-w / scale).exp());
            assert!((got - exact).abs() / exact < 1e-13, "k={k}: {got} vs {exact}");
        }
        // two scales at once: ∫ e^{−ω} e^{−ω/Ω} = Ω/(1+Ω)
        let got = r.integrate(|w| (-w - w / scale).exp());
        assert!((got - scale / (1.0 + scale)).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(QuadratureRule::gauss_legendre(1, 0.0, 1.0).is_err());
        assert!(QuadratureRule::gauss_legendre(4, 1.0, 1.0).is_err());
        assert!(QuadratureRule::gauss_laguerre(4, 0.0).is_err());
        assert!(QuadratureRule::gauss_laguerre(1, 1.0).is_err());
        assert!(QuadratureRule::graded_semi_infinite(4, -1.0).is_err());
    }
}
