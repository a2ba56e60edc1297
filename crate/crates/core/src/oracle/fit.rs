use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Fitted,
    /// Fewer than two deviations above the noise floor.
    IndistinguishableFromZero,
}

/// Least-squares line through `(ln γ, ln deviation)`.
#[derive(Debug, Clone)]
pub struct OrderFit {
    pub gammas: Vec<f64>,
    pub deviations: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points that survived the noise-floor cut.
    pub used: usize,
    pub status: FitStatus,
}

impl OrderFit {
    /// Slope within `[lo, hi]` (false when indistinguishable from zero).
    pub fn slope_in(&self, lo: f64, hi: f64) -> bool {
        self.status == FitStatus::Fitted && self.slope >= lo && self.slope <= hi
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn order_fit(gammas: &[f64], deviations: &[f64]) -> Result<OrderFit> {
    order_fit_with(gammas, deviations, Tolerances::DEFAULT.noise_floor)
}

pub fn order_fit_with(gammas: &[f64], deviations: &[f64], noise_floor: f64) -> Result<OrderFit> {
    if gammas.len() != deviations.len() {
        return Err(Error::Validation("γ grid and deviations differ in length".into()));
    }
    if gammas.len() < 5 {
        return Err(Error::Validation(format!("order fit needs ≥ 5 points, got {}", gammas.len())));
    }
    if gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Validation("order fit needs positive γ".into()));
    }
    let pts: Vec<(f64, f64)> = gammas
        .iter()
        .zip(deviations)
        .filter(|(_, d)| d.abs() >= noise_floor)
        .map(|(g, d)| (g.ln(), d.abs().ln()))
        .collect();
    let mut fit = OrderFit {
        gammas: gammas.to_vec(),
        deviations: deviations.iter().map(|d| d.abs()).collect(),
        slope: f64::NAN,
        intercept: f64::NAN,
        r_squared: 0.0,
        used: pts.len(),
        status: FitStatus::IndistinguishableFromZero,
    };
    if pts.len() < 2 {
        return Ok(fit);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    fit.status = FitStatus::Fitted;
    Ok(fit)
}
