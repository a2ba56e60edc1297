//! Bosonic bath correlator as a Hurwitz-zeta series, independent of any
//! frequency quadrature.

use crate::models::Continuum;
use crate::special::gamma;
use crate::{Error, Result};

// B_2j / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// `ζ(s, q) = Σ_{k≥0} (q + k)^{−s}` for `s > 1`, `q > 0`, by Euler–Maclaurin.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return Err(Error::Domain(format!("hurwitz_zeta needs s > 1, q > 0 (s={s}, q={q})")));
    }
    const N: usize = 24;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)…(s+2j−2) times a^{−s−2j+1}
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * rising * power;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        power /= a * a;
    }
    Ok(sum)
}

/// `Φ_B(−iu)` and `∂_βΦ_B` of an Ohmic-family continuum from
/// `Σ_n ∫J e^{−(u+nβ)ω} + …`:
///
/// `Φ_B = K β^{−p}[ζ(p, (1/Ω + u)/β) + ζ(p, (1/Ω + β − u)/β)]`,
/// `K = AΩ^{a−s}Γ(s+1)/π`, `p = s + 1`.
pub fn bath_corr_series(c: &Continuum, beta: f64, u: f64) -> Result<(f64, f64)> {
    c.validate()?;
    if !(beta > 0.0) || !(0.0..=beta).contains(&u) {
        return Err(Error::Domain(format!("need β > 0 and 0 ≤ u ≤ β (β={beta}, u={u})")));
    }
    let p = c.s + 1.0;
    let k = c.amplitude * c.omega_c.powf(c.a - c.s) * gamma(p)? / std::f64::consts::PI;
    // S_p(x) = Σ_m (x + mβ)^{−p},  T_p(x) = Σ_m m (x + mβ)^{−p}
    let s_p = |q: f64, x: f64| -> Result<f64> { Ok(beta.powf(-q) * hurwitz_zeta(q, x / beta)?) };
    let t_p = |q: f64, x: f64| -> Result<f64> { Ok((s_p(q - 1.0, x)? - x * s_p(q, x)?) / beta) };
    let x1 = 1.0 / c.omega_c + u;
    let x2 = 1.0 / c.omega_c + beta - u;
    let value = k * (s_p(p, x1)? + s_p(p, x2)?);
    let d = -k * p * (t_p(p + 1.0, x1)? + t_p(p + 1.0, x2)? + s_p(p + 1.0, x2)?);
    Ok((value, d))
}
