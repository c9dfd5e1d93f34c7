//! Real special functions for the asymptotic formulas.
//!
//! Gamma (Lanczos), lower incomplete gamma (series / continued fraction
//! split at `x = z + 1`), Riemann zeta for `s > 1` (Euler–Maclaurin corrected
//! partial sums — no reflection is ever needed in this crate) and the tail
//! series `S(d, η) = Σ_{k≥2} k^{-d/η}/(k-1)` that enters the small-range
//! entropy constant. Direct summation of that series is hopeless for small
//! `d/η` (terms decay like `k^{-1-d/η}`), so the tail is resummed through
//! `1/(k-1) = Σ_{j≥1} k^{-j}` into zeta tails, each evaluated by
//! Euler–Maclaurin.

use crate::error::{Error, Result};

/// Tolerances for the series evaluations.
#[derive(Clone, Copy, Debug)]
pub struct SpecFunConfig {
    /// Absolute tail tolerance for series summation.
    pub series_tol: f64,
    /// Budget of directly summed terms before a convergence error.
    pub max_terms: usize,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        SpecFunConfig {
            series_tol: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

impl SpecFunConfig {
    pub fn new(series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(series_tol > 0.0) {
            return Err(Error::domain("series_tol must be > 0"));
        }
        if max_terms < 100 {
            return Err(Error::domain("max_terms must be >= 100"));
        }
        Ok(SpecFunConfig {
            series_tol,
            max_terms,
        })
    }
}

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Gamma function for real `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::domain(format!("gamma requires z > 0, got {z}")));
    }
    if z < 0.5 {
        // reflection keeps the Lanczos argument away from the pole at 0
        let denom = (std::f64::consts::PI * z).sin() * gamma(1.0 - z)?;
        return Ok(std::f64::consts::PI / denom);
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    Ok(SQRT_2PI * t.powf(zm1 + 0.5) * (-t).exp() * lanczos_sum(zm1))
}

/// log Γ(z) for real `z > 0`.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::domain(format!("ln_gamma requires z > 0, got {z}")));
    }
    if z < 0.5 {
        let s = (std::f64::consts::PI * z).sin();
        return Ok(std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - z)?);
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    Ok(SQRT_2PI.ln() + (zm1 + 0.5) * t.ln() - t + lanczos_sum(zm1).ln())
}

/// Lower incomplete gamma `γ(z, x) = ∫_0^x t^{z-1} e^{-t} dt`, unregularized.
///
/// Series for `x < z + 1`, Lentz continued fraction for the upper tail
/// otherwise; the standard split keeps both expansions in their fast regime.
pub fn lower_incomplete_gamma(z: f64, x: f64) -> Result<f64> {
    if !z.is_finite() || !x.is_finite() || z <= 0.0 || x < 0.0 {
        return Err(Error::domain(format!(
            "lower_incomplete_gamma requires z > 0, x >= 0, got z={z}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let lg = ln_gamma(z)?;
    if x < z + 1.0 {
        // γ(z,x) = x^z e^{-x} Σ_{n≥0} x^n / (z (z+1) ... (z+n))
        let mut term = 1.0 / z;
        let mut sum = term;
        let mut n = 1.0;
        while term.abs() > sum.abs() * 1e-17 {
            term *= x / (z + n);
            sum += term;
            n += 1.0;
            if n > 1e6 {
                return Err(Error::Convergence("incomplete gamma series".into()));
            }
        }
        Ok(sum * (z * x.ln() - x).exp())
    } else {
        // continued fraction for Q(z,x) = Γ(z,x)/Γ(z); γ = Γ (1 - Q)
        let tiny = 1e-300;
        let mut b = x + 1.0 - z;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - z);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                let q = (z * x.ln() - x - lg).exp() * h;
                return Ok(lg.exp() * (1.0 - q));
            }
        }
        Err(Error::Convergence("incomplete gamma continued fraction".into()))
    }
}

// Bernoulli numbers B_2, B_4, ..., B_12 divided by (2j)!.
const B2J_OVER_FACT: [f64; 6] = [
    1.0 / 12.0,                 // B2/2!
    -1.0 / 720.0,               // B4/4!
    1.0 / 30_240.0,             // B6/6!
    -1.0 / 1_209_600.0,         // B8/8!
    1.0 / 47_900_160.0,         // B10/10!
    -691.0 / 1_307_674_368_000.0, // B12/12!
];

/// Σ_{k≥a} k^{-s} by Euler–Maclaurin, `s > 1`, `a ≥ 10`.
fn power_tail(s: f64, a: f64) -> f64 {
    let mut sum = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2)
    let mut rising = s;
    let mut apow = a.powf(-s - 1.0);
    let inv_a2 = 1.0 / (a * a);
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        sum += c * rising * apow;
        rising *= (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64);
        apow *= inv_a2;
    }
    sum
}

/// Riemann zeta for real `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !s.is_finite() || s <= 1.0 {
        return Err(Error::domain(format!(
            "riemann_zeta requires s > 1 (divergent otherwise), got {s}"
        )));
    }
    let n = 24u64;
    let mut sum = 0.0;
    for k in 1..=n {
        sum += (k as f64).powf(-s);
    }
    Ok(sum + power_tail(s, (n + 1) as f64))
}

/// Tail series `S = Σ_{k=2}^∞ k^{-d/η} / (k-1)`.
///
/// The theorem constant needs `ζ(d/η + 1) - S`, which is positive; `S` itself
/// converges like `k^{-1-d/η}`, far too slowly for direct summation when
/// `d/η < 1`. After `n0` exact terms the remainder is resummed exactly:
/// `Σ_{k>n0} k^{-q}/(k-1) = Σ_{j≥1} Σ_{k>n0} k^{-q-j}`.
pub fn theorem1_tail_series(d: u32, eta: f64, cfg: &SpecFunConfig) -> Result<f64> {
    if d < 1 {
        return Err(Error::domain("d must be >= 1"));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::domain(format!("eta must be > 0, got {eta}")));
    }
    let q = d as f64 / eta;
    let n0 = 2000u64.min(cfg.max_terms as u64);
    let mut s = 0.0;
    for k in 2..=n0 {
        let kf = k as f64;
        s += kf.powf(-q) / (kf - 1.0);
    }
    let a = (n0 + 1) as f64;
    let mut j = 1u32;
    loop {
        let t = power_tail(q + j as f64, a);
        s += t;
        if t < cfg.series_tol * 1e-3 {
            break;
        }
        j += 1;
        if j > 300 {
            return Err(Error::Convergence(
                "theorem1_tail_series tail resummation".into(),
            ));
        }
    }
    Ok(s)
}
