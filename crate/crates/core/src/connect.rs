//! Connection-function families and the binary entropy function.
//!
//! A connection function maps a scaled distance `r / r0` to an edge
//! probability. The families here cover the usual wireless-network models:
//! Rayleigh fading `exp(-(r/r0)^η)`, the Fermi–Dirac form
//! `(1 + exp(α + r/r0))^{-1}`, the power law `min(1, (r/r0)^{-α})`, the hard
//! disk indicator and the constant (Erdős–Rényi) function.
//!
//! The "entropy graph" connection is the composition `h2 ∘ p`; its integrals
//! are evaluated deep in both tails of `h2`, so [`eval_pq`] returns the pair
//! `(p, 1-p)` with each component computed at full precision in its own scale
//! (e.g. `1 - exp(-x)` via `expm1`), and [`binary_entropy_pq`] consumes the
//! pair without forming the complement by subtraction.
//!
//! [`eval_pq`]: ConnectionFunction::eval_pq

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConnectionFunction {
    /// `p(x) = exp(-x^η)`, path-loss exponent `η > 0`.
    Rayleigh { eta: f64 },
    /// `p(x) = (1 + exp(α + x))^{-1}`.
    FermiDirac { alpha: f64 },
    /// `p(x) = min(1, x^{-α})`, `α > 0`.
    PowerLaw { alpha: f64 },
    /// `p(x) = 1` iff `x < 1`.
    Hard,
    /// `p(x) = q` (Erdős–Rényi).
    Constant { q: f64 },
}

impl ConnectionFunction {
    pub fn rayleigh(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain(format!("rayleigh eta must be > 0, got {eta}")));
        }
        Ok(ConnectionFunction::Rayleigh { eta })
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "power law alpha must be > 0, got {alpha}"
            )));
        }
        Ok(ConnectionFunction::PowerLaw { alpha })
    }

    pub fn constant(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("constant q must be in [0,1], got {q}")));
        }
        Ok(ConnectionFunction::Constant { q })
    }

    /// Edge probability at distance `r` and connection range `r0`.
    pub fn eval(&self, r: f64, r0: f64) -> Result<f64> {
        Ok(self.eval_pq(r, r0)?.0)
    }

    /// `(p, 1-p)` with both components accurate in their own scale.
    pub fn eval_pq(&self, r: f64, r0: f64) -> Result<(f64, f64)> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::domain(format!("r0 must be > 0, got {r0}")));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::domain(format!("r must be >= 0, got {r}")));
        }
        let x = r / r0;
        let pq = match *self {
            ConnectionFunction::Rayleigh { eta } => {
                let t = x.powf(eta);
                ((-t).exp(), -(-t).exp_m1())
            }
            ConnectionFunction::FermiDirac { alpha } => {
                let z = alpha + x;
                // p = 1/(1+e^z), q = 1/(1+e^-z); both forms avoid overflow
                (1.0 / (1.0 + z.exp()), 1.0 / (1.0 + (-z).exp()))
            }
            ConnectionFunction::PowerLaw { alpha } => {
                if x <= 1.0 {
                    (1.0, 0.0)
                } else {
                    let t = -alpha * x.ln();
                    (t.exp(), -t.exp_m1())
                }
            }
            ConnectionFunction::Hard => {
                if x < 1.0 {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            }
            ConnectionFunction::Constant { q } => (q, 1.0 - q),
        };
        Ok(pq)
    }

    /// Distance at which `p = 1/2`, if an interior crossing exists in
    /// `(0, ∞)`. Used as a mandatory quadrature breakpoint: the entropy
    /// integrand peaks exactly there.
    pub fn half_probability_radius(&self, r0: f64) -> Option<f64> {
        match *self {
            ConnectionFunction::Rayleigh { eta } => {
                Some(r0 * std::f64::consts::LN_2.powf(1.0 / eta))
            }
            ConnectionFunction::FermiDirac { alpha } => {
                // p = 1/2 at x = -alpha
                if alpha < 0.0 {
                    Some(-alpha * r0)
                } else {
                    None
                }
            }
            ConnectionFunction::PowerLaw { alpha } => Some(r0 * 2f64.powf(1.0 / alpha)),
            ConnectionFunction::Hard => Some(r0),
            ConnectionFunction::Constant { .. } => None,
        }
    }

    /// Small-argument expansion of the entropy connection `ρ = h2 ∘ p`.
    ///
    /// Only Rayleigh is analytically supported:
    /// `ρ(x) = x^η - η x^η log x + O(x^{2η} log x)`.
    pub fn small_arg_expansion(&self) -> Result<SmallArgExpansion> {
        match *self {
            ConnectionFunction::Rayleigh { eta } => Ok(SmallArgExpansion {
                constant: 0.0,
                power_terms: vec![(eta, 1.0)],
                log_terms: vec![(eta, -eta)],
                alpha_min: eta,
                beta_min: eta,
            }),
            _ => Err(Error::unsupported(
                "small-argument entropy expansion is derived only for the Rayleigh family",
            )),
        }
    }
}

/// Generalized Taylor data for `ρ(x) = ρ(0) + Σ a_α x^α + Σ b_β x^β log x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallArgExpansion {
    pub constant: f64,
    /// `(exponent α, coefficient a_α)`, ascending in α.
    pub power_terms: Vec<(f64, f64)>,
    /// `(exponent β, coefficient b_β)`, ascending in β.
    pub log_terms: Vec<(f64, f64)>,
    pub alpha_min: f64,
    pub beta_min: f64,
}

/// Binary entropy in nats: `h2(p) = -p log p - (1-p) log(1-p)`.
///
/// `h2(0) = h2(1) = 0` exactly. Below `p = 1e-12` (and symmetrically above
/// `1 - 1e-12`) only the dominant `-t log t` term is kept.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("h2 requires p in [0,1], got {p}")));
    }
    Ok(h2_clamped(p, 1.0 - p))
}

/// `h2` from an accurate `(p, q = 1-p)` pair, e.g. from
/// [`ConnectionFunction::eval_pq`]. Avoids forming `1 - p` by subtraction.
pub fn binary_entropy_pq(p: f64, q: f64) -> f64 {
    h2_clamped(p, q)
}

#[inline]
fn h2_clamped(p: f64, q: f64) -> f64 {
    if p <= 0.0 || q <= 0.0 {
        return 0.0;
    }
    if p < 1e-12 {
        return -p * p.ln();
    }
    if q < 1e-12 {
        return -q * q.ln();
    }
    // each log taken on the side known at full precision: log p = log1p(-q)
    // keeps -p log p accurate when p is within rounding of 1
    let log_p = if p <= 0.5 { p.ln() } else { (-q).ln_1p() };
    let log_q = if q <= 0.5 { q.ln() } else { (-p).ln_1p() };
    -p * log_p - q * log_q
}

/// Entropy-graph connection `ρ(r) = h2(p(r / r0))`.
pub fn entropy_connection(conn: &ConnectionFunction, r: f64, r0: f64) -> Result<f64> {
    let (p, q) = conn.eval_pq(r, r0)?;
    Ok(binary_entropy_pq(p, q))
}

/// `(ρ, ρ', ρ'')` of the entropy connection at `r`, by the chain rule:
/// `ρ' = p' log(q/p)` and `ρ'' = p'' log(q/p) - p'^2 / (p q)`.
///
/// Used by the decay feasibility checks behind the Mellin machinery, where
/// finite differences of `h2 ∘ p` are noise-dominated.
pub fn entropy_connection_derivatives(
    conn: &ConnectionFunction,
    r: f64,
    r0: f64,
) -> Result<(f64, f64, f64)> {
    let (p, q) = conn.eval_pq(r, r0)?;
    if p <= 0.0 || q <= 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let x = r / r0;
    // dp/dx and d²p/dx² per family
    let (dp, d2p) = match *conn {
        ConnectionFunction::Rayleigh { eta } => {
            let dp = -eta * x.powf(eta - 1.0) * p;
            let d2p = (eta * eta * x.powf(2.0 * eta - 2.0)
                - eta * (eta - 1.0) * x.powf(eta - 2.0))
                * p;
            (dp, d2p)
        }
        ConnectionFunction::FermiDirac { .. } => (-p * q, p * q * (q - p)),
        ConnectionFunction::PowerLaw { alpha } => {
            if x <= 1.0 {
                (0.0, 0.0)
            } else {
                (-alpha * p / x, alpha * (alpha + 1.0) * p / (x * x))
            }
        }
        ConnectionFunction::Hard | ConnectionFunction::Constant { .. } => (0.0, 0.0),
    };
    let log_ratio = q.ln() - p.ln();
    let rho = binary_entropy_pq(p, q);
    let inv_r0 = 1.0 / r0;
    let rho1 = dp * log_ratio * inv_r0;
    let rho2 = (d2p * log_ratio - dp * dp / (p * q)) * inv_r0 * inv_r0;
    Ok((rho, rho1, rho2))
}

fn parse_param(spec: &str, body: &str, key: &str) -> Result<f64> {
    let (k, v) = body
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected {key}=<value> in '{spec}'")))?;
    if k != key {
        return Err(Error::Parse(format!(
            "expected parameter '{key}' in '{spec}', got '{k}'"
        )));
    }
    v.parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number '{v}' in '{spec}': {e}")))
}

impl FromStr for ConnectionFunction {
    type Err = Error;

    /// Compact grammar: `rayleigh:eta=2`, `fermi:alpha=0.0`,
    /// `powerlaw:alpha=3`, `hard`, `const:q=0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, body) = match s.split_once(':') {
            Some((h, b)) => (h, Some(b)),
            None => (s, None),
        };
        match (head, body) {
            ("hard", None) => Ok(ConnectionFunction::Hard),
            ("rayleigh", Some(b)) => ConnectionFunction::rayleigh(parse_param(s, b, "eta")?),
            ("fermi", Some(b)) => Ok(ConnectionFunction::FermiDirac {
                alpha: parse_param(s, b, "alpha")?,
            }),
            ("powerlaw", Some(b)) => ConnectionFunction::power_law(parse_param(s, b, "alpha")?),
            ("const", Some(b)) => ConnectionFunction::constant(parse_param(s, b, "q")?),
            _ => Err(Error::Parse(format!(
                "unknown connection spec '{s}' (expected rayleigh:eta=..., fermi:alpha=..., powerlaw:alpha=..., hard, const:q=...)"
            ))),
        }
    }
}

impl fmt::Display for ConnectionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConnectionFunction::Rayleigh { eta } => write!(f, "rayleigh:eta={eta}"),
            ConnectionFunction::FermiDirac { alpha } => write!(f, "fermi:alpha={alpha}"),
            ConnectionFunction::PowerLaw { alpha } => write!(f, "powerlaw:alpha={alpha}"),
            ConnectionFunction::Hard => write!(f, "hard"),
            ConnectionFunction::Constant { q } => write!(f, "const:q={q}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_definitions() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let e = ray.eval(0.3, 0.3).unwrap();
        assert!((e - (-1.0f64).exp()).abs() < 1e-15);

        let pl = ConnectionFunction::power_law(3.0).unwrap();
        assert_eq!(pl.eval(0.5, 1.0).unwrap(), 1.0);
        assert!((pl.eval(2.0, 1.0).unwrap() - 0.125).abs() < 1e-15);

        assert_eq!(ConnectionFunction::Hard.eval(0.5, 1.0).unwrap(), 1.0);
        assert_eq!(ConnectionFunction::Hard.eval(1.0, 1.0).unwrap(), 0.0);

        let c = ConnectionFunction::constant(0.25).unwrap();
        assert_eq!(c.eval(123.0, 1.0).unwrap(), 0.25);

        let fd = ConnectionFunction::FermiDirac { alpha: 0.0 };
        assert!((fd.eval(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_bad_r0() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        assert!(ray.eval(1.0, 0.0).is_err());
        assert!(ray.eval(1.0, -1.0).is_err());
        assert!(ray.eval(-1.0, 1.0).is_err());
    }

    #[test]
    fn pq_pair_is_consistent_and_precise() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        // r << r0: p ≈ 1, q ≈ (r/r0)^2 must keep full relative precision
        let (p, q) = ray.eval_pq(1e-6, 1.0).unwrap();
        assert!((q - 1e-12).abs() < 1e-24, "q = {q}");
        assert!(p <= 1.0 && p + q > 0.999_999);
        // r >> r0
        let (p2, q2) = ray.eval_pq(10.0, 1.0).unwrap();
        assert!(p2 < 1e-40 && (q2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_large_eta_approaches_hard() {
        let ray = ConnectionFunction::rayleigh(200.0).unwrap();
        let inside = ray.eval(0.5, 1.0).unwrap();
        let outside = ray.eval(2.0, 1.0).unwrap();
        assert!((inside - 1.0).abs() < 1e-3);
        assert!(outside < 1e-3);
    }

    #[test]
    fn h2_degenerate_and_max() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn h2_symmetric_on_grid() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            assert!((a - b).abs() < 1e-14, "asymmetry at p = {p}");
        }
    }

    #[test]
    fn h2_sandwich_bound_on_grid() {
        // (4 log 2) x(1-x) <= h2(x) <= (e log 2) (x(1-x))^{1/log 4}
        let ln2 = std::f64::consts::LN_2;
        let lower_c = 4.0 * ln2;
        let upper_c = std::f64::consts::E * ln2;
        let inv_log4 = 1.0 / (4.0f64).ln();
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let h = binary_entropy(x).unwrap();
            let prod = x * (1.0 - x);
            assert!(h >= lower_c * prod - 1e-14, "lower bound fails at x = {x}");
            assert!(
                h <= upper_c * prod.powf(inv_log4) + 1e-14,
                "upper bound fails at x = {x}"
            );
        }
    }

    #[test]
    fn entropy_connection_special_cases() {
        let r0 = 0.7;
        assert_eq!(
            entropy_connection(&ConnectionFunction::Hard, 0.3, r0).unwrap(),
            0.0
        );
        assert_eq!(
            entropy_connection(&ConnectionFunction::Hard, 5.0, r0).unwrap(),
            0.0
        );
        let c = ConnectionFunction::constant(0.3).unwrap();
        let expect = binary_entropy(0.3).unwrap();
        for &r in &[0.0, 0.4, 10.0] {
            assert!((entropy_connection(&c, r, r0).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn entropy_connection_peaks_at_half_probability() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let r0 = 0.3;
        let r_star = ray.half_probability_radius(r0).unwrap();
        assert!((r_star - r0 * std::f64::consts::LN_2.sqrt()).abs() < 1e-15);
        // fine grid argmax within one step of r_star
        let n = 20_000;
        let hi = 4.0 * r0;
        let mut best = (0.0, -1.0);
        for i in 0..n {
            let r = hi * i as f64 / n as f64;
            let v = entropy_connection(&ray, r, r0).unwrap();
            if v > best.1 {
                best = (r, v);
            }
        }
        assert!((best.0 - r_star).abs() <= hi / n as f64 + 1e-12);
    }

    #[test]
    fn small_arg_expansion_rayleigh_only() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let e = ray.small_arg_expansion().unwrap();
        assert_eq!(e.constant, 0.0);
        assert_eq!(e.power_terms, vec![(2.0, 1.0)]);
        assert_eq!(e.log_terms, vec![(2.0, -2.0)]);
        assert_eq!(e.alpha_min, 2.0);

        let e4 = ConnectionFunction::rayleigh(4.0)
            .unwrap()
            .small_arg_expansion()
            .unwrap();
        assert_eq!(e4.power_terms, vec![(4.0, 1.0)]);
        assert_eq!(e4.log_terms, vec![(4.0, -4.0)]);

        assert!(ConnectionFunction::Hard.small_arg_expansion().is_err());
        assert!(ConnectionFunction::FermiDirac { alpha: 0.0 }
            .small_arg_expansion()
            .is_err());
    }

    #[test]
    fn small_arg_expansion_residual_is_second_order() {
        // |ρ(x) - (x^η - η x^η log x)| = O(x^{2η} |log x|); the exact next
        // term is x^{2η} ((η/2) log x - 1/2), so the ratio tends to η/2.
        // For η = 4 the window starts just above 1e-3: at and below that,
        // 1-p = x^4 sits under the h2 tail clamp.
        for &(eta, x_lo) in &[(2.0f64, 1e-4f64), (4.0, 1.1e-3)] {
            let ray = ConnectionFunction::rayleigh(eta).unwrap();
            let mut max_ratio: f64 = 0.0;
            for i in 0..200 {
                let x = x_lo * (1e-2 / x_lo).powf(i as f64 / 199.0);
                let rho = entropy_connection(&ray, x, 1.0).unwrap();
                let lead = x.powf(eta) - eta * x.powf(eta) * x.ln();
                let denom = x.powf(2.0 * eta) * x.ln().abs();
                max_ratio = max_ratio.max((rho - lead).abs() / denom);
            }
            assert!(
                max_ratio < eta / 2.0 + 1.0,
                "eta = {eta}: residual ratio {max_ratio}"
            );
        }
    }

    #[test]
    fn parse_round_trips() {
        for s in ["rayleigh:eta=2", "fermi:alpha=0", "powerlaw:alpha=3", "hard", "const:q=0.1"] {
            let c: ConnectionFunction = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!("rayleigh".parse::<ConnectionFunction>().is_err());
        assert!("rayleigh:eta=-1".parse::<ConnectionFunction>().is_err());
        assert!("banana:q=1".parse::<ConnectionFunction>().is_err());
        assert!("const:p=0.1".parse::<ConnectionFunction>().is_err());
    }
}
