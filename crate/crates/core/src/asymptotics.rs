//! Closed-form limit formulas for the conditional entropy-per-edge.
//!
//! Small connection range (leading order and the `a_d` correction), large
//! connection range via domain moments, and the integrability classifier
//! that separates `Θ(r0^d)` growth from the super-polynomial power-law
//! regime.

use crate::connect::{binary_entropy_pq, ConnectionFunction};
use crate::entropy::EstimationMethod;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::mc;
use crate::quad;
use crate::specfun::{self, SpecFunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    SmallR0Leading,
    SmallR0SecondOrder,
    LargeR0,
}

#[derive(Clone, Copy, Debug)]
pub struct AsymptoteResult {
    pub value: f64,
    pub regime: Regime,
    /// Heuristic validity bound on `r0` (upper for small-range formulas,
    /// lower for the large-range expansion).
    pub validity_hint: f64,
}

/// Surface area of the unit `d`-sphere boundary (`2, 2π, 4π`).
pub fn sphere_surface(d: u32) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    }
}

fn small_r0_coefficient(d: u32, eta: f64, s_leading: f64) -> Result<f64> {
    let cfg = SpecFunConfig::default();
    let q = d as f64 / eta;
    let tail = specfun::theorem1_tail_series(d, eta, &cfg)?;
    let zeta = specfun::riemann_zeta(q + 1.0)?;
    Ok(s_leading / eta * specfun::gamma(q)? * (q + zeta - tail))
}

/// Leading small-range asymptote
/// `(s_{d-1} r0^d / η) Γ(d/η) (d/η + ζ(d/η+1) - Σ_{k≥2} k^{-d/η}/(k-1))`,
/// with `s_{d-1}` the unit-ball surface area (2, 2π, 4π).
pub fn small_r0_leading(d: u32, eta: f64, r0: f64) -> Result<AsymptoteResult> {
    if !(1..=3).contains(&d) {
        return Err(Error::domain(format!("d must be in {{1,2,3}}, got {d}")));
    }
    if !(eta > 0.0 && r0 > 0.0) {
        return Err(Error::domain("eta and r0 must be > 0"));
    }
    let c = small_r0_coefficient(d, eta, sphere_surface(d))?;
    Ok(AsymptoteResult {
        value: c * r0.powi(d as i32),
        regime: Regime::SmallR0Leading,
        validity_hint: 0.2,
    })
}

/// Leading term plus the `a_d r0^{d+1}` correction from the next density
/// coefficient; available for domains with closed-form `a_d` (interval,
/// square).
pub fn small_r0_second_order(domain: &Domain, eta: f64, r0: f64) -> Result<AsymptoteResult> {
    let coeffs = domain.small_r_coeffs();
    if !coeffs.valid {
        return Err(Error::unsupported(format!(
            "{domain} has no closed-form a_d coefficient"
        )));
    }
    let d = domain.dim();
    let leading = small_r0_leading(d, eta, r0)?.value;
    let cfg = SpecFunConfig::default();
    let q = (d + 1) as f64 / eta;
    let tail = specfun::theorem1_tail_series(d + 1, eta, &cfg)?;
    let zeta = specfun::riemann_zeta(q + 1.0)?;
    let correction = coeffs.a_d * r0.powi(d as i32 + 1) / eta
        * specfun::gamma(q)?
        * (q + zeta - tail);
    Ok(AsymptoteResult {
        value: leading + correction,
        regime: Regime::SmallR0SecondOrder,
        validity_hint: 0.2 * domain.diameter(),
    })
}

/// Moments `E[R^η]` and `E[R^η log R]` of the pair distance.
#[derive(Clone, Copy, Debug)]
pub struct DomainMoments {
    pub e_r_eta: f64,
    pub e_r_eta_log: f64,
    pub eta: f64,
    pub method: MomentMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMethod {
    Quadrature,
    MonteCarlo,
}

pub fn domain_moments(
    domain: &Domain,
    eta: f64,
    est: &EstimationMethod,
) -> Result<DomainMoments> {
    if !(eta > 0.0) {
        return Err(Error::domain("eta must be > 0"));
    }
    match *est {
        EstimationMethod::Quadrature { tol } => {
            if !domain.has_closed_form_density() {
                return Err(Error::unsupported(format!(
                    "{domain} has no closed-form density; use Monte-Carlo moments"
                )));
            }
            let dmax = domain.diameter();
            let f1 = |r: f64| domain.pair_distance_density(r).unwrap_or(0.0) * r.powf(eta);
            let f2 = |r: f64| {
                if r <= 0.0 {
                    return 0.0;
                }
                domain.pair_distance_density(r).unwrap_or(0.0) * r.powf(eta) * r.ln()
            };
            let bps = [1e-6, 1e-3, 1e-1, 1.0];
            let e1 = quad::integrate(&f1, 0.0, dmax, &bps, tol, quad::DEFAULT_MAX_PANELS)?.value;
            let e2 = quad::integrate(&f2, 0.0, dmax, &bps, tol, quad::DEFAULT_MAX_PANELS)?.value;
            Ok(DomainMoments {
                e_r_eta: e1,
                e_r_eta_log: e2,
                eta,
                method: MomentMethod::Quadrature,
            })
        }
        EstimationMethod::MonteCarlo { n_pairs, seed } => {
            if n_pairs < 1000 {
                return Err(Error::domain("n_pairs must be >= 1000"));
            }
            let domain = *domain;
            let m1 = mc::sample_mean(n_pairs, seed, mc::DEFAULT_CHUNK, move |rng| {
                let a = domain.sample_point(rng);
                let b = domain.sample_point(rng);
                domain.distance(a, b).powf(eta)
            });
            let m2 = mc::sample_mean(n_pairs, seed, mc::DEFAULT_CHUNK, move |rng| {
                let a = domain.sample_point(rng);
                let b = domain.sample_point(rng);
                let r = domain.distance(a, b);
                // r^η log r → 0 as r → 0; define the summand 0 at r = 0
                if r > 0.0 {
                    r.powf(eta) * r.ln()
                } else {
                    0.0
                }
            });
            Ok(DomainMoments {
                e_r_eta: m1.mean,
                e_r_eta_log: m2.mean,
                eta,
                method: MomentMethod::MonteCarlo,
            })
        }
    }
}

/// Large-range expansion
/// `(1 + η log r0)/r0^η · E[R^η] - (η/r0^η) · E[R^η log R]`.
pub fn large_r0(
    domain: &Domain,
    eta: f64,
    r0: f64,
    moments: &DomainMoments,
) -> Result<AsymptoteResult> {
    if (moments.eta - eta).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "moments were computed for eta = {}, requested {eta}",
            moments.eta
        )));
    }
    if !(r0 > 0.0) {
        return Err(Error::domain("r0 must be > 0"));
    }
    let inv = r0.powf(-eta);
    let value = (1.0 + eta * r0.ln()) * inv * moments.e_r_eta - eta * inv * moments.e_r_eta_log;
    Ok(AsymptoteResult {
        value,
        regime: Regime::LargeR0,
        validity_hint: domain.diameter(),
    })
}

/// Growth class of the entropy as `r0 → 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrabilityClass {
    /// `H̄ = Θ(r0^d)`: the defining integral `∫_0^∞ t^{d-1} h2(p(t)) dt`
    /// is finite and positive.
    ThetaR0PowD,
    /// The integral diverges and the entropy grows faster than `r0^d`.
    SuperPolynomial,
}

/// Analytic classification: Rayleigh, Fermi–Dirac and hard connections are
/// `Θ(r0^d)` in every dimension; the power law diverges whenever `d >= α`.
pub fn integrability_class(conn: &ConnectionFunction, d: u32) -> IntegrabilityClass {
    match *conn {
        ConnectionFunction::PowerLaw { alpha } => {
            if (d as f64) < alpha {
                IntegrabilityClass::ThetaR0PowD
            } else {
                IntegrabilityClass::SuperPolynomial
            }
        }
        _ => IntegrabilityClass::ThetaR0PowD,
    }
}

/// Classifier report: analytic rule plus the numeric stabilization check on
/// the truncated integrals `I(T)`, `T ∈ {1e2, 1e3, 1e4}`.
#[derive(Clone, Copy, Debug)]
pub struct IntegrabilityReport {
    pub class: IntegrabilityClass,
    pub numeric_class: IntegrabilityClass,
    pub agrees: bool,
    pub truncated: [f64; 3],
}

pub fn integrability_report(conn: &ConnectionFunction, d: u32) -> Result<IntegrabilityReport> {
    let analytic = integrability_class(conn, d);
    let integrand = |t: f64| {
        let (p, q) = conn.eval_pq(t, 1.0).expect("finite t");
        t.powi(d as i32 - 1) * binary_entropy_pq(p, q)
    };
    let mut bps = vec![0.25, 0.5, 1.0];
    let mut m = 2.0;
    while m < 1e4 {
        bps.push(m);
        m *= 2.0;
    }
    let mut truncated = [0.0; 3];
    for (i, t) in [1e2, 1e3, 1e4].into_iter().enumerate() {
        let b: Vec<f64> = bps.iter().copied().filter(|x| *x < t).collect();
        truncated[i] =
            quad::integrate(&integrand, 0.0, t, &b, 1e-9, quad::DEFAULT_MAX_PANELS)?.value;
    }
    // stabilized iff the last refinement changed the value by < 1%
    let numeric_class = if (truncated[2] / truncated[1] - 1.0).abs() < 0.01 {
        IntegrabilityClass::ThetaR0PowD
    } else {
        IntegrabilityClass::SuperPolynomial
    };
    Ok(IntegrabilityReport {
        class: analytic,
        numeric_class,
        agrees: analytic == numeric_class,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_scales_as_r0_pow_d() {
        for d in 1..=3u32 {
            let a = small_r0_leading(d, 2.0, 0.01).unwrap();
            let b = small_r0_leading(d, 2.0, 0.02).unwrap();
            assert!(
                (b.value / a.value - 2f64.powi(d as i32)).abs() < 1e-10,
                "d = {d}"
            );
            assert!(a.value > 0.0);
        }
        assert!(small_r0_leading(0, 2.0, 0.1).is_err());
        assert!(small_r0_leading(4, 2.0, 0.1).is_err());
    }

    #[test]
    fn leading_d2_eta2_uses_basel_constant() {
        // Γ(1) = 1, ζ(2) = π²/6, S(2,2) = 1: coefficient = π · π²/6
        let r0 = 0.005;
        let v = small_r0_leading(2, 2.0, r0).unwrap().value;
        let expect = std::f64::consts::PI.powi(3) / 6.0 * r0 * r0;
        assert!(((v - expect) / expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn second_order_correction_sign_and_availability() {
        // interval: a_1 = -2 < 0, so the correction is negative
        let lead = small_r0_leading(1, 2.0, 0.05).unwrap().value;
        let second = small_r0_second_order(&Domain::Interval, 2.0, 0.05)
            .unwrap()
            .value;
        assert!(second < lead);
        assert!(small_r0_second_order(&Domain::Disk, 2.0, 0.05).is_err());
        assert!(small_r0_second_order(&Domain::Torus1d, 2.0, 0.05).is_err());
    }

    #[test]
    fn interval_moments_analytic() {
        // E[R^2] = ∫ r^2 (2-2r) = 1/6; E[R^2 log R] = -7/72
        let q = EstimationMethod::Quadrature { tol: 1e-12 };
        let m = domain_moments(&Domain::Interval, 2.0, &q).unwrap();
        assert!((m.e_r_eta - 1.0 / 6.0).abs() < 1e-10);
        assert!((m.e_r_eta_log + 7.0 / 72.0).abs() < 1e-10);
    }

    #[test]
    fn torus_moments_analytic() {
        // E[R^2] = ∫_0^{1/2} 2 r^2 = 1/12; E[R^2 log R] = -(log 2)/12 - 1/36
        let q = EstimationMethod::Quadrature { tol: 1e-12 };
        let m = domain_moments(&Domain::Torus1d, 2.0, &q).unwrap();
        assert!((m.e_r_eta - 1.0 / 12.0).abs() < 1e-10);
        let expect = -std::f64::consts::LN_2 / 12.0 - 1.0 / 36.0;
        assert!((m.e_r_eta_log - expect).abs() < 1e-10);
    }

    #[test]
    fn moments_mc_agrees_with_quadrature() {
        let q = EstimationMethod::Quadrature { tol: 1e-12 };
        let mcm = EstimationMethod::MonteCarlo {
            n_pairs: 400_000,
            seed: 31,
        };
        let a = domain_moments(&Domain::Interval, 2.0, &q).unwrap();
        let b = domain_moments(&Domain::Interval, 2.0, &mcm).unwrap();
        assert!((a.e_r_eta - b.e_r_eta).abs() < 2e-3);
        assert!((a.e_r_eta_log - b.e_r_eta_log).abs() < 2e-3);
    }

    #[test]
    fn large_r0_moment_eta_mismatch_rejected() {
        let q = EstimationMethod::Quadrature { tol: 1e-12 };
        let m = domain_moments(&Domain::Interval, 2.0, &q).unwrap();
        assert!(large_r0(&Domain::Interval, 4.0, 10.0, &m).is_err());
        let v = large_r0(&Domain::Interval, 2.0, 10.0, &m).unwrap();
        assert!(v.value > 0.0);
        assert_eq!(v.regime, Regime::LargeR0);
    }

    #[test]
    fn classifier_analytic_rule() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let fd = ConnectionFunction::FermiDirac { alpha: 0.0 };
        let pl3 = ConnectionFunction::power_law(3.0).unwrap();
        for d in 1..=3 {
            assert_eq!(integrability_class(&ray, d), IntegrabilityClass::ThetaR0PowD);
            assert_eq!(integrability_class(&fd, d), IntegrabilityClass::ThetaR0PowD);
        }
        assert_eq!(
            integrability_class(&pl3, 2),
            IntegrabilityClass::ThetaR0PowD
        );
        // boundary case d = α counts as divergent
        assert_eq!(
            integrability_class(&pl3, 3),
            IntegrabilityClass::SuperPolynomial
        );
    }
}
