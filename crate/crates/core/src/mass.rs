//! Entropy mass, mass maps and the wedge corner expansion.
//!
//! The entropy mass of a point `x` is `H_x = ∫_Ω h2(p(‖x-y‖)) dy` — the
//! amount of ensemble uncertainty contributed by a node at `x`. Replacing
//! `h2 ∘ p` by `p` gives the connectivity mass from the connectivity
//! literature; both are computed by the same radial machinery.
//!
//! In this module `r0` is baked into the connection (`ρ(r) = h2(p(r/r0))`):
//! connection functions with different ranges are treated as different
//! functions, which is the natural setting for boundary decompositions.

use crate::connect::{binary_entropy_pq, ConnectionFunction};
use crate::csvio;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::quad;
use rayon::prelude::*;
use std::io::Write;

/// Moments `ρ_k = ∫_0^∞ r^k ρ(r) dr` of the entropy connection, plus `ρ(0)`.
#[derive(Clone, Copy, Debug)]
pub struct RhoMoments {
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho_at_0: f64,
}

/// Semi-infinite moments of `ρ(r) = h2(p(r/r0))` for `k = 0, 1, 2`.
///
/// Divergent families are rejected up front: a constant connection with
/// `q ∈ (0,1)` has non-decaying `ρ`, and a power law needs `α > k+1` for the
/// `k`-th moment (same dichotomy as the integrability classifier).
pub fn rho_moments(conn: &ConnectionFunction, r0: f64) -> Result<RhoMoments> {
    if !(r0 > 0.0) {
        return Err(Error::domain("r0 must be > 0"));
    }
    let rho_at_0 = {
        let (p, q) = conn.eval_pq(0.0, r0)?;
        binary_entropy_pq(p, q)
    };
    match *conn {
        ConnectionFunction::Hard => {
            return Ok(RhoMoments {
                rho0: 0.0,
                rho1: 0.0,
                rho2: 0.0,
                rho_at_0: 0.0,
            })
        }
        ConnectionFunction::Constant { q } => {
            if q == 0.0 || q == 1.0 {
                return Ok(RhoMoments {
                    rho0: 0.0,
                    rho1: 0.0,
                    rho2: 0.0,
                    rho_at_0: 0.0,
                });
            }
            return Err(Error::Degenerate(
                "constant connection has divergent entropy moments".into(),
            ));
        }
        ConnectionFunction::PowerLaw { alpha } => {
            if alpha <= 3.0 {
                return Err(Error::Degenerate(format!(
                    "power-law alpha = {alpha} <= 3 has a divergent second entropy moment"
                )));
            }
        }
        _ => {}
    }
    let moment = |k: i32| -> Result<f64> {
        let g = |r: f64| {
            let (p, q) = conn.eval_pq(r, r0).expect("finite r");
            r.powi(k) * binary_entropy_pq(p, q)
        };
        let mut bps = vec![r0];
        if let Some(rs) = conn.half_probability_radius(r0) {
            bps.push(rs);
        }
        for m in [4.0, 16.0, 64.0] {
            bps.push(m * r0);
        }
        Ok(quad::integrate_semi_infinite(&g, &bps, 1e-9, quad::DEFAULT_MAX_PANELS)?.value)
    };
    Ok(RhoMoments {
        rho0: moment(0)?,
        rho1: moment(1)?,
        rho2: moment(2)?,
        rho_at_0,
    })
}

/// Polar point in a wedge of angle `theta`: distance `r` from the corner,
/// angular position `omega ∈ [0, theta]`.
#[derive(Clone, Copy, Debug)]
pub struct WedgePoint {
    pub r: f64,
    pub omega: f64,
    pub theta: f64,
}

impl WedgePoint {
    pub fn new(r: f64, omega: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::domain("wedge point needs r >= 0"));
        }
        if !(0.0..=theta).contains(&omega) || !(theta > 0.0 && theta <= std::f64::consts::PI) {
            return Err(Error::domain(format!(
                "need 0 <= omega <= theta <= pi, got omega={omega}, theta={theta}"
            )));
        }
        Ok(WedgePoint { r, omega, theta })
    }

    /// Complementary angle `ω' = θ - ω`.
    pub fn omega_prime(&self) -> f64 {
        self.theta - self.omega
    }
}

/// Leading-order entropy mass near a wedge corner:
/// `θ ρ1 + ρ0 r (sin ω + sin ω') + ρ(0) (r²/2)(sin ω cos ω + sin ω' cos ω')`.
///
/// For connections with `p(0) = 1` (Rayleigh, hard) the `ρ(0)` term
/// vanishes. The remainder is `O(r^3, r^{α_min+2}, r^{β_min+2} log r)`.
pub fn wedge_mass_leading(wp: &WedgePoint, moments: &RhoMoments) -> f64 {
    let w = wp.omega;
    let wp_ = wp.omega_prime();
    wp.theta * moments.rho1
        + moments.rho0 * wp.r * (w.sin() + wp_.sin())
        + moments.rho_at_0 * 0.5 * wp.r * wp.r * (w.sin() * w.cos() + wp_.sin() * wp_.cos())
}

/// How to evaluate a point mass.
#[derive(Clone, Copy, Debug)]
pub enum MassMethod {
    /// Radial-polar adaptive quadrature (square, disk, wedge).
    Quadrature { tol: f64 },
    /// Domain volume times the mean kernel value over `budget` uniform
    /// samples.
    MonteCarlo { budget: usize, seed: u64 },
}

fn point_mass<K>(domain: &Domain, x: Point, kernel: &K, method: &MassMethod) -> Result<f64>
where
    K: Fn(f64) -> f64 + Sync,
{
    if !domain.contains(x) {
        return Err(Error::domain(format!("point {x:?} outside {domain}")));
    }
    match *method {
        MassMethod::Quadrature { tol } => {
            if domain.dim() != 2 {
                return Err(Error::unsupported(format!(
                    "mass quadrature is implemented for 2D domains, not {domain}"
                )));
            }
            // H_x = ∫_0^{2π} ∫_0^{L(φ)} kernel(t) t dt dφ in polar
            // coordinates centred at x; L(φ) is the boundary exit distance.
            let radial = |limit: f64| -> f64 {
                if limit <= 0.0 {
                    return 0.0;
                }
                let g = |t: f64| t * kernel(t);
                quad::integrate(&g, 0.0, limit, &[limit * 0.5], tol * 1e-2, 800)
                    .map(|o| o.value)
                    .unwrap_or(0.0)
            };
            let outer = |phi: f64| -> f64 {
                let limit = domain.ray_exit_distance(x, phi).unwrap_or(0.0);
                radial(limit)
            };
            let two_pi = 2.0 * std::f64::consts::PI;
            // angular kinks: directions toward corners (both branches)
            let mut bps = Vec::new();
            for d in domain.corner_directions(x) {
                let mut a = d;
                while a < 0.0 {
                    a += two_pi;
                }
                bps.push(a % two_pi);
            }
            let out = quad::integrate(&outer, 0.0, two_pi, &bps, tol, quad::DEFAULT_MAX_PANELS)?;
            Ok(out.value)
        }
        MassMethod::MonteCarlo { budget, seed } => {
            if budget < 100 {
                return Err(Error::domain("MC mass budget must be >= 100"));
            }
            let m = crate::mc::sample_mean(budget, seed, crate::mc::DEFAULT_CHUNK, |rng| {
                let y = domain.sample_point(rng);
                kernel(domain.distance(x, y))
            });
            Ok(domain.volume() * m.mean)
        }
    }
}

/// Entropy mass `H_x = ∫_Ω h2(p(‖x-y‖/r0)) dy`.
pub fn entropy_mass(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    x: Point,
    method: &MassMethod,
) -> Result<f64> {
    let kernel = |r: f64| {
        let (p, q) = conn.eval_pq(r, r0).expect("finite r");
        binary_entropy_pq(p, q)
    };
    point_mass(domain, x, &kernel, method)
}

/// Connectivity mass `M(x) = ∫_Ω p(‖x-y‖/r0) dy`.
pub fn connectivity_mass(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    x: Point,
    method: &MassMethod,
) -> Result<f64> {
    let kernel = |r: f64| conn.eval(r, r0).expect("finite r");
    point_mass(domain, x, &kernel, method)
}

/// Grid of entropy-mass values over a 2D domain at fixed `r0`.
#[derive(Clone, Debug)]
pub struct MassMap {
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `values[iy * nx + ix]`; NaN marks cells outside Ω.
    pub values: Vec<f64>,
    pub domain: Domain,
    pub conn: ConnectionFunction,
    pub r0: f64,
}

impl MassMap {
    /// Bounding box of the domain (2D).
    fn bounding_box(domain: &Domain) -> (f64, f64, f64, f64) {
        match *domain {
            Domain::Square => (0.0, 1.0, 0.0, 1.0),
            Domain::Disk => (-1.0, 1.0, -1.0, 1.0),
            Domain::Wedge { theta, radius } => {
                let ymax = if theta >= std::f64::consts::FRAC_PI_2 {
                    radius
                } else {
                    radius * theta.sin()
                };
                let xmin = if theta >= std::f64::consts::PI {
                    -radius
                } else {
                    (radius * theta.cos()).min(0.0)
                };
                (xmin, radius, 0.0, ymax)
            }
            _ => (0.0, 1.0, 0.0, 1.0),
        }
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        let (x0, x1, y0, y1) = Self::bounding_box(&self.domain);
        [
            x0 + (x1 - x0) * (ix as f64 + 0.5) / self.nx as f64,
            y0 + (y1 - y0) * (iy as f64 + 0.5) / self.ny as f64,
            0.0,
        ]
    }

    /// CSV `x,y,value`, skipping cells outside the domain.
    pub fn write_csv<W: Write>(&self, mut w: W, header_comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = header_comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "x,y,value")?;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let v = self.values[iy * self.nx + ix];
                if v.is_nan() {
                    continue;
                }
                let c = self.cell_center(ix, iy);
                writeln!(
                    w,
                    "{},{},{}",
                    csvio::fmt_g17(c[0]),
                    csvio::fmt_g17(c[1]),
                    csvio::fmt_g17(v)
                )?;
            }
        }
        Ok(())
    }

    /// 16-bit PGM (outside-domain cells written as 0).
    pub fn write_pgm(&self, path: &std::path::Path) -> std::io::Result<()> {
        let filled: Vec<f64> = self.values.iter().map(|v| if v.is_nan() { 0.0 } else { *v }).collect();
        csvio::write_pgm16(path, self.nx, self.ny, &filled)
    }

    /// Mean over in-domain cells.
    pub fn mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for &v in &self.values {
            if !v.is_nan() {
                sum += v;
                n += 1;
            }
        }
        sum / n as f64
    }

    /// `(ix, iy)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_nan() && v > best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.nx, best.0 / self.nx)
    }
}

/// Per-cell entropy mass at cell centers by Monte-Carlo.
///
/// All cells share one pool of `budget` uniform samples (same `Y` pool,
/// different `x`): per cell the estimator stays unbiased, and differences
/// between nearby cells see common randomness, which is what the
/// dominant-region comparisons consume.
pub fn mass_map(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    nx: usize,
    ny: usize,
    budget: usize,
    seed: u64,
) -> Result<MassMap> {
    if domain.dim() != 2 {
        return Err(Error::unsupported(format!(
            "mass maps are 2D only, got {domain}"
        )));
    }
    if nx == 0 || ny == 0 || budget < 100 {
        return Err(Error::domain("need nx, ny >= 1 and budget >= 100"));
    }
    let mut rng = crate::rng::substream(seed, 0);
    let pool: Vec<Point> = (0..budget).map(|_| domain.sample_point(&mut rng)).collect();
    let volume = domain.volume();

    let map = MassMap {
        nx,
        ny,
        values: vec![0.0; nx * ny],
        domain: *domain,
        conn: *conn,
        r0,
    };
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let x = map.cell_center(idx % nx, idx / nx);
            if !domain.contains(x) {
                return f64::NAN;
            }
            let mut sum = 0.0;
            for y in &pool {
                let (p, q) = conn.eval_pq(domain.distance(x, *y), r0).expect("finite r");
                sum += binary_entropy_pq(p, q);
            }
            volume * sum / budget as f64
        })
        .collect();
    Ok(MassMap { values, ..map })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_connection_has_zero_moments() {
        let m = rho_moments(&ConnectionFunction::Hard, 0.3).unwrap();
        assert_eq!((m.rho0, m.rho1, m.rho2, m.rho_at_0), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn moments_scale_with_r0_power() {
        // ρ_k(r0) = r0^{k+1} ρ_k(1)
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let base = rho_moments(&ray, 1.0).unwrap();
        let scaled = rho_moments(&ray, 0.25).unwrap();
        assert!((scaled.rho0 / base.rho0 - 0.25).abs() < 1e-7);
        assert!((scaled.rho1 / base.rho1 - 0.0625).abs() < 1e-7);
        assert!((scaled.rho2 / base.rho2 - 0.015625).abs() < 1e-6);
    }

    #[test]
    fn divergent_moment_families_rejected() {
        assert!(rho_moments(&ConnectionFunction::constant(0.5).unwrap(), 1.0).is_err());
        assert!(rho_moments(&ConnectionFunction::power_law(2.5).unwrap(), 1.0).is_err());
        assert!(rho_moments(&ConnectionFunction::power_law(4.0).unwrap(), 1.0).is_ok());
    }

    #[test]
    fn wedge_corner_value_and_angle_ratio() {
        let moments = RhoMoments {
            rho0: 0.2,
            rho1: 0.05,
            rho2: 0.01,
            rho_at_0: 0.0,
        };
        let t4 = WedgePoint::new(0.0, 0.0, std::f64::consts::FRAC_PI_4).unwrap();
        let tpi = WedgePoint::new(0.0, 0.0, std::f64::consts::PI).unwrap();
        let a = wedge_mass_leading(&t4, &moments);
        let b = wedge_mass_leading(&tpi, &moments);
        assert!((a - std::f64::consts::FRAC_PI_4 * 0.05).abs() < 1e-15);
        assert!((a / b - 0.25).abs() < 1e-12);
    }

    #[test]
    fn wedge_mid_angle_is_local_optimum() {
        let theta = std::f64::consts::FRAC_PI_4;
        let moments = rho_moments(&ConnectionFunction::rayleigh(2.0).unwrap(), 0.05).unwrap();
        let r = 0.02;
        let mut best = (0.0, f64::NEG_INFINITY);
        let n = 200;
        for i in 0..=n {
            let w = theta * i as f64 / n as f64;
            let v = wedge_mass_leading(&WedgePoint::new(r, w, theta).unwrap(), &moments);
            if v > best.1 {
                best = (w, v);
            }
        }
        assert!(
            (best.0 - theta / 2.0).abs() <= theta / n as f64 + 1e-12,
            "argmax over omega at {}",
            best.0
        );
    }

    #[test]
    fn constant_connection_mass_is_volume_scaled() {
        let one = ConnectionFunction::constant(1.0).unwrap();
        let m = connectivity_mass(
            &Domain::Square,
            &one,
            1.0,
            [0.3, 0.4, 0.0],
            &MassMethod::Quadrature { tol: 1e-10 },
        )
        .unwrap();
        assert!((m - 1.0).abs() < 1e-8, "got {m}");
        let half = ConnectionFunction::constant(0.5).unwrap();
        let m = connectivity_mass(
            &Domain::Square,
            &half,
            1.0,
            [0.3, 0.4, 0.0],
            &MassMethod::MonteCarlo { budget: 5000, seed: 2 },
        )
        .unwrap();
        assert!((m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hard_connectivity_mass_is_ball_volume() {
        let r0 = 0.1;
        let m = connectivity_mass(
            &Domain::Square,
            &ConnectionFunction::Hard,
            r0,
            [0.5, 0.5, 0.0],
            &MassMethod::Quadrature { tol: 1e-10 },
        )
        .unwrap();
        let expect = std::f64::consts::PI * r0 * r0;
        assert!((m - expect).abs() < 1e-9, "got {m} vs {expect}");
    }

    #[test]
    fn mass_outside_domain_rejected() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        assert!(entropy_mass(
            &Domain::Square,
            &ray,
            0.1,
            [1.5, 0.5, 0.0],
            &MassMethod::Quadrature { tol: 1e-8 }
        )
        .is_err());
    }

    #[test]
    fn constant_map_is_flat() {
        let c = ConnectionFunction::constant(0.3).unwrap();
        let map = mass_map(&Domain::Square, &c, 1.0, 8, 8, 500, 3).unwrap();
        let expect = crate::connect::binary_entropy(0.3).unwrap();
        for &v in &map.values {
            assert!((v - expect).abs() < 1e-12);
        }
        assert!((map.mean() - expect).abs() < 1e-12);
    }

    #[test]
    fn mass_map_grid_geometry() {
        let c = ConnectionFunction::constant(0.3).unwrap();
        let map = mass_map(&Domain::Square, &c, 1.0, 4, 2, 500, 3).unwrap();
        assert_eq!(map.cell_center(0, 0), [0.125, 0.25, 0.0]);
        assert_eq!(map.cell_center(3, 1), [0.875, 0.75, 0.0]);
        let disk_map = mass_map(&Domain::Disk, &c, 1.0, 6, 6, 500, 3).unwrap();
        // corner cells of the bounding box lie outside the disk
        assert!(disk_map.values[0].is_nan());
    }
}
