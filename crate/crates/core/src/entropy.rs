//! Conditional entropy-per-edge: quadrature, Monte-Carlo and per-instance.
//!
//! The quadrature path integrates `f(r) h2(p(r/r0))` against a closed-form
//! pair-distance density; the Monte-Carlo path exploits the entropy-graph
//! identity `H̄ = E_R[h2(p(R/r0))]` and averages over fresh point pairs
//! (fresh pairs rather than all pairs of one point set: shared points would
//! correlate the summands and bias the reported standard error). The
//! per-instance path averages `h2` over the realized pair distances of one
//! generated graph.
//!
//! Also here: mean connection probability and the SRGG-vs-Erdős–Rényi
//! compressibility difference `ΔC = (h2(p̄) - H̄)/p̄`.

use crate::connect::{binary_entropy_pq, ConnectionFunction};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, SmoothedDensity};
use crate::mc;
use crate::quad;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyMethod {
    Quadrature,
    MonteCarlo,
    Instance,
}

impl std::fmt::Display for EntropyMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntropyMethod::Quadrature => write!(f, "quadrature"),
            EntropyMethod::MonteCarlo => write!(f, "monte-carlo"),
            EntropyMethod::Instance => write!(f, "instance"),
        }
    }
}

/// A conditional entropy-per-edge value in nats/edge.
#[derive(Clone, Copy, Debug)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: EntropyMethod,
    /// Standard error (Monte-Carlo only, 0 otherwise).
    pub std_error: f64,
    /// Monte-Carlo sample size (0 for quadrature).
    pub n_pairs: usize,
    pub r0: f64,
}

/// How to estimate a pair-distance expectation.
#[derive(Clone, Copy, Debug)]
pub enum EstimationMethod {
    Quadrature { tol: f64 },
    MonteCarlo { n_pairs: usize, seed: u64 },
}

/// Mandatory subdivision points for entropy integrands.
///
/// The integrand `f(r) h2(p(r/r0))` peaks sharply where `p = 1/2`; for small
/// `r0` the whole feature sits orders of magnitude below the diameter, so the
/// spike radius and a geometric ladder of `r0` multiples seed the partition.
/// Density kinks (the square at `r = 1`) are included as well.
pub(crate) fn entropy_breakpoints(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
) -> Vec<f64> {
    let d = domain.diameter();
    let mut bps = Vec::new();
    if let Some(rs) = conn.half_probability_radius(r0) {
        bps.push(0.5 * rs);
        bps.push(rs);
        bps.push(2.0 * rs);
    }
    let mut m = r0;
    let mut steps = 0;
    while m < d && steps < 64 {
        bps.push(m);
        m *= 4.0;
        steps += 1;
    }
    if matches!(domain, Domain::Square) {
        bps.push(1.0);
    }
    bps
}

/// Adaptive quadrature of `∫_0^D f(r) h2(p(r/r0)) dr`.
pub fn entropy_per_edge_quadrature(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    tol: f64,
) -> Result<EntropyEstimate> {
    if !domain.has_closed_form_density() {
        return Err(Error::unsupported(format!(
            "{domain} has no closed-form pair-distance density; use entropy_per_edge_mc \
             or entropy_per_edge_smoothed"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be > 0"));
    }
    let integrand = |r: f64| {
        let f = domain.pair_distance_density(r).unwrap_or(0.0);
        if f <= 0.0 {
            return 0.0;
        }
        let (p, q) = conn.eval_pq(r, r0).expect("r, r0 validated");
        f * binary_entropy_pq(p, q)
    };
    let bps = entropy_breakpoints(domain, conn, r0);
    let out = quad::integrate(
        &integrand,
        0.0,
        domain.diameter(),
        &bps,
        tol,
        quad::DEFAULT_MAX_PANELS,
    )?;
    Ok(EntropyEstimate {
        value: out.value.max(0.0),
        method: EntropyMethod::Quadrature,
        std_error: 0.0,
        n_pairs: 0,
        r0,
    })
}

/// Monte-Carlo mean of `h2(p(‖X-Y‖/r0))` over independent point pairs.
pub fn entropy_per_edge_mc(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    if n_pairs < 1000 {
        return Err(Error::domain(format!(
            "n_pairs must be >= 1000, got {n_pairs}"
        )));
    }
    let conn = *conn;
    let domain = *domain;
    let m = mc::sample_mean(n_pairs, seed, mc::DEFAULT_CHUNK, move |rng| {
        let a = domain.sample_point(rng);
        let b = domain.sample_point(rng);
        let r = domain.distance(a, b);
        let (p, q) = conn.eval_pq(r, r0).expect("sampled r is finite");
        binary_entropy_pq(p, q)
    });
    Ok(EntropyEstimate {
        value: m.mean,
        method: EntropyMethod::MonteCarlo,
        std_error: m.std_error,
        n_pairs,
        r0,
    })
}

/// Quadrature of `h2(p(r/r0))` against a smoothed empirical density — the
/// cross-check path for domains without closed-form `f` (cube, ball).
pub fn entropy_per_edge_smoothed(
    density: &SmoothedDensity,
    conn: &ConnectionFunction,
    r0: f64,
) -> Result<EntropyEstimate> {
    let g = |r: f64| {
        let (p, q) = conn.eval_pq(r, r0).expect("histogram support is finite");
        binary_entropy_pq(p, q)
    };
    Ok(EntropyEstimate {
        value: density.integrate_against(&g).max(0.0),
        method: EntropyMethod::Quadrature,
        std_error: 0.0,
        n_pairs: 0,
        r0,
    })
}

/// One realized SRGG: node positions plus an edge list.
#[derive(Clone, Debug)]
pub struct GraphInstance {
    pub positions: Vec<Point>,
    /// Edges `(i, j)` with `i < j`.
    pub edges: Vec<(u32, u32)>,
    pub seed: u64,
    pub domain: Domain,
    pub conn: ConnectionFunction,
    pub r0: f64,
}

/// Sample node positions and flip one Bernoulli coin per pair.
pub fn generate_srgg(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    n: usize,
    seed: u64,
) -> Result<GraphInstance> {
    if n < 1 {
        return Err(Error::domain("n must be >= 1"));
    }
    let mut pos_rng = crate::rng::substream(seed, 0);
    let positions: Vec<Point> = (0..n).map(|_| domain.sample_point(&mut pos_rng)).collect();
    let mut edge_rng = crate::rng::substream(seed, 1);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let r = domain.distance(positions[i], positions[j]);
            let p = conn.eval(r, r0)?;
            if edge_rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(GraphInstance {
        positions,
        edges,
        seed,
        domain: *domain,
        conn: *conn,
        r0,
    })
}

/// Per-edge average of `h2(p(r_ij/r0))` over the instance's pair distances.
///
/// Converges to the quadrature value as `n → ∞`.
pub fn conditional_entropy_of_instance(inst: &GraphInstance) -> Result<EntropyEstimate> {
    let n = inst.positions.len();
    if n < 2 {
        return Err(Error::domain("instance entropy needs n >= 2"));
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = inst.domain.distance(inst.positions[i], inst.positions[j]);
            let (p, q) = inst.conn.eval_pq(r, inst.r0)?;
            sum += binary_entropy_pq(p, q);
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(EntropyEstimate {
        value: sum / pairs,
        method: EntropyMethod::Instance,
        std_error: 0.0,
        n_pairs: n * (n - 1) / 2,
        r0: inst.r0,
    })
}

/// Mean connection probability and its complement, `(p̄, 1 - p̄, std_error)`.
///
/// The complement is integrated directly (`∫ f (1-p)`) rather than formed by
/// subtraction: at large `r0` the entropy and compressibility formulas need
/// `1 - p̄ ~ E[R^η]/r0^η` to full relative precision.
pub fn mean_connection_pq(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    est: &EstimationMethod,
) -> Result<(f64, f64, f64)> {
    match *est {
        EstimationMethod::Quadrature { tol } => {
            if !domain.has_closed_form_density() {
                return Err(Error::unsupported(format!(
                    "{domain} has no closed-form density; use the Monte-Carlo method"
                )));
            }
            let bps = entropy_breakpoints(domain, conn, r0);
            let d = domain.diameter();
            let p_int = |r: f64| {
                let f = domain.pair_distance_density(r).unwrap_or(0.0);
                f * conn.eval_pq(r, r0).expect("validated").0
            };
            let q_int = |r: f64| {
                let f = domain.pair_distance_density(r).unwrap_or(0.0);
                f * conn.eval_pq(r, r0).expect("validated").1
            };
            let p = quad::integrate(&p_int, 0.0, d, &bps, tol, quad::DEFAULT_MAX_PANELS)?.value;
            let q = quad::integrate(&q_int, 0.0, d, &bps, tol, quad::DEFAULT_MAX_PANELS)?.value;
            let s = p + q;
            Ok(((p / s).clamp(0.0, 1.0), (q / s).clamp(0.0, 1.0), 0.0))
        }
        EstimationMethod::MonteCarlo { n_pairs, seed } => {
            if n_pairs < 1000 {
                return Err(Error::domain("n_pairs must be >= 1000"));
            }
            let conn = *conn;
            let domain = *domain;
            let m = mc::sample_mean(n_pairs, seed, mc::DEFAULT_CHUNK, move |rng| {
                let a = domain.sample_point(rng);
                let b = domain.sample_point(rng);
                conn.eval(domain.distance(a, b), r0).expect("finite r")
            });
            Ok((m.mean, 1.0 - m.mean, m.std_error))
        }
    }
}

/// Mean connection probability `p̄ = ∫ f(r) p(r/r0) dr`.
pub fn mean_connection_prob(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    est: &EstimationMethod,
) -> Result<f64> {
    Ok(mean_connection_pq(domain, conn, r0, est)?.0)
}

/// Compressibility difference `ΔC = (h2(p̄) - H̄) / p̄` between the
/// edge-density-matched Erdős–Rényi ensemble and the SRGG.
///
/// Quadrature throughout when `f` is closed-form; otherwise Monte-Carlo with
/// the same seed for `p̄` and `H̄` so the sampling error partially cancels.
pub fn compressibility_difference(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    est: &EstimationMethod,
) -> Result<f64> {
    let (p_bar, q_bar, _) = mean_connection_pq(domain, conn, r0, est)?;
    if p_bar <= 0.0 || q_bar <= 0.0 {
        return Err(Error::Degenerate(format!(
            "compressibility undefined at mean connection probability {p_bar}"
        )));
    }
    let h_bar = match *est {
        EstimationMethod::Quadrature { tol } => {
            entropy_per_edge_quadrature(domain, conn, r0, tol)?.value
        }
        EstimationMethod::MonteCarlo { n_pairs, seed } => {
            entropy_per_edge_mc(domain, conn, r0, n_pairs, seed)?.value
        }
    };
    let dc = (binary_entropy_pq(p_bar, q_bar) - h_bar) / p_bar;
    if let EstimationMethod::Quadrature { .. } = est {
        // Jensen guarantees ΔC >= 0; anything beyond rounding is a fault
        if dc < -1e-9 {
            return Err(Error::Convergence(format!(
                "compressibility difference {dc} < 0 violates the Jensen bound"
            )));
        }
        return Ok(dc.max(0.0));
    }
    Ok(dc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn constant_connection_gives_h2_q() {
        let c = ConnectionFunction::constant(0.3).unwrap();
        let e = entropy_per_edge_quadrature(&Domain::Interval, &c, 0.5, TOL).unwrap();
        let h = crate::connect::binary_entropy(0.3).unwrap();
        assert!((e.value - h).abs() < 1e-11);
    }

    #[test]
    fn hard_connection_gives_zero() {
        let e = entropy_per_edge_quadrature(&Domain::Interval, &ConnectionFunction::Hard, 2.0, TOL)
            .unwrap();
        assert_eq!(e.value, 0.0);
        let m = entropy_per_edge_mc(&Domain::Square, &ConnectionFunction::Hard, 0.3, 10_000, 4)
            .unwrap();
        assert_eq!(m.value, 0.0);
        assert_eq!(m.std_error, 0.0);
    }

    #[test]
    fn quadrature_rejects_cube_and_ball() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        for d in [Domain::Cube, Domain::Ball] {
            let err = entropy_per_edge_quadrature(&d, &ray, 0.3, TOL).unwrap_err();
            assert!(matches!(err, Error::Unsupported(_)), "{d}");
        }
    }

    #[test]
    fn mc_requires_enough_pairs() {
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        assert!(entropy_per_edge_mc(&Domain::Interval, &ray, 0.1, 10, 1).is_err());
    }

    #[test]
    fn estimate_stays_in_entropy_range() {
        let ray = ConnectionFunction::rayleigh(1.0).unwrap();
        for &r0 in &[0.01, 0.1, 1.0, 10.0] {
            let e = entropy_per_edge_quadrature(&Domain::Interval, &ray, r0, TOL).unwrap();
            assert!(e.value >= 0.0 && e.value <= std::f64::consts::LN_2);
        }
    }

    #[test]
    fn complete_and_empty_graphs() {
        let full = generate_srgg(
            &Domain::Square,
            &ConnectionFunction::constant(1.0).unwrap(),
            1.0,
            30,
            7,
        )
        .unwrap();
        assert_eq!(full.edges.len(), 30 * 29 / 2);
        let empty = generate_srgg(
            &Domain::Square,
            &ConnectionFunction::constant(0.0).unwrap(),
            1.0,
            30,
            7,
        )
        .unwrap();
        assert!(empty.edges.is_empty());
        for &(i, j) in &full.edges {
            assert!(i < j);
        }
    }

    #[test]
    fn instance_entropy_edge_cases() {
        // two nodes at p = 1/2 distance: exactly log 2
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let r0 = 0.4;
        let r_half = ray.half_probability_radius(r0).unwrap();
        let inst = GraphInstance {
            positions: vec![[0.0, 0.0, 0.0], [r_half, 0.0, 0.0]],
            edges: vec![],
            seed: 0,
            domain: Domain::Square,
            conn: ray,
            r0,
        };
        let e = conditional_entropy_of_instance(&inst).unwrap();
        assert!((e.value - std::f64::consts::LN_2).abs() < 1e-12);

        let hard = GraphInstance {
            conn: ConnectionFunction::Hard,
            ..inst.clone()
        };
        assert_eq!(conditional_entropy_of_instance(&hard).unwrap().value, 0.0);

        let single = GraphInstance {
            positions: vec![[0.0, 0.0, 0.0]],
            ..inst
        };
        assert!(conditional_entropy_of_instance(&single).is_err());
    }

    #[test]
    fn mean_connection_prob_examples() {
        // Constant(q) → q
        let c = ConnectionFunction::constant(0.4).unwrap();
        let q = EstimationMethod::Quadrature { tol: TOL };
        let v = mean_connection_prob(&Domain::Interval, &c, 1.0, &q).unwrap();
        assert!((v - 0.4).abs() < 1e-11);

        // Interval, Hard, r0 = 0.5: ∫_0^0.5 (2-2r) dr = 0.75
        let v = mean_connection_prob(&Domain::Interval, &ConnectionFunction::Hard, 0.5, &q).unwrap();
        assert!((v - 0.75).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn torus_rayleigh_mean_prob_matches_erf_oracle() {
        // 2 ∫_0^{1/2} e^{-(r/0.1)^2} dr = 0.1 √π erf(5); erf(5) = 1 - 1.5e-12
        let ray = ConnectionFunction::rayleigh(2.0).unwrap();
        let q = EstimationMethod::Quadrature { tol: TOL };
        let v = mean_connection_prob(&Domain::Torus1d, &ray, 0.1, &q).unwrap();
        let oracle = 0.1 * std::f64::consts::PI.sqrt();
        assert!((v - oracle).abs() < 1e-10, "got {v} vs {oracle}");
    }

    #[test]
    fn compressibility_zero_for_constant_and_degenerate_errors() {
        let q = EstimationMethod::Quadrature { tol: TOL };
        let c = ConnectionFunction::constant(0.3).unwrap();
        let dc = compressibility_difference(&Domain::Interval, &c, 1.0, &q).unwrap();
        assert!(dc.abs() < 1e-9, "ΔC = {dc}");
        let one = ConnectionFunction::constant(1.0).unwrap();
        assert!(matches!(
            compressibility_difference(&Domain::Interval, &one, 1.0, &q),
            Err(Error::Degenerate(_))
        ));
    }
}
