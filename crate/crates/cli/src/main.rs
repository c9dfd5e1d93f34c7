//! `srgg` — experiment front end for SRGG entropy numerics.
//!
//! Subcommands map to the library pillars: `curve` (quadrature / entropy-graph
//! Monte-Carlo sweeps), `asym` (closed-form limit comparisons), `mass` /
//! `wedge` (boundary entropy mass), `cantor` (log-periodic series vs MC),
//! `compress` (SRGG vs Erdős–Rényi compressibility gap), `moments` and
//! `check` (the invariant suite).
//!
//! Everything is seeded explicitly; outputs are byte-identical for a fixed
//! configuration and seed regardless of `--threads`.

mod config;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{ConfigFile, R0Grid};
use srgg_entropy::asymptotics::{self, IntegrabilityClass};
use srgg_entropy::cantor::{self, CantorSpec};
use srgg_entropy::connect::ConnectionFunction;
use srgg_entropy::csvio::fmt_g17;
use srgg_entropy::entropy::{self, EstimationMethod};
use srgg_entropy::geometry::{Domain, EmpiricalCdf};
use srgg_entropy::mass::{self, MassMethod, WedgePoint};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "srgg",
    version,
    about = "Entropy of soft random geometric graphs across embedding geometries",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed (mandatory: no wall-clock default, runs are reproducible)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores); results do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Flat `key = value` config file; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path ('-' = stdout)
    #[arg(long, global = true)]
    out: Option<String>,

    /// Display entropies in bits instead of nats (output conversion only)
    #[arg(long, global = true)]
    bits: bool,

    /// Emit a small gnuplot recipe next to the CSV
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy-per-edge over an r0 sweep (quadrature and/or Monte-Carlo)
    Curve(CurveArgs),
    /// Quadrature vs the small-r0 and large-r0 closed forms
    Asym(AsymArgs),
    /// Entropy-mass map over a 2D domain (CSV + 16-bit PGM)
    Mass(MassArgs),
    /// Wedge corner expansion vs 2D quadrature
    Wedge(WedgeArgs),
    /// Cantor-set entropy: Monte-Carlo curve vs the log-periodic series
    Cantor(CantorArgs),
    /// SRGG vs Erdős–Rényi compressibility difference
    Compress(CompressArgs),
    /// Pair-distance moments E[R^eta], E[R^eta log R]
    Moments(MomentsArgs),
    /// Run the numeric invariant suite (exit 0 iff all pass)
    Check(CheckArgs),
}

#[derive(Args)]
struct CurveArgs {
    /// interval | torus | square | disk | cube | ball | wedge:theta=..,radius=..
    #[arg(long)]
    domain: Option<Domain>,
    /// rayleigh:eta=.. | fermi:alpha=.. | powerlaw:alpha=.. | hard | const:q=..
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    /// single value or start:stop:count:{log|lin}
    #[arg(long)]
    r0: Option<R0Grid>,
    /// quadrature | mc | both
    #[arg(long)]
    method: Option<String>,
    /// Monte-Carlo pair count per row
    #[arg(long)]
    pairs: Option<usize>,
    /// absolute quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct AsymArgs {
    #[arg(long)]
    domain: Option<Domain>,
    /// must be a rayleigh family (the closed forms are derived for it)
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    #[arg(long)]
    r0: Option<R0Grid>,
    /// pair count for empirical-density / Monte-Carlo moment fallbacks
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct MassArgs {
    #[arg(long)]
    domain: Option<Domain>,
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    /// single r0
    #[arg(long)]
    r0: Option<f64>,
    /// grid as NXxNY, e.g. 128x128
    #[arg(long)]
    grid: Option<String>,
    /// Monte-Carlo samples in the shared pool
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct WedgeArgs {
    /// wedge angle in radians
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    #[arg(long)]
    r0: Option<f64>,
    /// angular position (default theta/2)
    #[arg(long)]
    omega: Option<f64>,
    /// corner distances to evaluate, grid syntax as --r0
    #[arg(long)]
    r: Option<R0Grid>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CantorArgs {
    /// removal ratio alpha > 2
    #[arg(long)]
    alpha: Option<f64>,
    /// digits of the alpha-ary expansion
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    #[arg(long)]
    r0: Option<R0Grid>,
    /// Monte-Carlo pairs per row (and for the sign calibration)
    #[arg(long)]
    pairs: Option<usize>,
    /// Fourier modes kept in the series
    #[arg(long)]
    modes: Option<usize>,
    /// also compute the odd-moment table and write it here (versioned CSV)
    #[arg(long)]
    odd_moments_out: Option<PathBuf>,
    /// pair count for the odd-moment table
    #[arg(long)]
    odd_pairs: Option<usize>,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    domain: Option<Domain>,
    #[arg(long)]
    conn: Option<ConnectionFunction>,
    #[arg(long)]
    r0: Option<R0Grid>,
    /// quadrature | mc
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    domain: Option<Domain>,
    #[arg(long)]
    eta: Option<f64>,
    /// quadrature | mc
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    pairs: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("srgg: cannot build thread pool: {e}");
            std::process::exit(1);
        }
    };
    // distinguish configuration faults (exit 2) from numeric failures (exit 1)
    match pool.install(|| run(&cli)) {
        Ok(code) => std::process::exit(code),
        Err(RunError::Usage(e)) => {
            eprintln!("srgg: {e:#}");
            std::process::exit(2);
        }
        Err(RunError::Numeric(e)) => {
            eprintln!("srgg: {e:#}");
            std::process::exit(1);
        }
    }
}

enum RunError {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
}

fn usage(e: anyhow::Error) -> RunError {
    RunError::Usage(e)
}

fn numeric(e: anyhow::Error) -> RunError {
    RunError::Numeric(e)
}

struct Ctx {
    cfg: ConfigFile,
    seed: u64,
    out: String,
    bits: bool,
    gnuplot: bool,
}

fn run(cli: &Cli) -> std::result::Result<i32, RunError> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(usage)?,
        None => ConfigFile::default(),
    };
    let seed = cfg
        .resolve_required(cli.seed, "seed")
        .map_err(usage)?;
    let out = cfg
        .resolve(cli.out.clone(), "out", "-".to_string())
        .map_err(usage)?;
    let ctx = Ctx {
        cfg,
        seed,
        out,
        bits: cli.bits,
        gnuplot: cli.gnuplot,
    };
    let result = match &cli.command {
        Command::Curve(a) => cmd_curve(&ctx, a),
        Command::Asym(a) => cmd_asym(&ctx, a),
        Command::Mass(a) => cmd_mass(&ctx, a),
        Command::Wedge(a) => cmd_wedge(&ctx, a),
        Command::Cantor(a) => cmd_cantor(&ctx, a),
        Command::Compress(a) => cmd_compress(&ctx, a),
        Command::Moments(a) => cmd_moments(&ctx, a),
        Command::Check(_) => return cmd_check(&ctx).map_err(numeric),
    };
    result.map(|_| 0)
}

fn write_output(ctx: &Ctx, text: &str, plot_columns: Option<&str>) -> Result<()> {
    if ctx.out == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }
    std::fs::write(&ctx.out, text)
        .with_context(|| format!("cannot write output file {}", ctx.out))?;
    if ctx.gnuplot {
        if let Some(cols) = plot_columns {
            let gp = format!(
                "set datafile separator ','\nset logscale x\nplot {cols}\n",
            );
            let path = format!("{}.gp", ctx.out);
            std::fs::write(&path, gp.replace("FILE", &ctx.out))?;
        }
    }
    Ok(())
}

fn row_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn nats_scale(bits: bool) -> f64 {
    if bits {
        1.0 / std::f64::consts::LN_2
    } else {
        1.0
    }
}

fn parse_method(m: &str) -> Result<(bool, bool)> {
    match m {
        "quadrature" => Ok((true, false)),
        "mc" => Ok((false, true)),
        "both" => Ok((true, true)),
        other => bail!("method must be quadrature, mc or both, got '{other}'"),
    }
}

/// Quadrature reference value: closed-form density when available, else
/// quadrature against a smoothed empirical density built from `pairs`
/// sampled pair distances.
fn quadrature_value(
    domain: &Domain,
    conn: &ConnectionFunction,
    r0: f64,
    tol: f64,
    pairs: usize,
    seed: u64,
    ecdf_cache: &mut Option<EmpiricalCdf>,
) -> Result<f64> {
    if domain.has_closed_form_density() {
        return Ok(entropy::entropy_per_edge_quadrature(domain, conn, r0, tol)?.value);
    }
    if ecdf_cache.is_none() {
        *ecdf_cache = Some(EmpiricalCdf::from_domain(domain, pairs.max(1000), seed ^ 0xec)?);
    }
    let density = ecdf_cache.as_ref().unwrap().smoothed_density();
    Ok(entropy::entropy_per_edge_smoothed(&density, conn, r0)?.value)
}

fn cmd_curve(ctx: &Ctx, a: &CurveArgs) -> std::result::Result<(), RunError> {
    let domain: Domain = ctx
        .cfg
        .resolve_required(a.domain, "domain")
        .map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let grid: R0Grid = ctx.cfg.resolve_required(a.r0, "r0").map_err(usage)?;
    let method = ctx
        .cfg
        .resolve(a.method.clone(), "method", "both".to_string())
        .map_err(usage)?;
    let (do_quad, do_mc) = parse_method(&method).map_err(usage)?;
    let pairs = ctx.cfg.resolve(a.pairs, "pairs", 200_000).map_err(usage)?;
    let tol = ctx.cfg.resolve(a.tol, "tol", 1e-10).map_err(usage)?;
    let scale = nats_scale(ctx.bits);

    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=curve domain={domain} conn={conn} r0={grid} method={method} pairs={pairs} tol={tol} seed={} bits={}\n",
        ctx.seed, ctx.bits
    ));
    s.push_str("r0,value,std_error,method,domain,connection\n");
    let mut ecdf = None;
    for (i, r0) in grid.values().into_iter().enumerate() {
        if do_quad {
            let v = quadrature_value(&domain, &conn, r0, tol, pairs, ctx.seed, &mut ecdf)
                .map_err(numeric)?;
            s.push_str(&format!(
                "{},{},{},quadrature,{domain},{conn}\n",
                fmt_g17(r0),
                fmt_g17(v * scale),
                fmt_g17(0.0)
            ));
        }
        if do_mc {
            let est = entropy::entropy_per_edge_mc(&domain, &conn, r0, pairs, row_seed(ctx.seed, i))
                .map_err(|e| numeric(e.into()))?;
            s.push_str(&format!(
                "{},{},{},monte-carlo,{domain},{conn}\n",
                fmt_g17(r0),
                fmt_g17(est.value * scale),
                fmt_g17(est.std_error * scale)
            ));
        }
    }
    write_output(ctx, &s, Some("'FILE' using 1:2 with lines title 'entropy'"))
        .map_err(numeric)?;
    Ok(())
}

fn cmd_asym(ctx: &Ctx, a: &AsymArgs) -> std::result::Result<(), RunError> {
    let domain: Domain = ctx
        .cfg
        .resolve_required(a.domain, "domain")
        .map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let eta = match conn {
        ConnectionFunction::Rayleigh { eta } => eta,
        _ => {
            return Err(usage(anyhow!(
                "asym needs a rayleigh connection (closed forms are derived for it)"
            )))
        }
    };
    let grid: R0Grid = ctx.cfg.resolve_required(a.r0, "r0").map_err(usage)?;
    let pairs = ctx.cfg.resolve(a.pairs, "pairs", 400_000).map_err(usage)?;
    let tol = ctx.cfg.resolve(a.tol, "tol", 1e-11).map_err(usage)?;
    let d = domain.dim();

    // moments once per run; closed forms where possible
    let moments = if domain.has_closed_form_density() {
        asymptotics::domain_moments(&domain, eta, &EstimationMethod::Quadrature { tol })
    } else {
        asymptotics::domain_moments(
            &domain,
            eta,
            &EstimationMethod::MonteCarlo {
                n_pairs: pairs,
                seed: ctx.seed ^ 0xa5,
            },
        )
    }
    .map_err(|e| numeric(e.into()))?;
    // Theorem-style constants assume the leading density coefficient of a
    // unit-volume domain; rescale by 1/volume for the others
    let vol_scale = 1.0 / domain.volume();
    let second_supported = domain.small_r_coeffs().valid;

    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=asym domain={domain} conn={conn} r0={grid} pairs={pairs} tol={tol} seed={}\n",
        ctx.seed
    ));
    s.push_str("r0,quadrature,leading,second_order,large_r0\n");
    let mut ecdf = None;
    for r0 in grid.values() {
        let quad = quadrature_value(&domain, &conn, r0, tol, pairs, ctx.seed, &mut ecdf)
            .map_err(numeric)?;
        let leading = asymptotics::small_r0_leading(d, eta, r0)
            .map_err(|e| numeric(e.into()))?
            .value
            * vol_scale;
        let second = if second_supported {
            asymptotics::small_r0_second_order(&domain, eta, r0)
                .map_err(|e| numeric(e.into()))?
                .value
        } else {
            f64::NAN
        };
        let large = asymptotics::large_r0(&domain, eta, r0, &moments)
            .map_err(|e| numeric(e.into()))?
            .value;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r0),
            fmt_g17(quad),
            fmt_g17(leading),
            fmt_g17(second),
            fmt_g17(large)
        ));
    }
    write_output(
        ctx,
        &s,
        Some("'FILE' using 1:2 title 'quadrature', 'FILE' using 1:3 title 'leading'"),
    )
    .map_err(numeric)?;
    Ok(())
}

fn cmd_mass(ctx: &Ctx, a: &MassArgs) -> std::result::Result<(), RunError> {
    let domain: Domain = ctx
        .cfg
        .resolve_required(a.domain, "domain")
        .map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let r0 = ctx.cfg.resolve_required(a.r0, "r0").map_err(usage)?;
    let grid = ctx
        .cfg
        .resolve(a.grid.clone(), "grid", "64x64".to_string())
        .map_err(usage)?;
    let budget = ctx.cfg.resolve(a.budget, "budget", 10_000).map_err(usage)?;
    let (nx, ny) = grid
        .split_once('x')
        .and_then(|(x, y)| Some((x.parse::<usize>().ok()?, y.parse::<usize>().ok()?)))
        .ok_or_else(|| usage(anyhow!("grid must be NXxNY, got '{grid}'")))?;

    let map = mass::mass_map(&domain, &conn, r0, nx, ny, budget, ctx.seed)
        .map_err(|e| numeric(e.into()))?;
    let comment = format!(
        "cmd=mass domain={domain} conn={conn} r0={r0} grid={nx}x{ny} budget={budget} seed={}",
        ctx.seed
    );
    if ctx.out == "-" {
        let mut buf = Vec::new();
        map.write_csv(&mut buf, Some(&comment))
            .map_err(|e| numeric(e.into()))?;
        std::io::stdout()
            .write_all(&buf)
            .map_err(|e| numeric(e.into()))?;
        return Ok(());
    }
    let base = ctx.out.clone();
    let mut buf = Vec::new();
    map.write_csv(&mut buf, Some(&comment))
        .map_err(|e| numeric(e.into()))?;
    std::fs::write(format!("{base}.csv"), buf).map_err(|e| numeric(e.into()))?;
    map.write_pgm(std::path::Path::new(&format!("{base}.pgm")))
        .map_err(|e| numeric(e.into()))?;
    Ok(())
}

fn cmd_wedge(ctx: &Ctx, a: &WedgeArgs) -> std::result::Result<(), RunError> {
    let theta = ctx
        .cfg
        .resolve(a.theta, "theta", std::f64::consts::FRAC_PI_4)
        .map_err(usage)?;
    let radius = ctx.cfg.resolve(a.radius, "radius", 1.0).map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let r0 = ctx.cfg.resolve(a.r0, "r0", 0.05).map_err(usage)?;
    let omega = ctx.cfg.resolve(a.omega, "omega", theta / 2.0).map_err(usage)?;
    let rgrid: R0Grid = ctx
        .cfg
        .resolve(a.r, "r", "0.01:0.04:3:log".parse().unwrap())
        .map_err(usage)?;
    let tol = ctx.cfg.resolve(a.tol, "tol", 1e-11).map_err(usage)?;

    let domain = Domain::wedge(theta, radius).map_err(|e| usage(e.into()))?;
    let moments = mass::rho_moments(&conn, r0).map_err(|e| numeric(e.into()))?;

    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=wedge theta={theta} radius={radius} conn={conn} r0={r0} omega={omega} r={rgrid} tol={tol} seed={}\n",
        ctx.seed
    ));
    s.push_str("r,omega,leading,quadrature,abs_residual\n");
    for r in rgrid.values() {
        let wp = WedgePoint::new(r, omega, theta).map_err(|e| usage(e.into()))?;
        let lead = mass::wedge_mass_leading(&wp, &moments);
        let x = [r * omega.cos(), r * omega.sin(), 0.0];
        let quad = mass::entropy_mass(&domain, &conn, r0, x, &MassMethod::Quadrature { tol })
            .map_err(|e| numeric(e.into()))?;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r),
            fmt_g17(omega),
            fmt_g17(lead),
            fmt_g17(quad),
            fmt_g17((quad - lead).abs())
        ));
    }
    write_output(ctx, &s, Some("'FILE' using 1:5 with linespoints title 'residual'"))
        .map_err(numeric)?;
    Ok(())
}

fn cmd_cantor(ctx: &Ctx, a: &CantorArgs) -> std::result::Result<(), RunError> {
    let alpha = ctx.cfg.resolve(a.alpha, "alpha", 3.0).map_err(usage)?;
    let depth = ctx.cfg.resolve(a.depth, "depth", 64).map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let grid: R0Grid = ctx
        .cfg
        .resolve(a.r0, "r0", "0.001:0.1:40:log".parse().unwrap())
        .map_err(usage)?;
    let pairs = ctx.cfg.resolve(a.pairs, "pairs", 200_000).map_err(usage)?;
    let modes = ctx.cfg.resolve(a.modes, "modes", 50).map_err(usage)?;
    let spec = CantorSpec::new(alpha, depth).map_err(|e| usage(e.into()))?;

    if let Some(path) = &a.odd_moments_out {
        let odd_pairs = ctx
            .cfg
            .resolve(a.odd_pairs, "odd_pairs", 1_000_000)
            .map_err(usage)?;
        let table = cantor::OddMomentTable::compute(&spec, 79, odd_pairs, ctx.seed ^ 0x0dd)
            .map_err(|e| numeric(e.into()))?;
        let mut buf = Vec::new();
        table.write_csv(&mut buf).map_err(|e| numeric(e.into()))?;
        std::fs::write(path, buf).map_err(|e| numeric(e.into()))?;
    }

    let mut series = cantor::CantorSeries::build(&spec, &conn, modes, 1e-10)
        .map_err(|e| numeric(e.into()))?;
    series
        .calibrate(&spec, &conn, 1e-2, pairs.max(100_000), ctx.seed ^ 0xca)
        .map_err(|e| numeric(e.into()))?;

    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=cantor alpha={alpha} depth={depth} conn={conn} r0={grid} pairs={pairs} modes={modes} sign={} seed={}\n",
        series.sign, ctx.seed
    ));
    s.push_str("r0,mc_value,mc_stderr,series_value,series_err_bound\n");
    for (i, r0) in grid.values().into_iter().enumerate() {
        let mc = cantor::cantor_entropy_mc(&spec, &conn, r0, pairs, row_seed(ctx.seed, i))
            .map_err(|e| numeric(e.into()))?;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r0),
            fmt_g17(mc.estimate.value),
            fmt_g17(mc.estimate.std_error),
            fmt_g17(series.eval(r0)),
            fmt_g17(series.error_bound(r0))
        ));
    }
    write_output(
        ctx,
        &s,
        Some("'FILE' using 1:2 title 'mc', 'FILE' using 1:4 with lines title 'series'"),
    )
    .map_err(numeric)?;
    Ok(())
}

fn cmd_compress(ctx: &Ctx, a: &CompressArgs) -> std::result::Result<(), RunError> {
    let domain: Domain = ctx
        .cfg
        .resolve_required(a.domain, "domain")
        .map_err(usage)?;
    let conn: ConnectionFunction = ctx.cfg.resolve_required(a.conn, "conn").map_err(usage)?;
    let grid: R0Grid = ctx.cfg.resolve_required(a.r0, "r0").map_err(usage)?;
    let method = ctx
        .cfg
        .resolve(a.method.clone(), "method", "quadrature".to_string())
        .map_err(usage)?;
    let pairs = ctx.cfg.resolve(a.pairs, "pairs", 400_000).map_err(usage)?;
    let tol = ctx.cfg.resolve(a.tol, "tol", 1e-12).map_err(usage)?;

    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=compress domain={domain} conn={conn} r0={grid} method={method} pairs={pairs} tol={tol} seed={}\n",
        ctx.seed
    ));
    s.push_str("r0,delta_c,pbar,h2_pbar,hbar\n");
    for (i, r0) in grid.values().into_iter().enumerate() {
        let est = match method.as_str() {
            "quadrature" => EstimationMethod::Quadrature { tol },
            "mc" => EstimationMethod::MonteCarlo {
                n_pairs: pairs,
                seed: row_seed(ctx.seed, i),
            },
            other => return Err(usage(anyhow!("method must be quadrature or mc, got '{other}'"))),
        };
        let dc = entropy::compressibility_difference(&domain, &conn, r0, &est)
            .map_err(|e| numeric(e.into()))?;
        let (pbar, qbar, _) = entropy::mean_connection_pq(&domain, &conn, r0, &est)
            .map_err(|e| numeric(e.into()))?;
        let h2p = srgg_entropy::connect::binary_entropy_pq(pbar, qbar);
        let hbar = h2p - dc * pbar;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r0),
            fmt_g17(dc),
            fmt_g17(pbar),
            fmt_g17(h2p),
            fmt_g17(hbar)
        ));
    }
    write_output(ctx, &s, Some("'FILE' using 1:2 with lines title 'delta C'"))
        .map_err(numeric)?;
    Ok(())
}

fn cmd_moments(ctx: &Ctx, a: &MomentsArgs) -> std::result::Result<(), RunError> {
    let domain: Domain = ctx
        .cfg
        .resolve_required(a.domain, "domain")
        .map_err(usage)?;
    let eta = ctx.cfg.resolve(a.eta, "eta", 2.0).map_err(usage)?;
    let method = ctx
        .cfg
        .resolve(a.method.clone(), "method", "quadrature".to_string())
        .map_err(usage)?;
    let pairs = ctx.cfg.resolve(a.pairs, "pairs", 1_000_000).map_err(usage)?;
    let est = match method.as_str() {
        "quadrature" => EstimationMethod::Quadrature { tol: 1e-12 },
        "mc" => EstimationMethod::MonteCarlo {
            n_pairs: pairs,
            seed: ctx.seed,
        },
        other => return Err(usage(anyhow!("method must be quadrature or mc, got '{other}'"))),
    };
    let m = asymptotics::domain_moments(&domain, eta, &est).map_err(|e| numeric(e.into()))?;
    let mut s = String::new();
    s.push_str(&format!(
        "# cmd=moments domain={domain} eta={eta} method={method} pairs={pairs} seed={}\n",
        ctx.seed
    ));
    s.push_str("eta,e_r_eta,e_r_eta_log,method\n");
    s.push_str(&format!(
        "{},{},{},{method}\n",
        fmt_g17(eta),
        fmt_g17(m.e_r_eta),
        fmt_g17(m.e_r_eta_log)
    ));
    write_output(ctx, &s, None).map_err(numeric)?;
    Ok(())
}

fn cmd_check(ctx: &Ctx) -> Result<i32> {
    let mut failures = 0;
    let mut report = |name: &str, outcome: Result<()>| {
        match outcome {
            Ok(()) => println!("ok   {name}"),
            Err(e) => {
                failures += 1;
                println!("FAIL {name}: {e:#}");
            }
        }
    };

    report("specfun identities", checks::specfun_identities());
    report("binary entropy sandwich bound", checks::h2_sandwich());
    report("pair densities normalize", checks::densities_normalize());
    report("empirical cdf within DKW band", checks::dkw_band(ctx.seed));
    report("quadrature vs monte-carlo entropy", checks::quad_vs_mc(ctx.seed));
    report("small-r0 asymptote tracks quadrature", checks::theorem1_ratio());
    report("large-r0 expansion tracks quadrature", checks::theorem2_gap());
    report("compressibility diverges as r0 shrinks", checks::compress_direction());
    report("integrability classifier consistent", checks::integrability());
    report("wedge corner mass proportional to angle", checks::wedge_corner());
    report("square mass ratios 1 : 1/2 : 1/4", checks::square_mass_ratios());
    report("cantor pole locations and moments", checks::cantor_moments());
    report("cantor cdf self-similarity", checks::cantor_recursion(ctx.seed));

    Ok(if failures == 0 { 0 } else { 1 })
}

mod checks {
    use super::*;
    use srgg_entropy::connect::binary_entropy;
    use srgg_entropy::specfun;

    fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(anyhow!(msg.into()))
        }
    }

    pub fn specfun_identities() -> Result<()> {
        let pi = std::f64::consts::PI;
        ensure(
            (specfun::gamma(5.0)? - 24.0).abs() < 1e-10,
            "gamma(5) != 24",
        )?;
        ensure(
            (specfun::riemann_zeta(2.0)? - pi * pi / 6.0).abs() < 1e-12,
            "zeta(2) != pi^2/6",
        )?;
        let g = specfun::lower_incomplete_gamma(1.0, 2.0)?;
        ensure((g - (1.0 - (-2.0f64).exp())).abs() < 1e-13, "gamma(1,2)")?;
        let cfg = specfun::SpecFunConfig::default();
        let s = specfun::theorem1_tail_series(2, 2.0, &cfg)?;
        ensure((s - 1.0).abs() < 1e-11, format!("S(2,2) = {s} != 1"))
    }

    pub fn h2_sandwich() -> Result<()> {
        let ln2 = std::f64::consts::LN_2;
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let h = binary_entropy(x)?;
            ensure(h >= 4.0 * ln2 * x * (1.0 - x) - 1e-14, "lower bound")?;
            let ub = std::f64::consts::E * ln2 * (x * (1.0 - x)).powf(1.0 / 4f64.ln());
            ensure(h <= ub + 1e-14, "upper bound")?;
        }
        Ok(())
    }

    pub fn densities_normalize() -> Result<()> {
        for d in [Domain::Interval, Domain::Torus1d, Domain::Square, Domain::Disk] {
            let f = |r: f64| d.pair_distance_density(r).unwrap_or(0.0);
            let total =
                srgg_entropy::quad::integrate(&f, 0.0, d.diameter(), &[1.0], 1e-11, 4000)?.value;
            ensure(
                (total - 1.0).abs() < 1e-9,
                format!("{d} density integrates to {total}"),
            )?;
        }
        Ok(())
    }

    pub fn dkw_band(seed: u64) -> Result<()> {
        let n = 100_000;
        let ecdf = EmpiricalCdf::from_domain(&Domain::Interval, n, seed ^ 0xd)?;
        let eps = EmpiricalCdf::dkw_epsilon(n, 0.99);
        for i in 0..=200 {
            let r = i as f64 / 200.0;
            let exact = 2.0 * r - r * r;
            ensure(
                (ecdf.eval(r) - exact).abs() <= eps,
                format!("DKW violated at r = {r}"),
            )?;
        }
        Ok(())
    }

    pub fn quad_vs_mc(seed: u64) -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        for (i, d) in [Domain::Interval, Domain::Torus1d, Domain::Square, Domain::Disk]
            .into_iter()
            .enumerate()
        {
            let q = entropy::entropy_per_edge_quadrature(&d, &ray, 0.2, 1e-11)?.value;
            let m = entropy::entropy_per_edge_mc(&d, &ray, 0.2, 100_000, seed ^ i as u64)?;
            ensure(
                (q - m.value).abs() <= 3.5 * m.std_error,
                format!("{d}: |{q} - {}| > 3.5 se = {}", m.value, 3.5 * m.std_error),
            )?;
        }
        Ok(())
    }

    pub fn theorem1_ratio() -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        let q = entropy::entropy_per_edge_quadrature(&Domain::Interval, &ray, 1e-2, 1e-13)?.value;
        let lead = asymptotics::small_r0_leading(1, 2.0, 1e-2)?.value;
        ensure(
            (q / lead - 1.0).abs() < 0.05,
            format!("ratio {} at r0=1e-2", q / lead),
        )
    }

    pub fn theorem2_gap() -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        let m = asymptotics::domain_moments(
            &Domain::Interval,
            2.0,
            &EstimationMethod::Quadrature { tol: 1e-12 },
        )?;
        let r0 = 20.0;
        let q = entropy::entropy_per_edge_quadrature(&Domain::Interval, &ray, r0, 1e-13)?.value;
        let a = asymptotics::large_r0(&Domain::Interval, 2.0, r0, &m)?.value;
        ensure(
            (q - a).abs() < 10.0 * r0.ln() / r0.powi(4),
            format!("gap {} at r0=20", (q - a).abs()),
        )
    }

    pub fn compress_direction() -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        let est = EstimationMethod::Quadrature { tol: 1e-12 };
        let a = entropy::compressibility_difference(&Domain::Interval, &ray, 1e-3, &est)?;
        let b = entropy::compressibility_difference(&Domain::Interval, &ray, 1e-2, &est)?;
        let c = entropy::compressibility_difference(&Domain::Interval, &ray, 1e2, &est)?;
        ensure(a > b && b > c, format!("ordering {a} > {b} > {c}"))?;
        ensure(c < 1e-2, format!("large-r0 tail {c}"))
    }

    pub fn integrability() -> Result<()> {
        let cases: [(ConnectionFunction, u32, IntegrabilityClass); 5] = [
            (ConnectionFunction::rayleigh(2.0)?, 3, IntegrabilityClass::ThetaR0PowD),
            (ConnectionFunction::FermiDirac { alpha: 0.0 }, 2, IntegrabilityClass::ThetaR0PowD),
            (ConnectionFunction::power_law(3.0)?, 1, IntegrabilityClass::ThetaR0PowD),
            (ConnectionFunction::power_law(3.0)?, 2, IntegrabilityClass::ThetaR0PowD),
            (ConnectionFunction::power_law(3.0)?, 3, IntegrabilityClass::SuperPolynomial),
        ];
        for (conn, d, expect) in cases {
            let rep = asymptotics::integrability_report(&conn, d)?;
            ensure(rep.class == expect, format!("{conn} d={d}: wrong class"))?;
            ensure(rep.agrees, format!("{conn} d={d}: numeric/analytic disagree"))?;
        }
        Ok(())
    }

    pub fn wedge_corner() -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        let moments = mass::rho_moments(&ray, 0.05)?;
        let quarter = mass::wedge_mass_leading(
            &WedgePoint::new(0.0, 0.0, std::f64::consts::FRAC_PI_4)?,
            &moments,
        );
        let flat = mass::wedge_mass_leading(
            &WedgePoint::new(0.0, 0.0, std::f64::consts::PI)?,
            &moments,
        );
        ensure(
            (quarter / flat - 0.25).abs() < 1e-12,
            format!("angle ratio {}", quarter / flat),
        )?;
        // leading order vs 2D quadrature near the corner
        let domain = Domain::wedge(std::f64::consts::FRAC_PI_4, 1.0)?;
        let wp = WedgePoint::new(0.02, std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_4)?;
        let lead = mass::wedge_mass_leading(&wp, &moments);
        let x = [0.02 * wp.omega.cos(), 0.02 * wp.omega.sin(), 0.0];
        let quad = mass::entropy_mass(&domain, &ray, 0.05, x, &MassMethod::Quadrature { tol: 1e-11 })?;
        ensure(
            (lead - quad).abs() / quad < 0.02,
            format!("leading {lead} vs quadrature {quad}"),
        )
    }

    pub fn square_mass_ratios() -> Result<()> {
        let ray = ConnectionFunction::rayleigh(2.0)?;
        let m = MassMethod::Quadrature { tol: 1e-10 };
        let center = mass::entropy_mass(&Domain::Square, &ray, 0.02, [0.5, 0.5, 0.0], &m)?;
        let edge = mass::entropy_mass(&Domain::Square, &ray, 0.02, [0.5, 0.0, 0.0], &m)?;
        let corner = mass::entropy_mass(&Domain::Square, &ray, 0.02, [0.0, 0.0, 0.0], &m)?;
        ensure(
            (edge / center - 0.5).abs() < 0.025,
            format!("edge/center = {}", edge / center),
        )?;
        ensure(
            (corner / center - 0.25).abs() < 0.0125,
            format!("corner/center = {}", corner / center),
        )
    }

    pub fn cantor_moments() -> Result<()> {
        let spec = CantorSpec::new(3.0, 64)?;
        let d = spec.hausdorff_d();
        let ln_a = 3f64.ln();
        for m in 0..50 {
            // |2 α^{-s_m} - 1| with s_m = d + 2πi m / log α
            let t = 2.0 * std::f64::consts::PI * m as f64 / ln_a;
            let mag = 2.0 * (-d * ln_a).exp();
            let re = mag * (t * ln_a).cos() - 1.0;
            let im = -mag * (t * ln_a).sin();
            let resid = re.hypot(im);
            ensure(resid < 1e-12, format!("pole {m} residual {resid}"))?;
        }
        ensure(
            (cantor::cantor_even_moment(&spec, 1) - 0.125).abs() < 1e-12,
            "C[F;2] != 1/8",
        )
    }

    pub fn cantor_recursion(seed: u64) -> Result<()> {
        let spec = CantorSpec::new(3.0, 64)?;
        let n = 100_000;
        let dev = cantor::cdf_recursion_check(&spec, n, seed ^ 0xcc)?;
        let band = 3.0 * EmpiricalCdf::dkw_epsilon(n, 0.99);
        ensure(dev <= band, format!("recursion defect {dev} > {band}"))
    }
}
