//! Command-line driver: certificates, invariant densities, parameter sweeps,
//! Lasota–Yorke checks, orbit statistics and the 1D oracle.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pfo2d::density::{
    build_ulam, cesaro_fixed_density, ulam_fixed, CoarsenPolicy, PiecewisePolyDensity,
};
use pfo2d::experiments::{
    ly_check, orbit_stats, random_interior_point, stability_sweep, tent1d_ulam, SweepOptions,
    TestFunction,
};
use pfo2d::maps::{
    certify, make_tent2d, power, tau, tent_left_domain, tent_region, NormConvention,
};
use pfo2d::output::{density_csv, fmt_f64, ly_csv, matrix_csv, orbit_csv, sweep_csv, write_atomic};
use pfo2d::svg::SvgHeatmap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid --{flag}: {message}")]
    Config { flag: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] pfo2d::Error),

    #[error("could not serialize output: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CliError {
    fn config(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Config {
            flag,
            message: message.into(),
        }
    }

    /// 2 for a run that finished without converging, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(pfo2d::Error::NoConvergence { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pfo2d",
    version,
    about = "Transfer operators and invariant densities of the 2D tent family",
    long_about = "Transfer operators and invariant densities of the two-dimensional tent family \
                  Λ_t on the triangle T = (0,0),(2,0),(1,1), t ∈ [τ, 1].\n\n\
                  Exit status: 0 on success, 2 when an iteration stopped before reaching its \
                  tolerance (outputs are still written, with residuals), 1 on invalid input."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the expanding-map constants of Λ_tⁿ (σ, β, ρ, λ, K, K₁) and print
    /// them as JSON, one certificate per norm convention.
    Verify(VerifyArgs),
    /// Invariant density of Λ_tⁿ, by Ulam discretization or by Cesàro averages
    /// of the exact transfer operator; written as CSV or an SVG heatmap.
    Density(DensityArgs),
    /// Statistical stability: L¹ distance and moment gaps between the
    /// invariant density at t and at a reference t0, over a grid of t.
    Sweep(SweepArgs),
    /// Lasota–Yorke check: exact variation of Pʲf against λʲV(f) + K₁‖f‖₁.
    Lycheck(LyArgs),
    /// Birkhoff averages of the monomials 1, x, y, x², xy, y² and the Lyapunov
    /// exponent along seeded random orbits.
    Orbit(OrbitArgs),
    /// Ulam matrix and fixed density of the 1D tent map x ↦ 1 - a|x| on [-1, 1].
    Oracle1d(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Stationary vector of the Ulam matrix.
    Ulam,
    /// Cesàro means of exact pushforwards, projected to the grid each step.
    Cesaro,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitialDensity {
    /// f ≡ 1 on T.
    Uniform,
    /// f = 2·χ of the left half of T.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Spectral norm of the composed inverse derivative.
    Spectral,
    /// Largest entry of the composed inverse derivative.
    Maxentry,
    /// Product of per-step max-entry bounds (serialized as PaperFormula).
    #[value(alias = "paper")]
    Stepwise,
}

impl From<Convention> for NormConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Spectral => NormConvention::Spectral,
            Convention::Maxentry => NormConvention::MaxEntry,
            Convention::Stepwise => NormConvention::PaperFormula,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Map parameter, 0 < t <= 1 (default τ).
    #[arg(long)]
    pub t: Option<f64>,
    /// Iterate of Λ_t to certify.
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Only this convention (default: all three).
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Map parameter, 0 < t <= 1.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Iterate of Λ_t.
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Grid cells per unit length.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = Method::Ulam)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Stop when the L¹ change per step drops below this. Cesàro residuals
    /// decay like 1/n, so that method needs a much looser value.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Iteration cap (power iteration steps, or Cesàro terms).
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Starting density for the Cesàro method.
    #[arg(long, value_enum, default_value_t = InitialDensity::Uniform)]
    pub init: InitialDensity,
    /// Also write the Ulam matrix as i,j,weight triples.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Reference parameter.
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Smallest parameter, in [τ, 1].
    #[arg(long)]
    pub tmin: f64,
    /// Largest parameter, in [τ, 1].
    #[arg(long)]
    pub tmax: f64,
    /// Number of parameters, evenly spaced from tmin to tmax inclusive.
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Grid cells per unit length (at least 16).
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Use the Ulam operator of Λ_tⁿ (1 or 3 in practice).
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Power-iteration tolerance on the L¹ change per step.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LyArgs {
    /// Map parameter (default τ).
    #[arg(long)]
    pub t: Option<f64>,
    /// Iterate of Λ_t whose transfer operator is checked; the constants are
    /// first certified for it.
    #[arg(long, default_value_t = 3)]
    pub power: usize,
    #[arg(long, value_enum, default_value_t = InitialDensity::Uniform)]
    pub init: InitialDensity,
    /// Largest j (at most 5).
    #[arg(long, default_value_t = 4)]
    pub jmax: usize,
    /// Norm convention whose λ and K₁ enter the bound.
    #[arg(long, value_enum, default_value_t = Convention::Stepwise)]
    pub convention: Convention,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Map parameter, 0 < t <= 1.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Orbit length.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Seed of the first run; run k uses seed + k for its start point,
    /// tangent vector and perturbations.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of independent orbits.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Slope parameter, 1 < a <= 2.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Number of cells of [-1, 1] (even).
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Also write the Ulam matrix as i,j,weight triples.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    /// Output CSV of cell densities (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One-line summary of a finished command and whether every iteration
/// reached its tolerance.
#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub converged: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            2
        }
    }
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, contents.as_bytes())?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn check_t(flag: &'static str, t: f64) -> Result<(), CliError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(CliError::config(flag, format!("{t} is outside (0, 1]")));
    }
    Ok(())
}

fn check_power(p: usize) -> Result<(), CliError> {
    if !(1..=6).contains(&p) {
        return Err(CliError::config("power", format!("{p} is outside 1..=6")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::config("tol", "must be positive"));
    }
    Ok(())
}

fn initial_density(init: InitialDensity) -> Result<PiecewisePolyDensity, CliError> {
    Ok(match init {
        InitialDensity::Uniform => PiecewisePolyDensity::constant(tent_region(), 1.0)?,
        InitialDensity::Left => {
            PiecewisePolyDensity::indicator(tent_region(), &tent_left_domain(), 2.0)?
        }
    })
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Density(a) => density(a),
        Command::Sweep(a) => sweep(a),
        Command::Lycheck(a) => lycheck(a),
        Command::Orbit(a) => orbit(a),
        Command::Oracle1d(a) => oracle1d(a),
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let t = a.t.unwrap_or_else(tau);
    check_t("t", t)?;
    check_power(a.power)?;
    let m = power(&make_tent2d(t)?, a.power)?;
    let conventions: Vec<NormConvention> = match a.convention {
        Some(c) => vec![c.into()],
        None => NormConvention::ALL.to_vec(),
    };
    let certs = conventions
        .into_iter()
        .map(|c| certify(&m, c))
        .collect::<pfo2d::Result<Vec<_>>>()?;
    let mut json = serde_json::to_string_pretty(&certs)?;
    json.push('\n');
    emit(&a.out, &json)?;
    let mut summary = format!("verify t={t} power={}:", a.power);
    for c in &certs {
        let _ = write!(
            summary,
            " {} lambda={:.6} satisfied={}",
            c.norm_convention.as_str(),
            c.lambda,
            c.satisfied
        );
    }
    Ok(Outcome {
        summary,
        converged: true,
    })
}

fn density(a: &DensityArgs) -> Result<Outcome, CliError> {
    check_t("t", a.t)?;
    check_power(a.power)?;
    check_tol(a.tol)?;
    if a.resolution < 2 {
        return Err(CliError::config("resolution", "must be at least 2"));
    }
    if a.format == Format::Json {
        return Err(CliError::config("format", "density supports csv or svg"));
    }
    if a.matrix_out.is_some() && a.method != Method::Ulam {
        return Err(CliError::config(
            "matrix-out",
            "only available with --method ulam",
        ));
    }
    let m = power(&make_tent2d(a.t)?, a.power)?;
    let (h, iterations, residual, converged) = match a.method {
        Method::Ulam => {
            let op = build_ulam(&m, a.resolution)?;
            if let Some(p) = &a.matrix_out {
                write_atomic(p, matrix_csv(&op.matrix).as_bytes())?;
            }
            let fp = ulam_fixed(&op, a.tol, a.max_iter);
            (
                fp.value.to_density(&op.grid)?,
                fp.iterations,
                fp.residual,
                fp.converged,
            )
        }
        Method::Cesaro => {
            let f0 = initial_density(a.init)?;
            let fp = cesaro_fixed_density(
                &m,
                &f0,
                a.max_iter,
                a.tol,
                CoarsenPolicy::ProjectToGrid(a.resolution),
            )?;
            (fp.value, fp.iterations, fp.residual, fp.converged)
        }
    };
    let body = match a.format {
        Format::Svg => SvgHeatmap::from_density(&h)
            .with_title(format!("invariant density, t = {}, power {}", a.t, a.power))
            .render()?,
        _ => density_csv(&h),
    };
    emit(&a.out, &body)?;
    let (lo, hi) = h
        .cells()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.value), hi.max(c.value))
        });
    Ok(Outcome {
        summary: format!(
            "density t={} cells={} range=[{}, {}] iterations={iterations} residual={}",
            a.t,
            h.len(),
            fmt_f64(lo),
            fmt_f64(hi),
            fmt_f64(residual)
        ),
        converged,
    })
}

/// `steps` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|k| {
            if k == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let lo = tau() - 1e-12;
    for (flag, v) in [("t0", a.t0), ("tmin", a.tmin), ("tmax", a.tmax)] {
        if !(v >= lo && v <= 1.0) {
            return Err(CliError::config(
                flag,
                format!("{v} is outside [tau = {}, 1]", tau()),
            ));
        }
    }
    if a.tmin > a.tmax {
        return Err(CliError::config("tmin", "must not exceed --tmax"));
    }
    if a.steps < 1 {
        return Err(CliError::config("steps", "must be at least 1"));
    }
    if a.resolution < 16 {
        return Err(CliError::config("resolution", "sweeps need at least 16"));
    }
    check_power(a.power)?;
    check_tol(a.tol)?;
    let ts = linspace(a.tmin, a.tmax, a.steps);
    let opts = SweepOptions {
        power: a.power,
        resolution: a.resolution,
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let rows = stability_sweep(a.t0, &ts, &opts)?;
    emit(&a.out, &sweep_csv(&rows))?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(Outcome {
        summary: format!(
            "sweep t0={} rows={} max_l1={} max_residual={}",
            a.t0,
            rows.len(),
            fmt_f64(rows.iter().map(|r| r.l1_dist).fold(0.0, f64::max)),
            fmt_f64(worst)
        ),
        converged: rows.iter().all(|r| r.converged),
    })
}

fn lycheck(a: &LyArgs) -> Result<Outcome, CliError> {
    let t = a.t.unwrap_or_else(tau);
    check_t("t", t)?;
    check_power(a.power)?;
    if a.jmax > pfo2d::experiments::LY_MAX_STEPS {
        return Err(CliError::config("jmax", "at most 5"));
    }
    let m = power(&make_tent2d(t)?, a.power)?;
    let convention: NormConvention = a.convention.into();
    let cert = certify(&m, convention)?;
    if !cert.satisfied {
        return Err(CliError::config(
            "convention",
            format!(
                "{} constants are not certified for power {} (lambda = {})",
                convention.as_str(),
                a.power,
                cert.lambda
            ),
        ));
    }
    let f0 = initial_density(a.init)?;
    let rows = ly_check(t, &f0, a.jmax, &cert)?;
    emit(&a.out, &ly_csv(t, convention, &rows))?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(Outcome {
        summary: format!(
            "lycheck t={t} power={} convention={} max_ratio={}",
            a.power,
            convention.as_str(),
            fmt_f64(max_ratio)
        ),
        converged: true,
    })
}

fn orbit(a: &OrbitArgs) -> Result<Outcome, CliError> {
    check_t("t", a.t)?;
    if a.n == 0 {
        return Err(CliError::config("n", "must be at least 1"));
    }
    if a.runs == 0 {
        return Err(CliError::config("runs", "must be at least 1"));
    }
    let region = tent_region();
    let mut rows = Vec::with_capacity(a.runs);
    for k in 0..a.runs as u64 {
        let seed = a.seed.wrapping_add(k);
        let x0 = random_interior_point(&region, &mut ChaCha8Rng::seed_from_u64(seed));
        rows.push(orbit_stats(a.t, &TestFunction::ALL, x0, a.n, seed)?);
    }
    emit(&a.out, &orbit_csv(&rows))?;
    Ok(Outcome {
        summary: format!(
            "orbit t={} runs={} n={} lyapunov={}",
            a.t,
            a.runs,
            a.n,
            fmt_f64(rows[0].lyapunov)
        ),
        converged: true,
    })
}

fn oracle1d(a: &OracleArgs) -> Result<Outcome, CliError> {
    check_tol(a.tol)?;
    let u = tent1d_ulam(a.a, a.resolution, a.tol, a.max_iter).map_err(|e| match e {
        pfo2d::Error::ParameterOutOfRange { name: "a", .. } => {
            CliError::config("a", format!("{} is outside (1, 2]", a.a))
        }
        pfo2d::Error::ParameterOutOfRange { .. } => {
            CliError::config("resolution", "needs an even number of cells, at least 2")
        }
        other => other.into(),
    })?;
    if let Some(p) = &a.matrix_out {
        write_atomic(p, matrix_csv(&u.matrix).as_bytes())?;
    }
    let h = 2.0 / u.n_cells as f64;
    let mut csv = String::from("cell_id,x_left,x_right,value\n");
    for (i, v) in u.fixed_density.value.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{},{}",
            fmt_f64(-1.0 + i as f64 * h),
            fmt_f64(-1.0 + (i + 1) as f64 * h),
            fmt_f64(*v)
        );
    }
    emit(&a.out, &csv)?;
    Ok(Outcome {
        summary: format!(
            "oracle1d a={} cells={} iterations={} residual={}",
            a.a,
            u.n_cells,
            u.fixed_density.iterations,
            fmt_f64(u.fixed_density.residual)
        ),
        converged: u.fixed_density.converged,
    })
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let to_stdout = output_path(&cli.command).is_some();
    match run(&cli.command) {
        Ok(outcome) => {
            if to_stdout {
                println!("{}", outcome.summary);
            } else {
                eprintln!("{}", outcome.summary);
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Verify(a) => a.out.as_deref(),
        Command::Density(a) => a.out.as_deref(),
        Command::Sweep(a) => a.out.as_deref(),
        Command::Lycheck(a) => a.out.as_deref(),
        Command::Orbit(a) => a.out.as_deref(),
        Command::Oracle1d(a) => a.out.as_deref(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_is_inclusive() {
        assert_eq!(linspace(0.9, 0.99, 1), vec![0.9]);
        let v = linspace(0.9, 0.99, 5);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.9);
        assert_eq!(v[4], 0.99);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn invalid_flags_exit_with_1() {
        assert_eq!(
            main_with_args(["pfo2d", "sweep", "--tmin", "0.5", "--tmax", "0.9"]),
            1
        );
        assert_eq!(main_with_args(["pfo2d", "density", "--t", "1.5"]), 1);
        assert_eq!(main_with_args(["pfo2d", "bogus"]), 1);
        assert_eq!(main_with_args(["pfo2d", "--help"]), 0);
    }
}
