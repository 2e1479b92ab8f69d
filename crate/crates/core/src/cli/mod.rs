//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input or domain error, 2 the metric or
//! profile is outside the requested case or a residual exceeds `--tol`.

pub mod expr;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::jetcalc::{DiffMode, FdStep, DEFAULT_JET_FD_STEP};
use crate::normalform::{
    conservation_check, geometric_fields, random_chart_points, roundtrip, verify_structure,
    write_normal_form_csv, CurvatureCase, ProfileFunctions,
};
use crate::sigma_chart::{form_step, residual_report, write_residual_csv};
use crate::spherical::{builtin, extract_profiles, write_profile_csv, SphericalMetric};

use expr::{ExprPhi, ExprProfile};

/// `min:max:count` grid of `z = 2t - s^2` values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ZGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

impl FromStr for ZGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid `{s}` must look like min:max:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let g = ZGrid { min, max, count };
        if count < 2 {
            return Err(Error::Config(format!("grid `{s}` needs count >= 2")));
        }
        if !(0.0 < min && min < max && max.is_finite()) {
            return Err(Error::Config(format!("grid `{s}` needs 0 < min < max")));
        }
        Ok(g)
    }
}

/// `min:max` range of `a` values for normal-form sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ARange(pub f64, pub f64);

impl FromStr for ARange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("range `{s}` must look like min:max with min <= max"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        if !(lo <= hi) {
            return Err(bad());
        }
        Ok(ARange(lo, hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Jet,
    Fd,
}

/// Settings shared by the subcommands after validation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Built-in name or an expression in `t` and `s`.
    pub metric: String,
    /// Domain radius for expression metrics.
    pub mu: f64,
    pub k: Option<f64>,
    pub case: Option<CurvatureCase>,
    pub scale: f64,
    pub z: ZGrid,
    pub mode: DiffMode,
    /// Step for the finite differences the command performs itself.
    pub h: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    pub points: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn validate(self) -> Result<Self> {
        if !(self.scale != 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("--scale must be non-zero, got {}", self.scale)));
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("--h must be positive, got {h}")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("--tol must be positive, got {}", self.tol)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Config(format!("--mu must be positive, got {}", self.mu)));
        }
        Ok(self)
    }
}

#[derive(Parser, Debug)]
#[command(name = "finsler", version, about = "Invariants and normal forms of Finsler surfaces with a Killing field")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the profiles u(a), v(a) of a spherically symmetric metric.
    Extract(CommonArgs),
    /// Check the structure equations of a normal form (--case) or of a metric (--metric).
    Verify(CommonArgs),
    /// Reproduce the Funk profiles and compare with their closed forms.
    FunkDemo(DemoArgs),
    /// Structure-equation residuals of a metric at seeded random points.
    Residuals(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Built-in metric (euclid, funk, funk-reversed, klein-sphere) or phi(t,s).
    #[arg(long)]
    metric: Option<String>,
    /// Domain radius for expression metrics.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Target curvature 1, 0 or -1.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Multiplier lambda in F = lambda |y| phi(t, s).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    scale: f64,
    /// Level grid lo:hi:n of z = 2t - s^2.
    #[arg(long, default_value = "0.05:0.8:50")]
    z: String,
    /// Normal-form case k1, k0 or k-1.
    #[arg(long, allow_hyphen_values = true)]
    case: Option<String>,
    /// Profile u(a).
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    u: String,
    /// Profile v(a).
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    v: String,
    /// Range of a for normal-form sampling.
    #[arg(long, allow_hyphen_values = true, default_value = "-1:1")]
    a: String,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Jet)]
    mode: ModeArg,
    /// Jet step in fd mode; difference step in verify and residuals.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Jet)]
    mode: ModeArg,
    /// Jet step in fd mode.
    #[arg(long)]
    h: Option<f64>,
    /// Level grid lo:hi:n of z = 2t - s^2.
    #[arg(long, default_value = "0.005:0.8:60")]
    z: String,
    /// Use the reversed Funk metric F(x, -y).
    #[arg(long)]
    reversed: bool,
    /// Normal-form points for the roundtrip check.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional profile CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn diff_mode(mode: ModeArg, h: Option<f64>) -> DiffMode {
    match mode {
        ModeArg::Jet => DiffMode::Jet,
        ModeArg::Fd => DiffMode::FiniteDifference {
            h: h.unwrap_or(DEFAULT_JET_FD_STEP),
        },
    }
}

impl CommonArgs {
    fn config(&self) -> Result<RunConfig> {
        RunConfig {
            metric: self.metric.clone().unwrap_or_default(),
            mu: self.mu,
            k: self.k,
            case: self.case.as_deref().map(str::parse).transpose()?,
            scale: self.scale,
            z: self.z.parse()?,
            mode: diff_mode(self.mode, self.h),
            h: self.h,
            tol: self.tol,
            seed: self.seed,
            points: self.points,
            out: self.out.clone(),
        }
        .validate()
    }
}

/// Resolves a built-in name or parses `phi(t, s)`.
pub fn resolve_metric(spec: &str, mu: f64, mode: DiffMode) -> Result<SphericalMetric> {
    if let Some(m) = builtin::by_name(spec) {
        let m = m.with_mode(mode);
        if spec.starts_with("funk") {
            builtin::validate_funk(&m)?;
        }
        return Ok(m);
    }
    if spec.trim().is_empty() {
        return Err(Error::Config("--metric is required".into()));
    }
    let phi = ExprPhi::parse(spec)?;
    Ok(SphericalMetric::new(spec, Arc::new(phi), mu).with_mode(mode))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn cmd_extract(cfg: &RunConfig) -> Result<i32> {
    let k = cfg
        .k
        .or(cfg.case.map(CurvatureCase::k))
        .ok_or_else(|| Error::Config("--k is required".into()))?;
    let m = resolve_metric(&cfg.metric, cfg.mu, cfg.mode)?;
    let pair = extract_profiles(&m, k, cfg.scale, &cfg.z.values())?;
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &pair)?;
    emit(&cfg.out, &buf)?;
    eprintln!(
        "{}: {} levels, measured K = {:.9} (spread {:.1e}), representative gap {:.1e}",
        m.name,
        pair.rows.len(),
        pair.k_mean,
        pair.k_spread,
        pair.representative_gap
    );
    Ok(0)
}

fn cmd_verify_normal_form(cfg: &RunConfig, case: CurvatureCase, args: &CommonArgs) -> Result<i32> {
    let prof = ProfileFunctions::new(
        Arc::new(ExprProfile::parse(&args.u)?),
        Arc::new(ExprProfile::parse(&args.v)?),
    );
    let ARange(lo, hi) = args.a.parse()?;
    let step = FdStep::with_h(cfg.h.unwrap_or(FdStep::default().h));
    let points = random_chart_points(cfg.points, cfg.seed, lo, hi);
    let mut structure = 0.0f64;
    let mut conservation = 0.0f64;
    let mut geometric = 0.0f64;
    for p in &points {
        structure = structure.max(verify_structure(case, &prof, *p, step)?.max());
        conservation = conservation.max(conservation_check(case, &prof, *p)?.max());
        geometric = geometric.max(geometric_fields(case, &prof, *p)?.max_deviation());
    }
    let mut buf = Vec::new();
    write_normal_form_csv(&mut buf, case, &prof, &points)?;
    emit(&cfg.out, &buf)?;
    let worst = structure.max(conservation).max(geometric);
    eprintln!(
        "case {case}: {} points, structure {structure:.2e}, conservation {conservation:.2e}, \
         geometric {geometric:.2e}, tol {:.1e}",
        points.len(),
        cfg.tol
    );
    Ok(if worst <= cfg.tol { 0 } else { 2 })
}

fn cmd_residuals(cfg: &RunConfig) -> Result<i32> {
    let m = resolve_metric(&cfg.metric, cfg.mu, cfg.mode)?.with_scale(cfg.scale);
    let step = cfg.h.map(FdStep::with_h).unwrap_or_else(|| form_step(cfg.mode));
    let rows = residual_report(&m, cfg.points, cfg.seed, step)?;
    let mut buf = Vec::new();
    write_residual_csv(&mut buf, cfg.seed, &rows)?;
    emit(&cfg.out, &buf)?;
    let worst = rows
        .iter()
        .flat_map(|r| r.r)
        .fold(0.0f64, f64::max);
    let (kmin, kmax) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.k), h.max(r.k)));
    eprintln!(
        "{}: {} points, max residual {worst:.2e}, K in [{kmin:.9}, {kmax:.9}], tol {:.1e}",
        m.name,
        rows.len(),
        cfg.tol
    );
    Ok(if worst <= cfg.tol { 0 } else { 2 })
}

fn cmd_funk_demo(args: &DemoArgs) -> Result<i32> {
    let mode = diff_mode(args.mode, args.h);
    let grid: ZGrid = args.z.parse()?;
    let name = if args.reversed { "funk-reversed" } else { "funk" };
    let m = resolve_metric(name, 1.0, mode)?;
    let report = roundtrip(CurvatureCase::NegativeOne, &m, 0.5, &grid.values(), args.points, args.seed)?;
    let (du, dv) = report
        .funk_deviation
        .ok_or_else(|| Error::Config("closed-form comparison unavailable".into()))?;
    let tol = match mode {
        DiffMode::Jet => 1e-6,
        DiffMode::FiniteDifference { .. } => 1e-4,
    };
    let (a, _, _) = report.profiles.by_a();
    let verdict = |d: f64| if d <= tol { "ok" } else { "FAIL" };
    println!("metric               {name}, scale 0.5, K = -1");
    println!(
        "grid                 {} levels, a in [{:.4}, {:.4}]",
        a.len(),
        a[0],
        a[a.len() - 1]
    );
    println!("measured K           {:.9} (spread {:.1e})", report.profiles.k_mean, report.profiles.k_spread);
    println!("max |u - sqrt(1+4a^2)|    {du:.3e}  {}", verdict(du));
    println!("max |v + 3a/(1+4a^2)|     {dv:.3e}  {}", verdict(dv));
    println!("roundtrip structure       {:.3e}", report.structure_max);
    println!("roundtrip conservation    {:.3e}", report.conservation_max);
    println!("roundtrip geometric       {:.3e}", report.geometric_max);
    if dv > tol {
        let flipped = report
            .profiles
            .rows
            .iter()
            .map(|r| (r.v - 3.0 * r.a / (1.0 + 4.0 * r.a * r.a)).abs())
            .fold(0.0f64, f64::max);
        eprintln!(
            "note: v differs from -3a/(1+4a^2); max |v - 3a/(1+4a^2)| = {flipped:.3e}. \
             The reversed metric (--reversed) has the opposite sign of v."
        );
    }
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &report.profiles)?;
        fs::write(path, buf)?;
    }
    Ok(if du <= tol && dv <= tol { 0 } else { 2 })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Extract(args) => cmd_extract(&args.config()?),
        Command::Verify(args) => {
            let cfg = args.config()?;
            match cfg.case {
                Some(case) => cmd_verify_normal_form(&cfg, case, &args),
                None => cmd_residuals(&cfg),
            }
        }
        Command::Residuals(args) => cmd_residuals(&args.config()?),
        Command::FunkDemo(args) => cmd_funk_demo(&args),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_case_failure() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: ZGrid = "0.05:0.8:4".parse().unwrap();
        assert_eq!(g.values().len(), 4);
        assert_eq!(g.values()[3], 0.8);
        for bad in ["0.05:0.8", "0:0.8:5", "0.5:0.4:5", "0.1:0.2:1", "a:b:c"] {
            assert!(bad.parse::<ZGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn zero_scale_is_rejected() {
        let cfg = RunConfig {
            metric: "euclid".into(),
            mu: 1.0,
            k: Some(0.0),
            case: None,
            scale: 0.0,
            z: "0.1:0.2:3".parse().unwrap(),
            mode: DiffMode::Jet,
            h: None,
            tol: 1e-5,
            seed: 0,
            points: 1,
            out: None,
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
