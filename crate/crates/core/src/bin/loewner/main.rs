//! `loewner`: batch front end for the Loewner evolution kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner::herglotz::{format_complex, parse_complex};
use loewner::stochastic::{Closure, GrowthSpec, SdeScheme};
use loewner::{HerglotzSpec, LoewnerError};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "loewner",
    version,
    about = "Loewner evolution in the unit disk with a rotating or Brownian attracting point",
    after_help = "Every subcommand accepts --config FILE (TOML or JSON, keys named like the long flags; \
                  a run manifest may be passed directly) and --manifest FILE. Flags given on the command \
                  line override values from the file.\n\nExit codes: 0 success, 1 numerical failure or \
                  invariant violation, 2 usage error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory φ_t(z0) (or Ψ_t(z0) for --mode sde).
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "CSV (--out or stdout): header `t,re,im,frame`; one row per sample time; frame is `phi` \
                      for det/random and `psi` (= φ_t/τ(t)) for sde. Samples lie on the grid 0, dt, 2dt, …, t-end."
    )]
    Evolve(EvolveArgs),
    /// Classify the semigroup generated by p̃ = A(1+z)/(1−z) + Bi and rotation rate k.
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "JSON on stdout: {\"kind\", \"D\", \"fixed_point\"?: {\"re\",\"im\"}, \"closed\"?, \"ratio\"?, \
                      \"ratio_value\"?, \"period\"?, \"reason\"?}. For a --spec without automorphism data only \
                      kind (elliptic | non-elliptic) and fixed_point are reported."
    )]
    Classify(ClassifyArgs),
    /// Solve the truncated moment hierarchy μ_m(t) = E Ψ_t(z)^m.
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "CSV (--out or stdout): header `t,m,re,im`; rows grouped by t, then m = 1..M."
    )]
    Moments(MomentsArgs),
    /// Growth bounds on |φ_t(z)| for |z| = r0, optionally checked on sampled paths.
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "JSON (--out or stdout): {\"spec\", \"r0\", \"t\", \"lower\", \"upper\", \"paths_checked\", \
                      \"max_violation\"}. The lower bound is clamped at 0. With --paths N > 0 every grid time \
                      of N Brownian paths is checked; any violation exits 1."
    )]
    Bounds(BoundsArgs),
    /// Simulate the boundary diffusion dΘ = −2(B + |p̃(0)| sin Θ) dt − k dB.
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "CSV (--out or stdout): header `t,B,theta`; theta reported mod 2π."
    )]
    Boundary(BoundaryArgs),
    /// Regenerate figures as SVG plus CSV data and a manifest.
    #[command(
        args_override_self = true,
        allow_negative_numbers = true,
        after_help = "fig1: φ_t(𝔻) for p̃(w) = exp(πw/2), k = 1, at t = π/4, π/2, 3π/4; CSV `j,re,im` per panel \
                      (images of the circle of radius 1 − 1e−6). fig2, fig3: closed orbits φ_t(0) for Cayley \
                      k = 2.5 and p̃ ≡ i, k = 0.5. fig4: a sample path of φ_t(0), Cayley, k = 5, t ≤ 30. \
                      fig5: a sample path of Ψ_t(0), p̃ ≡ i, k = 1, t ≤ 2. Trajectory CSVs use `t,re,im,frame`. \
                      Each panel is checked (simple closed curve inside 𝔻 for fig1, closure for fig2/3, \
                      containment for all); a violation exits 1."
    )]
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// TOML or JSON file of flag values (a run manifest also works).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write a run manifest (JSON) to FILE.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

/// Complex flag value written `re+imi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = LoewnerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(ComplexArg)
    }
}

impl fmt::Display for ComplexArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex(self.0))
    }
}

impl Serialize for ComplexArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// τ(t) = e^{ikt}, adaptive Dormand–Prince.
    Det,
    /// τ(t) = e^{ikB_t}, pathwise RK4 on the Brownian grid.
    Random,
    /// Ψ_t = φ_t/τ(t) by an SDE scheme on the Brownian grid.
    Sde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Euler,
    Milstein,
}

impl From<Scheme> for SdeScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Euler => SdeScheme::Euler,
            Scheme::Milstein => SdeScheme::Milstein,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureArg {
    Zero,
    Frozen,
}

impl From<ClosureArg> for Closure {
    fn from(c: ClosureArg) -> Self {
        match c {
            ClosureArg::Zero => Closure::Zero,
            ClosureArg::Frozen => Closure::Frozen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvolveArgs {
    /// Herglotz spec: cayley-linear, cayley, const-i, automorphism:A,B, exponential, taylor:a0,a1,...
    #[arg(long)]
    #[serde(serialize_with = "ser_display")]
    pub spec: HerglotzSpec,
    /// Rotation rate of the attracting point.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Initial point, `re+imi`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z0: ComplexArg,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Sample spacing (also the Brownian grid step and the maximal ODE step).
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = Mode::Det)]
    pub mode: Mode,
    /// SDE scheme for --mode sde.
    #[arg(long, value_enum, default_value_t = Scheme::Milstein)]
    pub scheme: Scheme,
    /// Seed of the Brownian path (random and sde modes).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trajectory CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also plot the trajectory with τ(t-end) marked.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifyArgs {
    /// Re p̃(0) of the automorphism generator.
    #[arg(long = "A", requires = "b", conflicts_with = "spec")]
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Im p̃(0) of the automorphism generator.
    #[arg(long = "B", requires = "a", conflicts_with = "spec")]
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Herglotz spec instead of --A/--B.
    #[arg(long, required_unless_present = "a")]
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_display")]
    pub spec: Option<HerglotzSpec>,
    #[arg(long)]
    pub k: f64,
    /// Also decide whether elliptic orbits close up.
    #[arg(long)]
    pub closed_check: bool,
    /// Largest denominator tried for the rotation ratio.
    #[arg(long, default_value_t = 64)]
    pub max_den: i64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

fn ser_opt_display<T: fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MomentsArgs {
    #[arg(long)]
    #[serde(serialize_with = "ser_display")]
    pub spec: HerglotzSpec,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Initial point, `re+imi`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z0: ComplexArg,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Output time spacing.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Highest moment order M.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Number of moments kept in the hierarchy.
    #[arg(long, default_value_t = 32)]
    pub truncation: usize,
    #[arg(long, value_enum, default_value_t = ClosureArg::Zero)]
    pub closure: ClosureArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsArgs {
    /// cayley, cayley-linear or one.
    #[arg(long)]
    #[serde(serialize_with = "ser_display_growth")]
    pub spec: GrowthSpec,
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    #[arg(long)]
    pub t: f64,
    /// Number of Brownian paths to check the bounds on.
    #[arg(long, default_value_t = 0)]
    pub paths: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Argument of the initial point r0·e^{i theta0}.
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Root seed; path j uses a seed derived from (seed, j).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

fn ser_display_growth<S: Serializer>(v: &GrowthSpec, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.as_str())
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundaryArgs {
    #[arg(long = "A", default_value_t = 1.0)]
    #[serde(rename = "A")]
    pub a: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    #[serde(rename = "B")]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FiguresArgs {
    #[arg(long, value_enum)]
    pub which: Figure,
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Boundary points per fig1 panel.
    #[arg(long, default_value_t = 720)]
    pub n_points: usize,
    /// Seed of the Brownian paths in fig4 and fig5.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<LoewnerError> for CliError {
    fn from(e: LoewnerError) -> Self {
        match e {
            LoewnerError::InvalidArgument(_) | LoewnerError::Parse(_) | LoewnerError::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct SeedInfo {
    pub seed: u64,
    pub algorithm_id: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
}

/// Record of one run: enough to reproduce every CSV it wrote.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<SeedInfo>,
    pub outputs: Vec<OutputFile>,
    pub tool_version: String,
    pub wall_time_s: f64,
}

/// What a command produced.
pub struct RunOutcome {
    pub seed: Option<SeedInfo>,
    pub outputs: Vec<PathBuf>,
    /// Manifest location chosen by the command when `--manifest` is absent.
    pub default_manifest: Option<PathBuf>,
}

/// Writes `contents` and records the path.
pub fn write_output(path: &Path, contents: &str, outputs: &mut Vec<PathBuf>) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    outputs.push(path.to_path_buf());
    Ok(())
}

fn write_manifest(
    path: &Path,
    command: &str,
    config: serde_json::Value,
    outcome: &RunOutcome,
    started: Instant,
) -> CliResult<()> {
    let mut outputs = Vec::new();
    for p in &outcome.outputs {
        let bytes = std::fs::metadata(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?.len();
        if bytes == 0 {
            return Err(CliError::Invariant(format!("output {} is empty", p.display())));
        }
        outputs.push(OutputFile { path: p.display().to_string(), bytes });
    }
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        command: command.to_owned(),
        config,
        seed: outcome.seed.clone(),
        outputs,
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    let mut sink = Vec::new();
    write_output(path, &(text + "\n"), &mut sink)
}

fn run(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    let to_value = |v: Result<serde_json::Value, serde_json::Error>| v.map_err(|e| CliError::Io(e.to_string()));
    let (name, config, common, outcome) = match &cli.command {
        Command::Evolve(a) => ("evolve", to_value(serde_json::to_value(a))?, &a.common, commands::evolve(a)?),
        Command::Classify(a) => ("classify", to_value(serde_json::to_value(a))?, &a.common, commands::classify(a)?),
        Command::Moments(a) => ("moments", to_value(serde_json::to_value(a))?, &a.common, commands::moments(a)?),
        Command::Bounds(a) => ("bounds", to_value(serde_json::to_value(a))?, &a.common, commands::bounds(a)?),
        Command::Boundary(a) => ("boundary", to_value(serde_json::to_value(a))?, &a.common, commands::boundary(a)?),
        Command::Figures(a) => ("figures", to_value(serde_json::to_value(a))?, &a.common, commands::figures(a)?),
    };
    if let Some(path) = common.manifest.clone().or_else(|| outcome.default_manifest.clone()) {
        write_manifest(&path, name, config, &outcome, started)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
