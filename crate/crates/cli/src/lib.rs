//! Command-line runner: reads a run configuration, integrates, analyses and
//! writes CSV/JSON artifacts.
//!
//! Every command writes into a staging directory under the output directory
//! and moves the files into place only once all of them were produced, so a
//! failed run leaves no partial output behind.

// `!(x > 0.0)` is the NaN-rejecting form of the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use radial_conformal::asymptotics::AsymptoticsReport;
use radial_conformal::exact::{ExactKind, ExactSolution};
use radial_conformal::harness::{self, Check, Initial, Outcome, Scenario, ShootingSummary, VerificationReport};
use radial_conformal::io::{self, Trajectory};
use radial_conformal::{Calibration, DecayClass, Error, PohozaevReport, RadialSolution, Status};

pub use config::{Format, RunConfig, CONFIG_SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", config_message(.path, .line, .message))]
    Config { path: String, line: Option<usize>, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),
}

fn config_message(path: &str, line: &Option<usize>, message: &str) -> String {
    let mut out = String::from("config error");
    if !path.is_empty() {
        out.push_str(&format!(" at `{path}`"));
    }
    if let Some(l) = line {
        out.push_str(&format!(" (line {l})"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl CliError {
    /// Shooting that never settles is an inconclusive result, not a crash.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Inconclusive(_)) => 3,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Parser)]
#[command(name = "radial-conformal", version, about = "Radial solutions of the conformal scalar curvature equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate and write trajectory.csv / trajectory.json.
    Solve,
    /// Pohozaev forms along the solution: pohozaev.csv / pohozaev.json.
    Pohozaev,
    /// Decay class, completeness and volume: asymptotics.json, omega.csv, length.csv, volume.csv.
    Classify,
    /// Run the configured checks: report.json / report.txt.
    Verify,
    /// Verify once per value of the sweep axis: summary.csv and run-NNN/.
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Solve => "solve",
            Command::Pohozaev => "pohozaev",
            Command::Classify => "classify",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        })
    }
}

/// Flags shared by all commands. Each one can also be set through the
/// environment variable named after it with the `RADIAL_` prefix.
#[derive(Clone, Debug, Default, Args)]
pub struct Options {
    /// Run configuration (TOML).
    #[arg(long, global = true, env = "RADIAL_CONFIG")]
    pub config: Option<PathBuf>,

    /// Previously written trajectory.json to analyse instead of integrating.
    #[arg(long, global = true, env = "RADIAL_TRAJECTORY")]
    pub trajectory: Option<PathBuf>,

    /// Output directory; overrides `outputs.directory`.
    #[arg(long, global = true, env = "RADIAL_OUT")]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "RADIAL_JOBS")]
    pub jobs: Option<usize>,

    /// Relative integration tolerance; overrides `solve.tolerances.rel_tol`.
    #[arg(long, global = true, env = "RADIAL_TOL")]
    pub tol: Option<f64>,

    /// Outer radius; overrides `solve.r_max`.
    #[arg(long, global = true, env = "RADIAL_RMAX")]
    pub rmax: Option<f64>,

    /// Which tabular files to write; overrides `outputs.formats`.
    #[arg(long, global = true, env = "RADIAL_FORMAT", value_enum)]
    pub format: Option<Format>,

    /// Suppress the summary line.
    #[arg(long, global = true, env = "RADIAL_QUIET")]
    pub quiet: bool,
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub line: String,
    pub exit_code: u8,
    pub files: Vec<PathBuf>,
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Pass => 0,
        Outcome::Fail => 2,
        Outcome::Inconclusive => 3,
    }
}

/// Files written atomically into `target` on [`Staging::commit`].
struct Staging {
    dir: tempfile::TempDir,
    target: PathBuf,
    names: Vec<String>,
}

impl Staging {
    fn new(target: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(target).map_err(io_err(target))?;
        let dir = tempfile::Builder::new().prefix(".staging-").tempdir_in(target).map_err(io_err(target))?;
        Ok(Staging { dir, target: target.to_path_buf(), names: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.path().join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, contents).map_err(io_err(&path))?;
        let top = name.split('/').next().unwrap_or(name).to_string();
        if !self.names.contains(&top) {
            self.names.push(top);
        }
        Ok(())
    }

    fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut files = Vec::new();
        for name in &self.names {
            let dest = self.target.join(name);
            if dest.is_dir() {
                fs::remove_dir_all(&dest).map_err(io_err(&dest))?;
            }
            let src = self.dir.path().join(name);
            fs::rename(&src, &dest).map_err(io_err(&dest))?;
            files.push(dest);
        }
        Ok(files)
    }
}

/// Configuration, overrides and inputs resolved for one command.
struct Context {
    config: Option<RunConfig>,
    trajectory: Option<Trajectory>,
    out: PathBuf,
    format: Format,
    tol: Option<f64>,
    rmax: Option<f64>,
}

impl Context {
    fn load(opts: &Options) -> Result<Self, CliError> {
        let config = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                Some(RunConfig::parse(&text)?)
            }
            None => None,
        };
        let trajectory = match &opts.trajectory {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                Some(Trajectory::from_json(&text)?)
            }
            None => None,
        };
        if config.is_none() && trajectory.is_none() {
            return Err(CliError::Usage("either --config or --trajectory is required".into()));
        }
        for (name, v) in [("--tol", opts.tol), ("--rmax", opts.rmax)] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive and finite, got {x}")));
                }
            }
        }
        if opts.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let out = opts
            .out
            .clone()
            .or_else(|| config.as_ref().and_then(|c| c.outputs.directory.clone()))
            .unwrap_or_else(|| PathBuf::from("out"));
        let format = opts.format.or(config.as_ref().map(RunConfig::format)).unwrap_or(Format::Both);
        Ok(Context { config, trajectory, out, format, tol: opts.tol, rmax: opts.rmax })
    }

    fn calibration(&self) -> Calibration {
        self.config.as_ref().map(RunConfig::calibration).unwrap_or_default()
    }

    /// The configured scenario with command-line overrides applied. Without
    /// a configuration the scenario is read off the trajectory.
    fn scenario(&self) -> Result<Scenario, CliError> {
        let mut s = match (&self.config, &self.trajectory) {
            (Some(c), _) => c.scenario(),
            (None, Some(t)) => Scenario {
                name: "trajectory".into(),
                n: t.n,
                profile: t.profile.clone().ok_or_else(|| Error::InvalidArgument(format!("trajectory profile `{}` is not built in", t.profile_name)))?,
                initial: Initial::Height { u0: t.samples.first().map_or(f64::NAN, |s| s[1]) },
                r_max: t.samples.last().map_or(f64::NAN, |s| s[0]),
                tolerances: t.tolerances,
                checks: Vec::new(),
                calibration: Calibration::default(),
            },
            (None, None) => unreachable!("checked in load"),
        };
        if s.checks.is_empty() {
            s.checks = Check::ALL.to_vec();
        }
        if let Some(t) = self.tol {
            s.tolerances.rel_tol = t;
        }
        if let Some(r) = self.rmax {
            s.r_max = r;
        }
        s.validate()?;
        Ok(s)
    }

    fn solution(&self) -> Result<(RadialSolution, Option<ShootingSummary>), CliError> {
        if let Some(t) = &self.trajectory {
            return Ok((t.clone().into_solution(None)?, None));
        }
        let s = self.scenario()?;
        let profile = s.profile.build()?;
        Ok(harness::solve_scenario(&s, &profile)?)
    }

    fn reference(&self) -> Option<ExactKind> {
        self.config.as_ref().and_then(|c| c.problem.reference)
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::ReachedRmax => "reached_rmax",
        Status::CrossedZero(_) => "crossed_zero",
        Status::Overflow(_) => "overflow",
        Status::StepUnderflow(_) => "step_underflow",
    }
}

fn stopped_early(s: Status) -> bool {
    matches!(s, Status::Overflow(_) | Status::StepUnderflow(_))
}

/// `r,u,u_exact,relative_error` against a closed-form solution with `K = K∞`.
fn reference_csv(sol: &RadialSolution, kind: ExactKind) -> Result<String, CliError> {
    let k = sol
        .profile()
        .k_infinity()
        .ok_or_else(|| Error::InvalidArgument("reference solutions need a profile with a limit K∞".into()))?;
    let exact = ExactSolution::from_kind(kind, sol.n(), k)?;
    let mut out = String::from("r,u,u_exact,relative_error\n");
    for p in sol.grid() {
        let u_exact = if p.r == 0.0 && exact.coordinate() == radial_conformal::exact::Coordinate::Radial {
            exact.value(0.0).0
        } else if p.r == 0.0 {
            continue;
        } else {
            exact.radial(p.r).0
        };
        let rel = (p.u - u_exact).abs() / u_exact.abs();
        out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", p.r, p.u, u_exact, rel));
    }
    Ok(out)
}

fn cmd_solve(ctx: &Context, stage: &mut Staging) -> Result<(String, u8), CliError> {
    if ctx.config.is_none() {
        return Err(CliError::Usage("solve needs --config".into()));
    }
    let (sol, shooting) = ctx.solution()?;
    if ctx.format.csv() {
        stage.write("trajectory.csv", &io::trajectory_csv(&sol))?;
        if let Some(kind) = ctx.reference() {
            stage.write("reference.csv", &reference_csv(&sol, kind)?)?;
        }
    }
    if ctx.format.json() {
        stage.write("trajectory.json", &Trajectory::from_solution(&sol).to_json()?)?;
    }
    let mut line = format!(
        "{} samples, r_end {:.6e}, status {}",
        sol.grid().len(),
        sol.range().1,
        status_word(sol.status())
    );
    if let Some(s) = shooting {
        line.push_str(&format!(", threshold u0 {:.12e} after {} steps", s.threshold, s.iterations));
    }
    Ok((line, if stopped_early(sol.status()) { 3 } else { 0 }))
}

fn cmd_pohozaev(ctx: &Context, stage: &mut Staging) -> Result<(String, u8), CliError> {
    let (sol, _) = ctx.solution()?;
    let report = PohozaevReport::compute(&sol, &ctx.calibration())?;
    if ctx.format.csv() {
        stage.write("pohozaev.csv", &io::pohozaev_csv(&report))?;
    }
    if ctx.format.json() {
        stage.write("pohozaev.json", &io::pohozaev_json(&report)?)?;
    }
    let line = format!(
        "P {:.16e} ± {:.3e} ({:?}), identity residual {:.3e}{}",
        report.limit.estimate,
        report.limit.uncertainty,
        report.limit.status,
        report.max_residual,
        if report.identity_holds { "" } else { " EXCEEDS TOLERANCE" }
    );
    let code = if !report.identity_holds {
        2
    } else if report.limit.status != radial_conformal::pohozaev::LimitStatus::Converged || stopped_early(sol.status()) {
        3
    } else {
        0
    };
    Ok((line, code))
}

fn cmd_classify(ctx: &Context, stage: &mut Staging) -> Result<(String, u8), CliError> {
    let (sol, _) = ctx.solution()?;
    let report = AsymptoticsReport::compute(&sol, &ctx.calibration())?;
    if ctx.format.json() {
        stage.write("asymptotics.json", &io::asymptotics_json(&report)?)?;
    }
    if ctx.format.csv() {
        stage.write("omega.csv", &io::omega_csv(&report.omega.samples))?;
        stage.write("length.csv", &io::curve_csv(&report.length_curve))?;
        stage.write("volume.csv", &io::curve_csv(&report.volume_curve))?;
    }
    let kappa = report.decay.kappa.map_or("-".into(), |k| format!("{k:.6}"));
    let line = format!(
        "decay {:?} (κ {kappa}), completeness {:?}, volume {:?}",
        report.decay.class, report.completeness, report.volume_growth
    );
    let code = if report.decay.class == DecayClass::Undetermined || stopped_early(sol.status()) { 3 } else { 0 };
    Ok((line, code))
}

fn write_report(stage: &mut Staging, prefix: &str, format: Format, r: &VerificationReport) -> Result<(), CliError> {
    if format.json() {
        stage.write(&format!("{prefix}report.json"), &r.to_json()?)?;
    }
    stage.write(&format!("{prefix}report.txt"), &r.to_text())?;
    Ok(())
}

fn tally_line(r: &VerificationReport) -> String {
    format!("{} pass, {} fail, {} inconclusive", r.tally.pass, r.tally.fail, r.tally.inconclusive)
}

fn cmd_verify(ctx: &Context, stage: &mut Staging) -> Result<(String, u8), CliError> {
    let s = ctx.scenario()?;
    let report = match &ctx.trajectory {
        Some(t) => harness::verify_solution(&s, &t.clone().into_solution(None)?),
        None => harness::run_scenario(&s)?,
    };
    write_report(stage, "", ctx.format, &report)?;
    Ok((format!("{}: {}", report.scenario, tally_line(&report)), outcome_code(report.verdict())))
}

fn cmd_sweep(ctx: &Context, stage: &mut Staging) -> Result<(String, u8), CliError> {
    let axis = ctx
        .config
        .as_ref()
        .and_then(|c| c.scenario.sweep.clone())
        .ok_or_else(|| CliError::Usage("sweep needs a `scenario.sweep` table in --config".into()))?;
    if ctx.trajectory.is_some() {
        return Err(CliError::Usage("sweep integrates each run and does not take --trajectory".into()));
    }
    let s = ctx.scenario()?;
    let result = harness::sweep(&s, &axis.path, &axis.values)?;
    let width = result.reports.len().saturating_sub(1).to_string().len().max(3);
    for (i, r) in result.reports.iter().enumerate() {
        write_report(stage, &format!("run-{i:0width$}/"), ctx.format, r)?;
    }
    stage.write("summary.csv", &result.summary_csv())?;
    let worst = result.reports.iter().map(VerificationReport::verdict).max().unwrap_or(Outcome::Pass);
    let fails = result.reports.iter().filter(|r| r.verdict() == Outcome::Fail).count();
    let inconclusive = result.reports.iter().filter(|r| r.verdict() == Outcome::Inconclusive).count();
    let line = format!("{} runs over `{}`: {fails} with failures, {inconclusive} inconclusive", result.reports.len(), axis.path);
    Ok((line, outcome_code(worst)))
}

/// Runs one command. Output files appear only if the command succeeds.
pub fn run(command: Command, opts: &Options) -> Result<Summary, CliError> {
    let ctx = Context::load(opts)?;
    let existed = ctx.out.exists();
    let result = execute(command, &ctx, opts.jobs);
    if result.is_err() && !existed {
        // Only succeeds if nothing else was put there meanwhile.
        let _ = fs::remove_dir(&ctx.out);
    }
    result
}

fn execute(command: Command, ctx: &Context, jobs: Option<usize>) -> Result<Summary, CliError> {
    let mut stage = Staging::new(&ctx.out)?;
    let work = |stage: &mut Staging| match command {
        Command::Solve => cmd_solve(ctx, stage),
        Command::Pohozaev => cmd_pohozaev(ctx, stage),
        Command::Classify => cmd_classify(ctx, stage),
        Command::Verify => cmd_verify(ctx, stage),
        Command::Sweep => cmd_sweep(ctx, stage),
    };
    let (line, exit_code) = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| work(&mut stage))?,
        None => work(&mut stage)?,
    };
    let files = stage.commit()?;
    Ok(Summary { line: format!("{command}: {line} -> {}", ctx.out.display()), exit_code, files })
}
