//! Command-line front end for `ftqc-threshold`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 I/O error.

pub mod config;
pub mod manifest;
pub mod output;
pub mod registry;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftqc_threshold::{
    optimal_period_closed_form, optimal_period_numeric, recursive_failure_exact,
    scan_threshold_curve, simulate_failure, threshold_value, BottomMode, CodeParametersF64,
    ScheduleQueryF64, SimulationConfigF64,
};
use serde_json::json;
use thiserror::Error;

use crate::config::{load_code_config, read_code_config_unchecked};
use crate::manifest::{manifest_path, read_manifest, RunManifest};
use crate::output::{scan_csv, scan_svg, sci, simulate_csv, SimulateRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("verification failed")]
    Verification,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Verification => EXIT_VERIFY,
        }
    }
}

impl From<ftqc_threshold::Error> for CliError {
    fn from(e: ftqc_threshold::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ftqc-threshold",
    version,
    about = "Threshold and optimal error-correction period for concatenated codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold value p_th at one (k, r)
    Threshold(ThresholdArgs),
    /// Closed-form and integer optimal error-correction period
    OptimalPeriod(OptimalArgs),
    /// Threshold curves over a range of r, as CSV (and optional SVG)
    Scan(ScanArgs),
    /// Monte Carlo estimate of the top-level failure probability
    Simulate(SimulateArgs),
    /// Run the cross-check suite
    Verify(VerifyArgs),
    /// Built-in code registry
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Re-run a command from its manifest
    Replay {
        /// A `<output>.manifest.json` written by scan or simulate
        manifest: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodesAction {
    List,
}

#[derive(Debug, Clone, Args)]
pub struct CodeSelection {
    /// Built-in code name
    #[arg(long, default_value = "steane", conflicts_with = "code_config")]
    pub code: String,
    /// JSON file with keys name, m, alpha, beta, delta and optional c
    #[arg(long)]
    pub code_config: Option<PathBuf>,
}

impl CodeSelection {
    fn resolve(&self, stderr: &mut dyn Write) -> Result<CodeParametersF64, CliError> {
        let code = match &self.code_config {
            Some(path) => load_code_config(path)?,
            None => registry::lookup(&self.code)
                .map(|e| e.code)
                .ok_or_else(|| CliError::Usage(format!("unknown code `{}`", self.code)))?,
        };
        if let Some(w) = code.model_warning() {
            let _ = writeln!(stderr, "warning: {w}");
        }
        Ok(code)
    }
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub code: CodeSelection,
    /// Concatenation level
    #[arg(long)]
    pub k: u32,
    /// Operations between corrections (>= 1, may be fractional)
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    #[command(flatten)]
    pub code: CodeSelection,
    /// Concatenation level
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub code: CodeSelection,
    /// Comma-separated levels
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub k: Vec<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_step: f64,
    /// CSV output path; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also plot the curves (log-scale p_th) to this SVG file
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BottomModeArg {
    ExactDepth,
    Collapsed,
}

impl From<BottomModeArg> for BottomMode {
    fn from(m: BottomModeArg) -> Self {
        match m {
            BottomModeArg::ExactDepth => BottomMode::ExactDepth,
            BottomModeArg::Collapsed => BottomMode::Collapsed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeSelection,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 7)]
    pub r: u32,
    /// Physical error probability per operation
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "collapsed")]
    pub bottom_mode: BottomModeArg,
    /// CSV output path
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub code: CodeSelection,
    /// Skip the slower checks
    #[arg(long)]
    pub quick: bool,
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let argv = std::iter::once("ftqc-threshold".to_owned()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, &args, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(CliError::Verification) => EXIT_VERIFY,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(
    command: Command,
    args: &[String],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match command {
        Command::Threshold(a) => cmd_threshold(&a, stdout, stderr),
        Command::OptimalPeriod(a) => cmd_optimal_period(&a, stdout, stderr),
        Command::Scan(a) => cmd_scan(&a, args, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(&a, args, stdout, stderr),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Codes {
            action: CodesAction::List,
        } => cmd_codes_list(stdout),
        Command::Replay { manifest } => cmd_replay(&manifest, stdout, stderr),
    }
}

fn check_level(k: u32) -> Result<(), CliError> {
    if !(1..=ftqc_threshold::MAX_LEVEL).contains(&k) {
        return Err(CliError::Usage(format!(
            "--k must satisfy 1 <= k <= {}, got {k}",
            ftqc_threshold::MAX_LEVEL
        )));
    }
    Ok(())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn describe(code: &CodeParametersF64) -> String {
    format!(
        "{} (m={}, c={}, alpha={}, beta={}, delta={})",
        code.name, code.m, code.c, code.alpha, code.beta, code.delta
    )
}

pub fn cmd_threshold(
    a: &ThresholdArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    check_level(a.k)?;
    if !(a.r.is_finite() && a.r >= 1.0) {
        return Err(CliError::Usage(format!(
            "--r must satisfy r >= 1, got {}",
            a.r
        )));
    }
    let code = a.code.resolve(stderr)?;
    let point = threshold_value(&code, &ScheduleQueryF64::new(a.k, a.r)?)?;
    let coupling = code.c * point.depth * point.p_th;
    let regime = if coupling < 1.0 {
        "valid (c*L*p_th < 1)"
    } else {
        "outside perturbative regime (c*L*p_th >= 1)"
    };
    let text = format!(
        "code      {}\nk         {}\nr         {}\ndepth     {}\np_th      {}\nlog_p_th  {}\nc*L*p_th  {}\nregime    {regime}\n",
        describe(&code),
        a.k,
        a.r,
        point.depth,
        sci(point.p_th),
        sci(point.log_p_th),
        sci(coupling),
    );
    emit(stdout, &text)
}

pub fn cmd_optimal_period(
    a: &OptimalArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    check_level(a.k)?;
    let code = a.code.resolve(stderr)?;
    let opt = optimal_period_closed_form(&code, a.k)?;
    let numeric = optimal_period_numeric(&code, a.k, (4.0 * opt.r_continuous).max(10.0))?;
    let text = format!(
        "code                {}\nk                   {}\nr_continuous        {}\nr_numeric           {}\nr_integer           {}\np_th_at_continuous  {}\np_th_at_integer     {}\nconcavity_ok        {}\n",
        describe(&code),
        a.k,
        sci(opt.r_continuous),
        sci(numeric),
        opt.r_integer,
        sci(opt.p_th_at_continuous),
        sci(opt.p_th_at_integer),
        opt.concavity_ok,
    );
    emit(stdout, &text)
}

/// `r_min, r_min + step, ...` up to `r_max`; each value is computed from
/// its index so no rounding accumulates.
pub fn r_grid(r_min: f64, r_max: f64, r_step: f64) -> Result<Vec<f64>, CliError> {
    if !(r_step.is_finite() && r_step > 0.0) {
        return Err(CliError::Usage(format!(
            "--r-step must be > 0, got {r_step}"
        )));
    }
    if !(r_min.is_finite() && r_min > 0.0) {
        return Err(CliError::Usage(format!("--r-min must be > 0, got {r_min}")));
    }
    if !(r_max.is_finite() && r_max >= r_min) {
        return Err(CliError::Usage(format!(
            "--r-max must be >= --r-min, got {r_max} < {r_min}"
        )));
    }
    let steps = ((r_max - r_min) / r_step * (1.0 + 1e-12)).floor();
    if steps > 1e7 {
        return Err(CliError::Usage(
            "scan range has more than 1e7 points".into(),
        ));
    }
    Ok((0..=steps as u64)
        .map(|i| r_min + i as f64 * r_step)
        .collect())
}

pub fn cmd_scan(
    a: &ScanArgs,
    args: &[String],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if a.k.is_empty() {
        return Err(CliError::Usage("--k needs at least one level".into()));
    }
    for &k in &a.k {
        check_level(k)?;
    }
    let rs = r_grid(a.r_min, a.r_max, a.r_step)?;
    let code = a.code.resolve(stderr)?;
    let mut levels = a.k.clone();
    levels.sort_unstable();
    levels.dedup();
    let curves = levels
        .iter()
        .map(|&k| scan_threshold_curve(&code, k, &rs))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = scan_csv(&curves);

    let mut outputs: Vec<&Path> = Vec::new();
    match &a.output {
        Some(path) => {
            write_file(path, &csv)?;
            outputs.push(path);
        }
        None => emit(stdout, &csv)?,
    }
    if let Some(svg) = &a.svg {
        write_file(svg, &scan_svg(&curves))?;
        outputs.push(svg);
    }
    if !outputs.is_empty() {
        let manifest = RunManifest::new(
            "scan",
            args,
            json!({
                "code": code_json(&code),
                "k": levels,
                "r_min": a.r_min,
                "r_max": a.r_max,
                "r_step": a.r_step,
                "rows": rs.len() * levels.len(),
            }),
            None,
            &outputs,
        );
        for path in &outputs {
            write_file(&manifest_path(path), &manifest.to_json())?;
        }
        let _ = writeln!(
            stdout,
            "wrote {} rows to {}",
            rs.len() * levels.len(),
            outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}

fn code_json(code: &CodeParametersF64) -> serde_json::Value {
    json!({
        "name": code.name,
        "m": code.m,
        "alpha": code.alpha,
        "beta": code.beta,
        "delta": code.delta,
        "c": code.c,
    })
}

pub fn cmd_simulate(
    a: &SimulateArgs,
    args: &[String],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    check_level(a.k)?;
    if a.r < 1 {
        return Err(CliError::Usage("--r must satisfy r >= 1".into()));
    }
    if !(0.0..=1.0).contains(&a.p) {
        return Err(CliError::Usage(format!(
            "--p must lie in [0, 1], got {}",
            a.p
        )));
    }
    if a.trials < 1 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let code = a.code.resolve(stderr)?;
    let query = ScheduleQueryF64::integer(a.k, a.r)?;
    let cfg = SimulationConfigF64 {
        p: a.p,
        code: code.clone(),
        query,
        trials: a.trials,
        seed: a.seed,
        bottom_mode: a.bottom_mode.into(),
    };
    let est = simulate_failure(&cfg)?;
    let exact = recursive_failure_exact(a.p, &code, &query)?;
    let in_ci = est.contains(exact);
    let text = format!(
        "code      {}\nk         {}\nr         {}\np         {}\ntrials    {}\nfailures  {}\nestimate  {}\nci99      [{}, {}] (Wilson)\nexact     {}\nin_ci     {}\nseed      {}\n",
        describe(&code),
        a.k,
        a.r,
        sci(a.p),
        est.trials,
        est.failures,
        sci(est.estimate),
        sci(est.ci_low),
        sci(est.ci_high),
        sci(exact),
        in_ci,
        a.seed
    );
    emit(stdout, &text)?;
    if let Some(path) = &a.output {
        let row = SimulateRow {
            p: a.p,
            k: a.k,
            r: a.r,
            seed: a.seed,
            exact,
            estimate: &est,
        };
        write_file(path, &simulate_csv(&row))?;
        let manifest = RunManifest::new(
            "simulate",
            args,
            json!({
                "code": code_json(&code),
                "k": a.k,
                "r": a.r,
                "p": a.p,
                "trials": a.trials,
                "bottom_mode": format!("{:?}", a.bottom_mode),
            }),
            Some(a.seed),
            &[path],
        );
        write_file(&manifest_path(path), &manifest.to_json())?;
    }
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    // Parameters are loaded unchecked so that invalid ones surface as a
    // failed check rather than a usage error.
    let code = match &a.code.code_config {
        Some(path) => read_code_config_unchecked(path)?,
        None => registry::lookup(&a.code.code)
            .map(|e| e.code)
            .ok_or_else(|| CliError::Usage(format!("unknown code `{}`", a.code.code)))?,
    };
    let results = verify::run_checks(&code, a.quick);
    emit(stdout, &verify::render(&results))?;
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        emit(
            stdout,
            &format!("{failed} of {} checks failed\n", results.len()),
        )?;
        return Err(CliError::Verification);
    }
    emit(stdout, &format!("all {} checks passed\n", results.len()))
}

pub fn cmd_codes_list(stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut text = String::new();
    for e in registry::builtin() {
        text.push_str(&format!("{}  {}\n", describe(&e.code), e.provenance));
    }
    emit(stdout, &text)
}

pub fn cmd_replay(
    manifest: &Path,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let m = read_manifest(manifest).map_err(CliError::Usage)?;
    if m.arguments.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage(
            "a manifest cannot replay another replay".into(),
        ));
    }
    match run(m.arguments.iter().cloned(), stdout, stderr) {
        EXIT_OK => Ok(()),
        EXIT_VERIFY => Err(CliError::Verification),
        EXIT_IO => Err(CliError::Usage(
            "replayed command failed with an I/O error".into(),
        )),
        _ => Err(CliError::Usage("replayed command failed".into())),
    }
}
