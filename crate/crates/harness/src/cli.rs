use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ParamsFile, RawSettings, Settings, DEFAULT_TRIALS};
use crate::csv_out::emit_csv;
use crate::engine::Engine;
use crate::error::HarnessError;
use crate::rows::{design_point, evaluate, DesignPoint};
use crate::selfcheck;
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "covert", version, about = "Covert random-access detection: closed forms and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form operating point as one CSV row.
    Analytic(PointArgs),
    /// Closed forms plus Monte Carlo rates at one operating point.
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// One row per value of N or M; simulated only when --trials is given.
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        trials: TrialArgs,
        /// Swept variable: n (frame length) or m (antennas).
        #[arg(long)]
        var: Option<String>,
        /// Comma-separated values, strictly increasing.
        #[arg(long)]
        values: Option<String>,
    },
    /// Built-in consistency checks; exits 1 if any fails.
    Selfcheck(TrialArgs),
}

#[derive(Debug, Args, Clone, Default)]
struct PointArgs {
    /// False-alarm target shared by both detectors.
    #[arg(long)]
    pfa: Option<f64>,
    /// Receiver missed-detection target.
    #[arg(long)]
    pmd: Option<f64>,
    /// Antennas at each receiver.
    #[arg(long)]
    m: Option<u32>,
    /// Frame length in symbols.
    #[arg(long)]
    n: Option<u32>,
    /// Training proportion; alpha * n must be an integer.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    noise_power: Option<f64>,
    /// Use this SNR instead of the designed transmit power.
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
struct TrialArgs {
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Confidence level of the Wilson intervals.
    #[arg(long)]
    confidence: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn raw_settings(point: &PointArgs, trials: &TrialArgs, var: Option<String>, values: Option<String>) -> Result<Settings, HarnessError> {
    let raw = RawSettings {
        pfa: point.pfa,
        pmd: point.pmd,
        m: point.m,
        n: point.n,
        alpha: point.alpha,
        noise_power: point.noise_power,
        snr_db: point.snr_db,
        out: point.out.clone(),
        trials: trials.trials,
        seed: trials.seed,
        confidence: trials.confidence,
        threads: trials.threads,
        var,
        values,
    };
    let raw = match &point.params {
        Some(path) => raw.or_file(&ParamsFile::load(path)?)?,
        None => raw,
    };
    Settings::resolve(raw)
}

fn single_point(s: &Settings) -> Result<DesignPoint, HarnessError> {
    let p = design_point(s.targets, s.n_total, s.alpha, s.m_antennas, s.noise_power)?;
    match s.snr_db {
        Some(db) => p.with_snr_db(db),
        None => Ok(p),
    }
}

fn execute(command: Command) -> Result<i32, HarnessError> {
    match command {
        Command::Analytic(point) => {
            let s = raw_settings(&point, &TrialArgs::default(), None, None)?;
            let p = single_point(&s)?;
            let row = evaluate(&p, None, &Engine::new(Some(1))?);
            emit_csv(&[row], s.out.as_deref())?;
        }
        Command::Simulate { point, trials } => {
            let s = raw_settings(&point, &trials, None, None)?;
            let p = single_point(&s)?;
            let plan = s.plan_or(DEFAULT_TRIALS)?;
            let row = evaluate(&p, Some(&plan), &Engine::new(s.threads)?);
            emit_csv(&[row], s.out.as_deref())?;
        }
        Command::Sweep { point, trials, var, values } => {
            let s = raw_settings(&point, &trials, var, values)?;
            let spec = SweepSpec {
                variable: s.var,
                values: s.values.clone().unwrap_or_else(|| s.var.default_values()),
                targets: s.targets,
                n_total: s.n_total,
                m_antennas: s.m_antennas,
                alpha: s.alpha,
                noise_power: s.noise_power,
                snr_db: s.snr_db,
                plan: s.plan()?,
            };
            let rows = run_sweep(&spec, &Engine::new(s.threads)?)?;
            emit_csv(&rows, s.out.as_deref())?;
        }
        Command::Selfcheck(trials) => {
            let s = raw_settings(&PointArgs::default(), &trials, None, None)?;
            let engine = Engine::new(s.threads)?;
            let report = selfcheck::run(s.trials.unwrap_or(selfcheck::DEFAULT_TRIALS), s.seed, &engine);
            let mut out = std::io::stdout().lock();
            for c in &report {
                let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if report.iter().any(|c| !c.passed) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

/// Parses `args` and runs the command. Returns the process exit status:
/// 0 on success, 1 when a check fails, 2 for usage or configuration errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("covert: {e}");
            e.exit_code()
        }
    }
}
