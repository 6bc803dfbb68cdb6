//! Command-line front end: `povm`, `fidelity`, `sweep` and `sample`.
//!
//! Exit codes: 0 on success, 1 when a computation fails (for example an
//! outcome that never occurs), 2 on usage or config parse errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{evaluate, qnd_conditioning_probability, qnd_numerator, sweep_state, ArmOutcome, FidelityReport, OperatingMode, ProbabilityTable};
use crate::config::{format_sig, render_csv, ConfigError, ScenarioConfig};
use crate::detection::{completeness_defect, povm_element, Arms, DetectorBank, Outcome};
use crate::error::Error;
use crate::montecarlo::{estimate_fidelities, sample_patterns, JointFrequencies};
use crate::tolerance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qndsim", version, about = "Photonic QND measurement with imperfect click detectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Coincidence,
    Qnd,
}

impl From<ModeArg> for OperatingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Coincidence => OperatingMode::Coincidence,
            ModeArg::Qnd => OperatingMode::Qnd,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the click/no-click POVM elements and their completeness defect.
    Povm {
        #[arg(long)]
        zeta: f64,
    },
    /// Fidelities and probability tables for one scenario.
    Fidelity {
        /// Scenario file; the bundled default is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config's efficiency with a uniform value.
        #[arg(long)]
        zeta: Option<f64>,
        /// Table written to the CSV file.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Optional single-row CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a scenario over a uniform efficiency grid and write CSV.
    Sweep {
        #[arg(long)]
        zeta_min: f64,
        #[arg(long)]
        zeta_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo estimate next to the exact values.
    Sample {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidEfficiency(_) | Error::InvalidRange { .. } | Error::ZeroShots => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::fmt::Error> for Failure {
    fn from(e: std::fmt::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_COMPUTE
        }
    }
}

fn execute(command: &Command) -> Result<String, Failure> {
    match command {
        Command::Povm { zeta } => cmd_povm(*zeta),
        Command::Fidelity { config, zeta, mode, out } => cmd_fidelity(load(config, *zeta, *mode)?, out.as_ref()),
        Command::Sweep {
            zeta_min,
            zeta_max,
            steps,
            config,
            mode,
            out,
        } => cmd_sweep(*zeta_min, *zeta_max, *steps, load(config, None, *mode)?, out),
        Command::Sample { config, zeta, shots, seed } => cmd_sample(load(config, *zeta, None)?, *shots, *seed),
    }
}

fn load(path: &Option<PathBuf>, zeta: Option<f64>, mode: Option<ModeArg>) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match path {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default_scenario(),
    };
    if let Some(z) = zeta {
        DetectorBank::uniform(z)?;
        cfg = cfg.with_zeta(z);
    }
    if let Some(m) = mode {
        cfg = cfg.with_mode(m.into());
    }
    Ok(cfg)
}

fn cmd_povm(zeta: f64) -> Result<String, Failure> {
    let none = povm_element(Outcome::NoClick, zeta)?;
    let click = povm_element(Outcome::Click, zeta)?;
    let defect = completeness_defect(zeta);
    let diag = |d: [f64; 3]| d.iter().map(|&x| format_sig(x)).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    writeln!(s, "zeta = {}", format_sig(zeta))?;
    writeln!(s, "E(0) no click = diag({})", diag(none.diagonal))?;
    writeln!(s, "E(1) click    = diag({})", diag(click.diagonal))?;
    writeln!(s, "completeness defect = {defect:e}")?;
    if defect > tolerance::COMPLETENESS {
        return Err(Failure::Compute(format!("{s}completeness defect above {:e}", tolerance::COMPLETENESS)));
    }
    Ok(s)
}

fn write_table(s: &mut String, table: &ProbabilityTable) -> std::fmt::Result {
    match table.mode() {
        OperatingMode::Coincidence => {
            writeln!(s, "coincidence table P(signal, meter):")?;
            write!(s, "{:>6}", "s\\m")?;
            for m in ArmOutcome::ALL {
                write!(s, " {:>16}", m.label())?;
            }
            writeln!(s)?;
            for sig in ArmOutcome::ALL {
                write!(s, "{:>6}", sig.label())?;
                for m in ArmOutcome::ALL {
                    write!(s, " {:>16}", format_sig(table.get(Some(sig), m)))?;
                }
                writeln!(s)?;
            }
        }
        OperatingMode::Qnd => {
            writeln!(s, "qnd table P(meter), signal undetected:")?;
            for m in ArmOutcome::ALL {
                writeln!(s, "  {:>2} {:>16}", m.label(), format_sig(table.get(None, m)))?;
            }
        }
    }
    Ok(())
}

fn render_report(s: &mut String, report: &FidelityReport) -> std::fmt::Result {
    writeln!(s, "F_M          = {}", format_sig(report.f_m))?;
    writeln!(s, "F_QND trace  = {}", format_sig(report.f_qnd_trace))?;
    writeln!(s, "F_QND closed = {}", format_sig(report.f_qnd_closed))
}

fn cmd_fidelity(cfg: ScenarioConfig, out: Option<&PathBuf>) -> Result<String, Failure> {
    let rho = cfg.state()?;
    let detectors = cfg.detectors()?;
    let zeta = cfg.nominal_zeta();
    let report = evaluate(&rho, cfg.k, &detectors, zeta)?;

    let mut s = String::new();
    writeln!(s, "scenario: {}", cfg.describe())?;
    writeln!(s, "zeta = {}", format_sig(zeta))?;
    render_report(&mut s, &report)?;
    writeln!(s, "joint trace (unnormalized) = {}", format_sig(qnd_numerator(&rho, cfg.k, &detectors)?))?;
    writeln!(s, "P(conditioning pattern)    = {}", format_sig(qnd_conditioning_probability(&rho, cfg.k, &detectors)?))?;
    writeln!(s)?;
    write_table(&mut s, &report.coincidence)?;
    writeln!(s)?;
    write_table(&mut s, &report.qnd)?;

    if let Some(path) = out {
        fs::write(path, render_csv(std::slice::from_ref(&report), cfg.mode))
            .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?;
        writeln!(s, "\nwrote {}", path.display())?;
    }
    Ok(s)
}

fn cmd_sweep(min: f64, max: f64, steps: usize, cfg: ScenarioConfig, out: &PathBuf) -> Result<String, Failure> {
    let rho = cfg.state()?;
    let reports = sweep_state(min, max, steps, &rho, cfg.k)?;
    fs::write(out, render_csv(&reports, cfg.mode))
        .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", out.display())))?;
    Ok(format!("wrote {} row(s) to {}\n", reports.len(), out.display()))
}

fn cmd_sample(cfg: ScenarioConfig, shots: u64, seed: u64) -> Result<String, Failure> {
    let rho = cfg.state()?;
    let detectors = cfg.detectors()?;
    let zeta = cfg.nominal_zeta();
    let report = sample_patterns(&rho, &detectors, shots, seed, Arms::Both)?;
    let exact = JointFrequencies::exact(&rho, &detectors, Arms::Both)?;
    let exact_marginal = exact.pattern_marginal();

    let mut s = String::new();
    writeln!(s, "scenario: {}", cfg.describe())?;
    writeln!(s, "zeta = {}, shots = {shots}, seed = {seed}", format_sig(zeta))?;
    writeln!(s)?;
    writeln!(s, "{:<24} {:>8} {:>14} {:>14} {:>14}", "pattern", "count", "estimate", "std error", "exact")?;
    for (pattern, est) in report.pattern_estimates() {
        let p = exact_marginal.get(&pattern).copied().unwrap_or(0.0);
        writeln!(
            s,
            "{:<24} {:>8} {:>14} {:>14} {:>14}",
            pattern.to_string(),
            est.count,
            format_sig(est.value),
            format_sig(est.std_error),
            format_sig(p)
        )?;
    }
    writeln!(s)?;
    let estimate = estimate_fidelities(&report.joint_frequencies(), cfg.k, zeta)?;
    let reference = evaluate(&rho, cfg.k, &detectors, zeta)?;
    writeln!(s, "{:<12} {:>14} {:>14}", "", "estimate", "exact")?;
    writeln!(s, "{:<12} {:>14} {:>14}", "F_M", format_sig(estimate.f_m), format_sig(reference.f_m))?;
    writeln!(
        s,
        "{:<12} {:>14} {:>14}",
        "F_QND",
        format_sig(estimate.f_qnd_trace),
        format_sig(reference.f_qnd_trace)
    )?;
    writeln!(s, "{:<12} {:>14} {:>14}", "F_QND closed", "", format_sig(reference.f_qnd_closed))?;
    Ok(s)
}
