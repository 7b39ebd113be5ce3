use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clustered_hetnet::config::{Experiment, SweepOutput, SweepSpec, SweepVariable};
use clustered_hetnet::experiment::{cross_validate, run_sweep};
use clustered_hetnet::Error;

#[derive(Parser)]
#[command(name = "clustered-hetnet", version, about = "Coverage of HetNets with clustered users")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage at a single SIR threshold.
    Coverage(Common),
    /// Run the sweep block of the config.
    Sweep(Common),
    /// Compare analytic and simulated coverage; exits 1 if any threshold fails.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Allowed |analytic - simulated| when the interval is narrower.
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
    },
    /// Bounds and independent-user limit only.
    Limits(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the Monte Carlo simulation.
    #[arg(long)]
    no_sim: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// SIR thresholds in dB, overriding the config.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tau_db: Vec<f64>,
}

enum Failure {
    Config(String),
    Validation,
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Validation(_) | Error::Domain(_) | Error::ModelMismatch { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(common: &Common) -> Result<Experiment, Failure> {
    let mut exp = Experiment::load(&common.config)?;
    if let Some(seed) = common.seed {
        exp.sim.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        exp.sim.trials = trials;
    }
    exp.sim.validate(&exp.network)?;
    Ok(exp)
}

/// Thresholds from the flag, else from a `tau_db` sweep, else `fallback`.
fn thresholds(common: &Common, exp: &Experiment, fallback: &[f64]) -> Vec<f64> {
    if !common.tau_db.is_empty() {
        return common.tau_db.clone();
    }
    match &exp.sweep {
        Some(s) if s.variable == SweepVariable::TauDb => s.values.clone(),
        Some(s) => vec![s.tau_db],
        None => fallback.to_vec(),
    }
}

fn tau_sweep(values: Vec<f64>, outputs: Vec<SweepOutput>) -> SweepSpec {
    SweepSpec {
        variable: SweepVariable::TauDb,
        values,
        outputs,
        tau_db: 0.0,
    }
}

fn all_outputs() -> Vec<SweepOutput> {
    vec![
        SweepOutput::Analytic,
        SweepOutput::Simulated,
        SweepOutput::Bounds,
        SweepOutput::PppLimit,
        SweepOutput::Association,
    ]
}

fn emit_table(
    common: &Common,
    exp: &Experiment,
    sweep: &SweepSpec,
    simulate: bool,
) -> Result<(), Failure> {
    let table = run_sweep(exp, sweep, &exp.sim, simulate)?;
    let mut out = open_out(&common.out)?;
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &table).map_err(|e| Failure::Runtime(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Coverage(common) => {
            let exp = load(&common)?;
            let taus = thresholds(&common, &exp, &[0.0]);
            if taus.len() != 1 {
                return Err(Failure::Config("coverage takes a single threshold".into()));
            }
            emit_table(&common, &exp, &tau_sweep(taus, all_outputs()), !common.no_sim)
        }
        Command::Sweep(common) => {
            let exp = load(&common)?;
            let sweep = exp
                .sweep
                .clone()
                .ok_or_else(|| Failure::Config("the config has no [sweep] block".into()))?;
            emit_table(&common, &exp, &sweep, !common.no_sim)
        }
        Command::Limits(common) => {
            let exp = load(&common)?;
            let taus = thresholds(&common, &exp, &[0.0]);
            let sweep = tau_sweep(taus, vec![SweepOutput::Bounds, SweepOutput::PppLimit]);
            emit_table(&common, &exp, &sweep, false)
        }
        Command::Validate { common, tolerance } => {
            if common.no_sim {
                return Err(Failure::Config("validate needs the simulation; drop --no-sim".into()));
            }
            let exp = load(&common)?;
            let taus = thresholds(&common, &exp, &[-10.0, 0.0, 10.0]);
            let report = cross_validate(&exp, &taus, &exp.sim, tolerance)?;
            let mut out = open_out(&common.out)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)
                        .map_err(|e| Failure::Runtime(e.to_string()))?;
                    writeln!(out)?;
                }
                Format::Csv => report.write_csv(&mut out)?,
            }
            out.flush()?;
            if report.all_pass {
                Ok(())
            } else {
                Err(Failure::Validation)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => {
            eprintln!("validation failed: analytic and simulated coverage disagree");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
