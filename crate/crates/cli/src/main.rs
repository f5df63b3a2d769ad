//! `uplink-training`: optimize a single operating point, run parameter
//! sweeps to CSV, or run the validation suites.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use uplink_training::validate::run_suite;
use uplink_training::{empirical_rate, optimize, MonteCarloSpec, Receiver, SweepRow};

use config::{load, PointConfig, SweepConfig, ValidateConfig};

#[derive(Parser)]
#[command(version, about = "Pilot energy and duration optimization for multiuser MIMO uplinks")]
struct Cli {
    /// Override the seed given in the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jointly optimal pilot energy fraction and training length for one scenario.
    Optimize {
        #[arg(short, long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Evaluate schemes over a range of antenna counts or SNRs.
    Sweep {
        #[arg(short, long, value_name = "FILE")]
        config: PathBuf,
        /// Output file; defaults to `output_path` from the config, else stdout.
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run closed-form, concavity and Monte Carlo checks.
    Validate {
        #[arg(short, long, value_name = "FILE")]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Failures split by exit status: bad input exits 2, everything else 1.
enum Failure {
    Input(anyhow::Error),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

trait InputContext<T> {
    fn input(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
}

#[derive(Serialize)]
struct OptimizeRecord {
    alpha_star: f64,
    #[serde(rename = "T_tau_star")]
    t_tau_star: f64,
    #[serde(rename = "T_d_star")]
    t_d_star: f64,
    rho_tau: f64,
    rho_d: f64,
    rate_bits: f64,
    case_label: &'static str,
    receiver: Receiver,
}

/// Default seed of the optional Monte Carlo cross-check in `optimize`.
const DEFAULT_SEED: u64 = 7;

fn cmd_optimize(path: &Path, seed: Option<u64>) -> Result<bool, Failure> {
    let point: PointConfig = load(path).input()?;
    let cfg = point.system().input()?;
    let r = optimize(&cfg, point.receiver).input()?;
    let record = OptimizeRecord {
        alpha_star: r.alpha_star,
        t_tau_star: r.t_tau_star,
        t_d_star: r.t_d_star,
        rho_tau: r.rho_tau,
        rho_d: r.rho_d,
        rate_bits: r.rate_star,
        case_label: r.case_label.as_str(),
        receiver: r.receiver,
    };
    println!("{}", serde_json::to_string(&record).map_err(anyhow::Error::from)?);
    if let Some(trials) = point.trials {
        let spec = MonteCarloSpec::new(trials, seed.or(point.seed).unwrap_or(DEFAULT_SEED));
        let mc = empirical_rate(&r.split(&cfg).input()?, &cfg, r.receiver, &spec).input()?;
        eprintln!(
            "monte carlo rate {} +/- {} bits ({} trials, seed {})",
            mc.rate, mc.std_error, spec.trials, spec.seed
        );
    }
    Ok(true)
}

fn write_rows(rows: &[SweepRow], format: Format, out: impl Write) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn cmd_sweep(path: &Path, output: Option<PathBuf>, format: Format) -> Result<bool, Failure> {
    let sweep: SweepConfig = load(path).input()?;
    let spec = sweep.spec().input()?;
    let rows = uplink_training::run_sweep(&spec).input()?;
    match output.or(sweep.output_path) {
        Some(p) => {
            let file = std::fs::File::create(&p).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", p.display()))?;
            write_rows(&rows, format, std::io::BufWriter::new(file))?;
            log::info!("wrote {} rows to {}", rows.len(), p.display());
        }
        None => write_rows(&rows, format, std::io::stdout().lock())?,
    }
    Ok(true)
}

fn cmd_validate(path: &Path, seed: Option<u64>) -> Result<bool, Failure> {
    let validate: ValidateConfig = load(path).input()?;
    let suites = validate.suites().input()?;
    let opts = validate.options(seed).input()?;
    let mut all_passed = true;
    for suite in suites {
        let report = run_suite(suite, &opts).input()?;
        all_passed &= report.passed;
        println!("{} {}", if report.passed { "PASS" } else { "FAIL" }, suite.as_str());
        for m in &report.metrics {
            println!(
                "  {} {}: worst {:e} (limit {:e})",
                if m.passed { "ok  " } else { "FAIL" },
                m.name,
                m.worst,
                m.limit
            );
        }
        for note in &report.notes {
            println!("  note: {note}");
        }
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Optimize { config } => cmd_optimize(&config, cli.seed),
        Command::Sweep { config, output, format } => cmd_sweep(&config, output, format),
        Command::Validate { config } => cmd_validate(&config, cli.seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
