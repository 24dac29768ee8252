use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use psalab::crosscheck::{self, CrossCheckConfig};
use psalab::error::Error;
use psalab::scenario::{figure_preset, parse_scenario, rows_to_csv, run_scenario};

/// Simulator for PSA-assisted measurement of continuous-variable
/// entanglement.
#[derive(Parser)]
#[command(name = "psalab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario config and emit one CSV dataset.
    Simulate {
        /// Scenario config file (dotted-key format).
        config: PathBuf,
        /// Output CSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 3 when any row raises a validity flag.
        #[arg(long)]
        strict: bool,
    },
    /// Emit the datasets of a built-in figure preset, one CSV per curve.
    Figure {
        /// Preset name: ent_vs_gain_a, ent_vs_gain_ratio_b, loss_jm_a,
        /// loss_single_b.
        preset: String,
        /// Directory for the CSV files.
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Cross-validate the covariance algebra against the Fock-space oracle
    /// and print a pass/fail table.
    OracleCheck {
        /// Largest conversion strength the oracle sweeps.
        #[arg(long, default_value_t = 0.8)]
        max_strength: f64,
        /// Per-mode photon cutoff.
        #[arg(long, default_value_t = 40)]
        nmax: usize,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDITY: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config { .. } | Error::UnknownPreset(_) => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: Cli) -> psalab::Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            strict,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let base_dir = config.parent().map(Path::to_path_buf);
            let cfg = parse_scenario(&text, base_dir.as_deref())?;
            let rows = run_scenario(&cfg)?;
            let flagged = rows.iter().any(|r| !r.flags.is_empty());
            let csv = rows_to_csv(&cfg, &rows);
            match out {
                Some(path) => std::fs::write(&path, csv)?,
                None => print!("{csv}"),
            }
            if strict && flagged {
                eprintln!("validity flags raised; failing under --strict");
                return Ok(ExitCode::from(EXIT_VALIDITY));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { preset, out_dir } => {
            let curves = figure_preset(&preset)?;
            std::fs::create_dir_all(&out_dir)?;
            for curve in &curves {
                let path = out_dir.join(format!("{}.csv", curve.name));
                std::fs::write(&path, curve.to_csv())?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { max_strength, nmax } => {
            let cfg = CrossCheckConfig {
                max_strength,
                n_max: nmax,
            };
            let rows = crosscheck::run_suite(&cfg)?;
            print!("{}", crosscheck::format_table(&rows));
            if rows.iter().all(|r| r.passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_VALIDITY))
            }
        }
    }
}
