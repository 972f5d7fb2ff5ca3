//! `ecbrake` command-line front end.
//!
//! Exit status: 0 success, 2 validation error, 3 numerical error, 4 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use super::config::{load_config, RunConfig};
use super::export::sweep_csv_string;
use super::report::{self, LambdaSource};
use super::sidecar::{read_sidecar, write_sidecar};
use crate::error::{Error, Result};
use crate::model::{self, OperatingPoint, SpeedConvention, TorqueModel};
use crate::oracle::{oracle_check, LayerStack};
use crate::regulations::requirement_report;
use crate::search::{
    calibrate_lambda, check_requirement, physics_fingerprint, rank_solutions, run_sweep,
    PUBLISHED_SOLUTIONS,
};
use crate::units::Rpm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    #[value(name = "rad_s")]
    RadS,
    #[value(name = "rpm")]
    Rpm,
}

impl From<ConventionArg> for SpeedConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::RadS => SpeedConvention::RadiansPerSecond,
            ConventionArg::Rpm => SpeedConvention::Rpm,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ecbrake",
    version,
    about = "Eddy-current brake torque model, design sweep and field oracle"
)]
struct Cli {
    /// TOML configuration; Tables 1-3 defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Echo the effective configuration and its provenance to standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[arg(long, global = true, value_enum)]
    speed_convention: Option<ConventionArg>,
    /// Series scale; overrides the config and any stored calibration.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Where calibration records are stored; defaults to the config directory.
    #[arg(long, global = true)]
    sidecar_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Braking torque at one or more slip speeds.
    Torque {
        /// Slip speed in rpm; repeatable.
        #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
        speed: Vec<f64>,
    },
    /// Torque over the (b, w_m, speed) grid as CSV.
    Sweep,
    /// Grid cells ranked by |average torque - target|.
    Rank {
        /// Per-wheel target in N·m; defaults to the configured requirement.
        #[arg(long)]
        target: Option<f64>,
        /// Keep only cells whose minimum torque meets the target.
        #[arg(long)]
        feasible_only: bool,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Fit lambda to the reference torque and store the record.
    Calibrate,
    /// Closed-form reflection coefficients against the finite-difference solution.
    OracleCheck {
        /// Mesh points per layer.
        #[arg(long, default_value_t = 128)]
        mesh: usize,
    },
    /// Test speed, required torque and handover time.
    Requirement,
}

struct Effective {
    model: TorqueModel,
    convention: SpeedConvention,
    lambda_source: LambdaSource,
}

struct Outcome {
    text: String,
    /// Reported after the output is written.
    failure: Option<Error>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            failure: None,
        }
    }
}

fn sidecar_dir(cli: &Cli) -> PathBuf {
    if let Some(dir) = &cli.sidecar_dir {
        return dir.clone();
    }
    cli.config
        .as_deref()
        .and_then(Path::parent)
        .filter(|p| !p.as_os_str().is_empty())
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

fn resolve(cli: &Cli, cfg: &RunConfig) -> Result<Effective> {
    let requested = cli
        .speed_convention
        .map(SpeedConvention::from)
        .or(cfg.convention);
    if let Some(lambda) = cli.lambda {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "--lambda must be positive, got {lambda}"
            )));
        }
        return Ok(Effective {
            model: cfg.model.clone().with_lambda(lambda),
            convention: requested.unwrap_or_default(),
            lambda_source: LambdaSource::Flag,
        });
    }
    if cfg.lambda.is_some() {
        return Ok(Effective {
            model: cfg.model.clone(),
            convention: requested.unwrap_or_default(),
            lambda_source: LambdaSource::Config,
        });
    }
    if let Some(record) = read_sidecar(&sidecar_dir(cli), &physics_fingerprint(&cfg.model))? {
        let convention = requested.unwrap_or(record.convention_used);
        let mut tag = record.tag();
        if let Some(fit) = record.fit(convention) {
            tag.lambda_star = fit.lambda_star;
            tag.convention = convention;
        }
        return Ok(Effective {
            model: cfg.model.clone().calibrated(tag),
            convention,
            lambda_source: LambdaSource::Sidecar,
        });
    }
    Ok(Effective {
        model: cfg.model.clone(),
        convention: requested.unwrap_or_default(),
        lambda_source: LambdaSource::Unit,
    })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let eff = resolve(cli, &cfg)?;
    if cli.verbose {
        eprint!("{}", cfg.echo_text());
        eprintln!(
            "{:<32} {:<36} ({})",
            "effective.lambda",
            eff.model.lambda_scale,
            eff.lambda_source.as_str()
        );
        eprintln!("{:<32} {}", "effective.speed_convention", eff.convention);
    }

    match &cli.command {
        Command::Torque { speed } => {
            let ops: Vec<OperatingPoint> = speed
                .iter()
                .map(|&s| OperatingPoint::new(Rpm(s), eff.convention))
                .collect();
            let rows = model::torque_speed_curve(&eff.model, &ops)?;
            Ok(Outcome::ok(report::torque_records(
                &rows,
                eff.model.lambda_scale,
                eff.lambda_source,
                eff.convention,
            )))
        }
        Command::Sweep => {
            let started = Instant::now();
            let result = run_sweep(&eff.model, &cfg.grid, eff.convention)?;
            if cli.verbose {
                eprintln!(
                    "sweep: {} entries in {:.2?}, fingerprint {}",
                    result.entries.len(),
                    started.elapsed(),
                    result.model_fingerprint
                );
            }
            Ok(Outcome::ok(sweep_csv_string(&result)))
        }
        Command::Rank {
            target,
            feasible_only,
            top,
        } => {
            let target = target.unwrap_or(cfg.requirement.per_wheel_torque.value());
            let result = run_sweep(&eff.model, &cfg.grid, eff.convention)?;
            let ranked = rank_solutions(&result, target, *feasible_only)?;
            let mut text = report::ranking_table(&ranked, target, *top);
            let mut req = cfg.requirement;
            req.per_wheel_torque = crate::units::NewtonMetres(target);
            if let Ok(check) = check_requirement(&ranked[0], &req) {
                text.push_str("\nrequirement check, rank 1:\n");
                text.push_str(&report::requirement_check_text(&check));
            }
            Ok(Outcome::ok(text))
        }
        Command::Calibrate => {
            let reference = cfg.calibration_reference;
            let held_out: Vec<_> = PUBLISHED_SOLUTIONS
                .iter()
                .copied()
                .filter(|p| *p != reference)
                .collect();
            let result = calibrate_lambda(&cfg.model, &reference, &held_out)?;
            let path = write_sidecar(&sidecar_dir(cli), &result)?;
            let mut text = report::calibration_report(&result);
            text.push_str(&format!("\nsidecar: {}\n", path.display()));
            Ok(Outcome::ok(text))
        }
        Command::OracleCheck { mesh } => {
            if *mesh < LayerStack::MIN_MESH {
                return Err(Error::InvalidInput(format!(
                    "--mesh must be at least {}, got {mesh}",
                    LayerStack::MIN_MESH
                )));
            }
            let result = oracle_check(&eff.model, eff.convention, *mesh);
            let failure = (!result.passed()).then_some(Error::OracleMismatch {
                max_relative_error: result.max_relative_error,
                tolerance: crate::oracle::AGREEMENT_TOLERANCE,
            });
            Ok(Outcome {
                text: report::oracle_report_text(&result),
                failure,
            })
        }
        Command::Requirement => Ok(Outcome::ok(
            requirement_report(&cfg.vehicle, &cfg.requirement)?.to_string(),
        )),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::io(format!("cannot write {}", path.display()), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Error::io("cannot write to standard output", e))
        }
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error[{}]: {e}", e.code());
    if let Error::EmptyFeasibleSet { .. } = e {
        eprintln!("hint: lower --target, widen the grid, or drop --feasible-only to rank by average torque");
    }
    e.exit_class() as i32
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.text) {
                return report_error(&e);
            }
            outcome.failure.as_ref().map_or(0, report_error)
        }
        Err(e) => report_error(&e),
    }
}
