//! Scenario-driven front end for `qtomo`: build a quorum, simulate or compute
//! its statistics, reconstruct, and report.
//!
//! [`run_cli`] is the whole program; the binary only wires in the process
//! arguments, environment and standard streams.

pub mod commands;
pub mod error;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::{Options, Report, ToleranceProfile};
pub use error::{CliError, CliResult};
pub use scenario::{Format, Scenario};

/// Environment variable that relocates relative output paths.
pub const REPORT_DIR_ENV: &str = "QTOMO_REPORT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qtomo", version, about = "Finite quantum state tomography from scenario files")]
pub struct Cli {
    /// Seed for sampling, random quorums and spin-layout jitter.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (run falls back to the scenario's output path; otherwise stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Default)]
    pub tolerance_profile: ToleranceProfile,
    /// Record wall-clock time in run reports (makes them non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct the scenario state and write a report.
    Run { scenario: PathBuf },
    /// Print quorum diagnostics: rank, conditioning, design residuals.
    QuorumCheck { scenario: PathBuf },
    /// Trace distance versus shots per setting, with the log-log slope.
    SampleSweep {
        scenario: PathBuf,
        /// Ascending, comma separated, e.g. 100,1000,10000.
        #[arg(long, value_delimiter = ',', required = true)]
        shots: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

impl Command {
    fn scenario_path(&self) -> &Path {
        match self {
            Command::Run { scenario } | Command::QuorumCheck { scenario } | Command::SampleSweep { scenario, .. } => {
                scenario
            }
        }
    }
}

/// Runs the program and returns its exit status.
pub fn run_cli<I, T>(args: I, report_dir: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { error::EXIT_VALIDATION } else { 0 };
            let text = err.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let path = cli.command.scenario_path().to_path_buf();
    let shown = path.display().to_string();
    let text = match std::fs::read_to_string(&path) {
        Ok(text) => text,
        Err(err) => {
            let _ = writeln!(stderr, "error: {shown}: cannot read scenario: {err}");
            return error::EXIT_VALIDATION;
        }
    };
    match execute(&cli, &text, report_dir.as_deref()) {
        Ok(done) => {
            for warning in &done.warnings {
                let _ = writeln!(stderr, "warning: {warning}");
            }
            match done.destination {
                Some(dest) => {
                    if let Err(err) = std::fs::write(&dest, done.body.as_bytes()) {
                        let _ = writeln!(stderr, "error: {}: cannot write output: {err}", dest.display());
                        return error::EXIT_VALIDATION;
                    }
                }
                None => {
                    let _ = stdout.write_all(done.body.as_bytes());
                }
            }
            0
        }
        Err(err) => {
            let err = err.anchor(&text);
            let _ = writeln!(stderr, "{}", err.render(&shown));
            err.exit_code()
        }
    }
}

struct Done {
    body: String,
    destination: Option<PathBuf>,
    warnings: Vec<String>,
}

fn execute(cli: &Cli, text: &str, report_dir: Option<&Path>) -> CliResult<Done> {
    let scenario = Scenario::parse(text)?;
    let options = Options {
        seed: cli.seed,
        profile: cli.tolerance_profile,
        timing: cli.timing,
    };
    let scenario_out = scenario.output.as_ref();
    let format = |default| cli.format.or(scenario_out.and_then(|o| o.format)).unwrap_or(default);
    let (body, warnings) = match &cli.command {
        Command::Run { .. } => {
            let outcome = commands::run(&scenario, &options)?;
            (outcome.render(format(Format::Json)), outcome.warnings)
        }
        Command::QuorumCheck { .. } => {
            let check = commands::quorum_check(&scenario, &options)?;
            (check.render(format(Format::Json)), check.warnings.clone())
        }
        Command::SampleSweep { shots, trials, .. } => {
            let outcome = commands::sample_sweep(&scenario, shots, *trials, &options)?;
            (outcome.render(format(Format::Csv)), Vec::new())
        }
    };
    // Only `run` falls back to the scenario's output path; diagnostics and
    // sweeps go to stdout unless --out is given.
    let scenario_path = match cli.command {
        Command::Run { .. } => scenario_out.and_then(|o| o.path.as_deref()),
        _ => None,
    };
    Ok(Done {
        body,
        destination: commands::resolve_output(cli.out.as_deref(), scenario_path, report_dir),
        warnings,
    })
}
