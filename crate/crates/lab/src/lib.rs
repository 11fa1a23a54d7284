//! Command-line verifier for the near-symplectic, near-contact, neck and
//! resolution models of `nslab-core`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod report;

pub use config::{FileConfig, Format, NumberSpec, Section, Settings};
pub use error::LabError;
pub use report::{Check, Outcome, Report, Table, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "nslab", version, about = "Verify near-symplectic and near-contact models and neck estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named fixture or fixture file.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Neck lengths: `4..12`, `4..12:0.5`, `4,6,8` or `8`.
    #[arg(long = "T", global = true, value_name = "T")]
    pub t: Option<String>,
    /// Mode ladder, e.g. `2,3`.
    #[arg(long, global = true)]
    pub ladder: Option<String>,
    /// Perturbation parameters.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact and numerical checks of a near-symplectic 2-form on R^4.
    VerifyNearSymplectic,
    /// Zeros, indices and local interpolation of near-contact 1-forms on R^3.
    VerifyNearContact,
    /// The overtwisted family and its attracting periodic orbit.
    Overtwisted,
    /// Neck iteration sweep over T with decay fits.
    NeckSim,
    /// Exceptional-sphere period sweep over T.
    ResolutionSweep,
    /// Jacobian of the period map at one T.
    PeriodJacobian,
    /// Every acceptance criterion.
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyNearSymplectic => "verify-near-symplectic",
            Command::VerifyNearContact => "verify-near-contact",
            Command::Overtwisted => "overtwisted",
            Command::NeckSim => "neck-sim",
            Command::ResolutionSweep => "resolution-sweep",
            Command::PeriodJacobian => "period-jacobian",
            Command::All => "all",
        }
    }
}

impl Cli {
    fn flags(&self) -> Section {
        Section {
            fixture: self.fixture.clone(),
            grid: self.grid,
            t: self.t.clone().map(NumberSpec::Text),
            ladder: self.ladder.clone().map(NumberSpec::Text),
            eps: self.eps.clone().map(NumberSpec::Text),
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            jobs: self.jobs,
        }
    }

    pub fn settings(&self) -> Result<Settings, LabError> {
        let file = self.config.as_deref().map(FileConfig::load).transpose()?;
        Settings::resolve(self.command.name(), file.as_ref(), self.flags())
    }
}

/// Runs `command` on a pool of `settings.jobs` threads.
pub fn run(command: Command, settings: &Settings) -> Result<Outcome, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.unwrap_or(0))
        .build()
        .map_err(|e| LabError::Input(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::VerifyNearSymplectic => commands::verify_near_symplectic_cmd(settings),
        Command::VerifyNearContact => commands::verify_near_contact_cmd(settings),
        Command::Overtwisted => commands::overtwisted_cmd(settings),
        Command::NeckSim => commands::neck_sim_cmd(settings),
        Command::ResolutionSweep => commands::resolution_sweep_cmd(settings),
        Command::PeriodJacobian => commands::period_jacobian_cmd(settings),
        Command::All => commands::all_cmd(settings),
    })
}

/// Full command-line entry point; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
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
    let result = cli.settings().and_then(|s| {
        let out = run(cli.command, &s)?;
        out.emit(s.format, s.out.as_deref())?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            let r = &out.report;
            match &r.first_failure {
                None => {
                    eprintln!("{}: all {} checks pass", r.command, r.checks.len());
                    0
                }
                Some(f) => {
                    eprintln!("{}: FAIL {f}", r.command);
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
