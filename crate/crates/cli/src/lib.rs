//! Command-line front end for `cesaro-core`.
//!
//! Exit codes: 0 all pass, 1 mathematical failure, 2 usage error,
//! 3 internal error, 4 uncertified.

pub mod args;
pub mod commands;
pub mod config;
pub mod dto;
pub mod random;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Command, Format};
use crate::commands::Outcome;
use crate::config::{RunConfig, OUT_DIR_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Usage,
    Internal,
    Uncertified,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Usage => 2,
            Status::Internal => 3,
            Status::Uncertified => 4,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Uncertified => 1,
            Status::Fail => 2,
            Status::Usage => 3,
            Status::Internal => 4,
        }
    }

    /// The more severe of two outcomes.
    pub fn combine(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }

    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) => Status::Usage,
            CliError::Failed(_) => Status::Fail,
            CliError::Io { .. } | CliError::Internal(_) => Status::Internal,
        }
    }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Entry(a) => format!("entry-{}", a.order),
        Command::Verify(a) => match (a.order, a.from, a.to) {
            (Some(n), _, _) => format!("verify-{n}"),
            (_, Some(f), Some(t)) => format!("verify-{f}-{t}"),
            _ => "verify".into(),
        },
        Command::Conjecture(a) => format!("conjecture-{}-{}", a.from, a.to),
        Command::Certify(a) => format!("certify-{}", a.order),
        Command::Telescope(a) => format!("telescope-{}", a.order),
        Command::Faulhaber(a) => format!("faulhaber-{}", a.order),
    }
}

fn dispatch(cli: &Cli, config: &RunConfig) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Entry(a) => commands::cmd_entry(a),
        Command::Verify(a) => commands::cmd_verify(a, config),
        Command::Conjecture(a) => commands::cmd_conjecture(a, config),
        Command::Certify(a) => commands::cmd_certify(a, config),
        Command::Telescope(a) => commands::cmd_telescope(a, config),
        Command::Faulhaber(a) => commands::cmd_faulhaber(a),
    }
}

/// Writes through a sibling temporary file so readers never see a partial
/// report.
fn write_atomic(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, body).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn render(outcome: &Outcome, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Text => outcome.text.clone(),
        Format::Json => serde_json::to_string_pretty(&outcome.document).map_err(CliError::internal)? + "\n",
        Format::Csv => outcome.csv.clone(),
    })
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Status, CliError> {
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let config = RunConfig::resolve(cli, env_out)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(CliError::internal)?;
    let outcome = pool.install(|| dispatch(cli, &config))?;
    let body = render(&outcome, config.format)?;
    let io = |e| CliError::Internal(format!("writing output: {e}"));
    match &config.out {
        Some(out) => {
            let path = if out.is_dir() || (cli.out.is_none() && !out.exists()) {
                out.join(format!("{}.{}", command_name(&cli.command), config.format.extension()))
            } else {
                out.clone()
            };
            write_atomic(&path, &body)?;
            for line in &outcome.summary {
                writeln!(stdout, "{line}").map_err(io)?;
            }
            writeln!(stdout, "wrote {}", path.display()).map_err(io)?;
        }
        None => {
            stdout.write_all(body.as_bytes()).map_err(io)?;
            if config.format != Format::Text {
                for line in &outcome.summary {
                    writeln!(stderr, "{line}").map_err(io)?;
                }
            }
        }
    }
    Ok(outcome.status)
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return Status::Usage.code();
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.status().code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_precedence() {
        assert_eq!(Status::Pass.combine(Status::Uncertified), Status::Uncertified);
        assert_eq!(Status::Uncertified.combine(Status::Fail), Status::Fail);
        assert_eq!(Status::Internal.combine(Status::Fail), Status::Internal);
        assert_eq!(Status::Fail.code(), 1);
        assert_eq!(Status::Uncertified.code(), 4);
    }
}
