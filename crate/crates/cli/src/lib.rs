//! Batch front end for the `apery` library: reproducible tables, checks and
//! JSON artifacts, with an on-disk cache for the expensive t-series.

pub mod cache;
pub mod commands;
pub mod config;
pub mod render;
pub mod tables;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{Cli, Command, Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("cache entry {key}: {reason}")]
    Cache { key: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] apery::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad invocations, 1 for everything that ran and failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Core(apery::Error::UnsupportedLevel { .. })
            | CliError::Core(apery::Error::Parse(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// What one invocation wrote and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse and run without touching the process streams.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;

    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Invocation { code, stdout, stderr };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        if let Some(jobs) = cfg.jobs {
            // A pool may already exist when invoked more than once in a process.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        }
        commands::execute(&cfg)
    });
    match result {
        Ok(outcome) => match outcome.failure {
            None => Invocation {
                code: 0,
                stdout: outcome.rendered,
                stderr: String::new(),
            },
            Some(msg) => Invocation {
                code: 1,
                stdout: outcome.rendered,
                stderr: format!("check failed: {msg}\n"),
            },
        },
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// [`invoke`], printing to the process streams; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use std::io::Write;

    let inv = invoke(args);
    // Broken pipes (e.g. `| head`) are not worth a panic.
    let _ = std::io::stdout().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().write_all(inv.stderr.as_bytes());
    inv.code
}
