//! `rolling-twistor`: reproducible experiments on rolling-surface
//! distributions. Tables are CSV with `#` header lines and 17 significant
//! digits; meshes use the plain-text vertex/quad format of the core crate.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 usage or parse error, 3 numeric-domain failure.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Command, RunConfig};

/// Environment fallback for `--jobs`.
pub const JOBS_ENV: &str = "ROLLING_TWISTOR_JOBS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rolling_twistor::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use rolling_twistor::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Parse { .. } | E::ParseLine { .. } | E::InvalidParameter(_) | E::FlatProfile(_) | E::EmptyGrid | E::Io(_) => 2,
                _ => 3,
            },
        }
    }
}

/// Outcome of a command that produced output.
pub enum Verdict {
    Done,
    Affirmative,
    Negative,
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cfg) {
        Ok(Verdict::Done | Verdict::Affirmative) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cfg: RunConfig) -> Result<Verdict, CliError> {
    let jobs = cfg.common.jobs()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| match &cfg.command {
        Command::Quartic(a) => commands::quartic(&cfg.common, a, false),
        Command::G2check(a) => commands::quartic(&cfg.common, a, true),
        Command::Roll(a) => commands::roll(&cfg.common, a),
        Command::Oracle(a) => commands::oracle(&cfg.common, a),
        Command::Embed(a) => commands::embed(&cfg.common, a),
        Command::Growth(a) => commands::growth(&cfg.common, a),
    })
}
