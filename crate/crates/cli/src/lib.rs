// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line experiments for `tlrsim`.
//!
//! Subcommands `params`, `transfer-error`, `cphase-error`, `detector` and
//! `validate`. Sweeps print CSV (see [`csv`]); `validate` prints one
//! `id,status,measured,bound` line per invariant.
//!
//! Exit codes: 0 success, 1 experiment or validation failure, 2
//! configuration or usage error.

pub mod config;
pub mod csv;
pub mod experiments;
pub mod validate;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;
use csv::utc_timestamp;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Experiment(String),
    #[error("validation failed")]
    Validation,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tlrsim",
    version,
    about = "Photonic-qubit gate and detector experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration; missing keys take defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `noise.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `noise.samples`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Allow fewer than 100 Monte Carlo samples; output is marked
    /// non-authoritative.
    #[arg(long, global = true)]
    pub quick: bool,
    /// Omit the timestamp line.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Derived device quantities.
    Params,
    /// Transfer error over the κ × Γ₂ grid.
    TransferError,
    /// Spin-echo CZ error over the λ/δω_s grid.
    CphaseError,
    /// Detector efficiency over the Γ/κ grid.
    Detector,
    /// Run every invariant check.
    Validate,
}

/// The configuration after applying command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.noise.seed = seed;
    }
    if let Some(n) = cli.samples {
        config.noise.samples = n;
    }
    if config.noise.samples < 100 && !cli.quick {
        return Err(CliError::Usage(format!(
            "{} Monte Carlo samples requested; fewer than 100 needs --quick",
            config.noise.samples
        )));
    }
    Ok(config)
}

/// Runs one invocation and returns the text to emit plus the outcome.
pub fn execute(cli: &Cli) -> (Option<String>, Result<(), CliError>) {
    let config = match effective_config(cli) {
        Ok(c) => c,
        Err(e) => return (None, Err(e)),
    };
    let timestamp = (!cli.no_timestamp).then(utc_timestamp);
    let sweep = match cli.command {
        Command::Params => experiments::cmd_params(&config),
        Command::TransferError => experiments::cmd_transfer_error(&config, cli.jobs),
        Command::CphaseError => experiments::cmd_cphase_error(&config, cli.jobs),
        Command::Detector => experiments::cmd_detector(&config, cli.jobs),
        Command::Validate => {
            return match validate::cmd_validate(&config, cli.jobs) {
                Ok(report) => {
                    let ok = report.passed();
                    (
                        Some(report.render()),
                        if ok {
                            Ok(())
                        } else {
                            Err(CliError::Validation)
                        },
                    )
                }
                Err(e) => (None, Err(e)),
            };
        }
    };
    match sweep {
        Ok(mut s) => {
            if cli.quick {
                s.authoritative = false;
            }
            let text = s.to_csv(&config, timestamp.as_deref());
            let outcome = match s.failure {
                Some(msg) => Err(CliError::Experiment(msg)),
                None => Ok(()),
            };
            (Some(text), outcome)
        }
        Err(e) => (None, Err(e)),
    }
}

/// Runs `cli`, writes its output and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let (text, outcome) = execute(cli);
    if let Some(text) = text {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, &text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: {}", CliError::Io(e));
            return 1;
        }
    }
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
