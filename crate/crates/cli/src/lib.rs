//! The `ledgergraph` command line: ingestion, synthetic ledgers, graph and
//! matrix exports, and scenario replay.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod generate;
pub mod output;

pub use cli::Cli;
pub use config::RunConfig;
pub use error::CliError;

use clap::Parser;
use output::Output;
use std::ffi::OsString;

/// Folds the config file, the environment and the command-line flags over
/// the defaults, in that order.
pub fn resolve_config(
    cli: &Cli,
    env: impl Fn(&str) -> Option<String>,
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &cli.config {
        cfg.apply_file(p)?;
    }
    cfg.apply_env(env)?;
    let mut flags: Vec<(&str, String)> = Vec::new();
    if let Some(s) = cli.seed {
        flags.push(("seed", s.to_string()));
    }
    if let Some(o) = &cli.out {
        flags.push(("out", o.to_string_lossy().into_owned()));
    }
    if let Some(f) = &cli.format {
        flags.push(("format", f.clone()));
    }
    if let cli::Command::Chainlet(a) = &cli.command {
        if let Some(n) = a.n {
            flags.push(("n", n.to_string()));
        }
        if let Some(w) = a.window {
            flags.push(("window", w.to_string()));
        }
    }
    for (k, v) in flags {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

/// Runs one parsed invocation. Writes `summary.json` next to the other
/// outputs and returns the same summary.
pub fn execute(
    cli: &Cli,
    env: impl Fn(&str) -> Option<String>,
) -> Result<serde_json::Value, CliError> {
    let cfg = resolve_config(cli, env)?;
    let mut out = Output::new(&cfg.out, cfg.format)?;
    let mut summary = commands::run_command(&cli.command, &cfg, &mut out)?;
    let mut files = out.written().to_vec();
    files.push("summary.json".into());
    summary["outputs"] = serde_json::json!(files);
    out.json("summary.json", &summary)?;
    Ok(summary)
}

/// Parses `args` (program name first) and runs them against the process
/// environment. Exit code 0, 2 for validation failures, 3 for I/O failures.
pub fn run<I, T>(args: I) -> Result<serde_json::Value, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli =
        Cli::try_parse_from(args).map_err(|e| CliError::validation("cli.usage", e.to_string()))?;
    execute(&cli, |k| std::env::var(k).ok())
}
