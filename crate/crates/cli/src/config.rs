//! Run configuration: defaults, then a key-value config file, then
//! `LEDGERGRAPH_*` environment variables, then command-line flags.

use crate::error::CliError;
use ledgergraph_core::ExportFormat;
use ledgergraph_iota::TipStrategy;
use std::path::{Path, PathBuf};

pub const ENV_PREFIX: &str = "LEDGERGRAPH_";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub format: ExportFormat,
    /// Chainlet fold dimension.
    pub n: usize,
    /// Blocks per chainlet window; 0 means one window over everything.
    pub window: u64,
    pub count: usize,
    pub txs_per_block: usize,
    pub split_bias: f64,
    pub reuse_probability: f64,
    pub rings: bool,
    pub shielded: bool,
    pub trust_density: f64,
    pub tip_strategy: TipStrategy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out: PathBuf::from("out"),
            format: ExportFormat::Csv,
            n: 20,
            window: 0,
            count: 1_000,
            txs_per_block: 100,
            split_bias: 0.5,
            reuse_probability: 0.1,
            rings: false,
            shielded: false,
            trust_density: 0.3,
            tip_strategy: TipStrategy::Uniform,
        }
    }
}

pub const KEYS: [&str; 13] = [
    "seed",
    "out",
    "format",
    "n",
    "window",
    "count",
    "txs_per_block",
    "split_bias",
    "reuse_probability",
    "rings",
    "shielded",
    "trust_density",
    "tip_strategy",
];

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::validation("cli.config", format!("{key} = {value:?}: {why}"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| bad(key, value, e))
}

fn probability(key: &str, value: &str) -> Result<f64, CliError> {
    let p: f64 = parse(key, value)?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(bad(key, value, "must lie in [0, 1]"))
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "format" => self.format = value.parse().map_err(|e: String| bad(key, value, e))?,
            "n" => {
                self.n = parse(key, value)?;
                if self.n == 0 {
                    return Err(bad(key, value, "must be positive"));
                }
            }
            "window" => self.window = parse(key, value)?,
            "count" => self.count = parse(key, value)?,
            "txs_per_block" => self.txs_per_block = parse(key, value)?,
            "split_bias" => self.split_bias = probability(key, value)?,
            "reuse_probability" => self.reuse_probability = probability(key, value)?,
            "rings" => self.rings = parse(key, value)?,
            "shielded" => self.shielded = parse(key, value)?,
            "trust_density" => self.trust_density = probability(key, value)?,
            "tip_strategy" => {
                self.tip_strategy = match value.trim() {
                    "uniform" => TipStrategy::Uniform,
                    "oldest" => TipStrategy::Oldest,
                    _ => return Err(bad(key, value, "expected uniform or oldest")),
                }
            }
            _ => {
                return Err(CliError::validation(
                    "cli.config",
                    format!("unknown key {key:?}"),
                ))
            }
        }
        Ok(())
    }

    /// Flat `key = value` file (TOML syntax, no tables).
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::validation("cli.config", e))?;
        for (k, v) in table {
            let s = match v {
                toml::Value::String(s) => s,
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => return Err(bad(&k, &other.to_string(), "expected a plain value")),
            };
            self.set(&k, &s)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io("cli.io", format!("{}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    /// `LEDGERGRAPH_SEED`, `LEDGERGRAPH_SPLIT_BIAS`, ... from `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), CliError> {
        for key in KEYS {
            if let Some(v) = lookup(&format!("{ENV_PREFIX}{}", key.to_ascii_uppercase())) {
                self.set(key, &v)?;
            }
        }
        Ok(())
    }
}
