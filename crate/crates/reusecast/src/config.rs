//! Flat `key = value` run configuration, overridable by CLI flags.
//!
//! Unknown keys are rejected so typos surface instead of silently keeping a
//! default. All randomness in a run flows from the single `seed` value.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rnn::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Plain,
    Msr,
}

/// Everything a pipeline run needs, with defaults for all but the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trace: PathBuf,
    pub format: TraceFormat,
    pub block_size: u64,
    pub expand_multiblock: bool,
    pub k_avg: usize,
    pub k_freq: usize,
    pub sequence_length: usize,
    pub cluster_k_min: usize,
    pub cluster_k_max: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub patience: usize,
    pub lstm_width: usize,
    pub lstm_layers: usize,
    pub split_ratio: f64,
    pub train_take: Option<usize>,
    pub val_take: Option<usize>,
    pub policies: Vec<String>,
    pub cache_sizes: Vec<usize>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub emit_svg: bool,
    pub dataset_path: Option<PathBuf>,
    pub checkpoint_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trace: PathBuf::new(),
            format: TraceFormat::Plain,
            block_size: 4096,
            expand_multiblock: false,
            k_avg: 100,
            k_freq: 50,
            sequence_length: 8,
            cluster_k_min: 2,
            cluster_k_max: 16,
            epochs: 1000,
            learning_rate: 0.001,
            batch_size: 32,
            dropout: 0.2,
            patience: 20,
            lstm_width: 256,
            lstm_layers: 2,
            split_ratio: 0.8,
            train_take: None,
            val_take: None,
            policies: ["lru", "lfu", "2q", "arc", "opt"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            cache_sizes: Vec::new(),
            out_dir: PathBuf::from("out"),
            seed: 42,
            emit_svg: true,
            dataset_path: None,
            checkpoint_path: None,
        }
    }
}

impl RunConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<RunConfig> {
        let text = fs::read_to_string(&path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut values: HashMap<&str, &str> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            values.insert(key.trim(), value.trim());
        }
        Self::from_values(values)
    }

    fn from_values(values: HashMap<&str, &str>) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        for (key, value) in values {
            match key {
                "trace" => config.trace = PathBuf::from(value),
                "format" => {
                    config.format = match value {
                        "plain" => TraceFormat::Plain,
                        "msr" => TraceFormat::Msr,
                        other => {
                            return Err(Error::Config(format!(
                                "format must be plain or msr, got {other:?}"
                            )))
                        }
                    }
                }
                "block_size" => config.block_size = parse_num(key, value)?,
                "expand_multiblock" => config.expand_multiblock = parse_bool(key, value)?,
                "k_avg" => config.k_avg = parse_num(key, value)?,
                "k_freq" => config.k_freq = parse_num(key, value)?,
                "sequence_length" => config.sequence_length = parse_num(key, value)?,
                "cluster_k_min" => config.cluster_k_min = parse_num(key, value)?,
                "cluster_k_max" => config.cluster_k_max = parse_num(key, value)?,
                "epochs" => config.epochs = parse_num(key, value)?,
                "learning_rate" => config.learning_rate = parse_num(key, value)?,
                "batch_size" => config.batch_size = parse_num(key, value)?,
                "dropout" => config.dropout = parse_num(key, value)?,
                "patience" => config.patience = parse_num(key, value)?,
                "lstm_width" => config.lstm_width = parse_num(key, value)?,
                "lstm_layers" => config.lstm_layers = parse_num(key, value)?,
                "split_ratio" => config.split_ratio = parse_num(key, value)?,
                "train_take" => config.train_take = Some(parse_num(key, value)?),
                "val_take" => config.val_take = Some(parse_num(key, value)?),
                "policies" => {
                    config.policies = value
                        .split(',')
                        .map(|s| s.trim().to_lowercase())
                        .filter(|s| !s.is_empty())
                        .collect()
                }
                "cache_sizes" => {
                    config.cache_sizes = value
                        .split(',')
                        .map(|s| parse_num::<usize>("cache_sizes", s.trim()))
                        .collect::<Result<_>>()?
                }
                "out_dir" => config.out_dir = PathBuf::from(value),
                "seed" => config.seed = parse_num(key, value)?,
                "emit_svg" => config.emit_svg = parse_bool(key, value)?,
                "dataset" => config.dataset_path = Some(PathBuf::from(value)),
                "checkpoint" => config.checkpoint_path = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        Ok(config)
    }

    /// Applies the `--seed` / `--out` flag overrides.
    pub fn apply_overrides(&mut self, seed: Option<u64>, out: Option<PathBuf>) {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(out) = out {
            self.out_dir = out;
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            dropout: self.dropout,
            seed: self.seed,
            patience: self.patience,
            width: self.lstm_width,
            layers: self.lstm_layers,
        }
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.dataset_path
            .clone()
            .unwrap_or_else(|| self.out_dir.join("dataset.rlds"))
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.checkpoint_path
            .clone()
            .unwrap_or_else(|| self.out_dir.join("checkpoint.rlck"))
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!("bad boolean {other:?} for {key}"))),
    }
}
