//! Run configuration in a flat `key = value` text format.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default; [`RunConfig::to_text`] writes all of them in a fixed order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{CleaningConfig, ParseMode};
use crate::nn::{ModelConfig, Pooling, ScoreActivation};
use crate::train::{OptimizerConfig, TrainConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("I/O error reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
}

/// Model hyperparameters independent of the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub embed_dim: usize,
    pub filters: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pooling: Pooling,
    pub attention_enabled: bool,
    pub attention_hidden: usize,
    pub include_self: bool,
    pub score_activation: ScoreActivation,
    pub max_len: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        let m = ModelConfig::new(2);
        Self {
            embed_dim: m.embed_dim,
            filters: m.filters,
            kernel: m.kernel,
            stride: m.stride,
            pooling: m.pooling,
            attention_enabled: m.attention_enabled,
            attention_hidden: m.attention_hidden,
            include_self: m.include_self,
            score_activation: m.score_activation,
            max_len: m.max_len,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cleaning: CleaningConfig,
    pub min_count: usize,
    pub strict: bool,
    pub model: Hyperparameters,
    pub train: TrainConfig,
    pub optimizer: OptimizerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cleaning: CleaningConfig::default(),
            min_count: 1,
            strict: false,
            model: Hyperparameters::default(),
            train: TrainConfig::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "seed",
    "epochs",
    "batch_size",
    "shuffle",
    "lr",
    "beta1",
    "beta2",
    "epsilon",
    "embed_dim",
    "filters",
    "kernel",
    "stride",
    "pool",
    "pool_stride",
    "attention",
    "attention_hidden",
    "include_self",
    "attention_score",
    "max_len",
    "lowercase",
    "expand_contractions",
    "replace_emoji",
    "collapse_repeats",
    "strip_hashtags",
    "drop_hashtag_words",
    "strip_usernames",
    "strip_links",
    "append_lang_onehot",
    "min_count",
    "strict",
];

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, value, &e.to_string()))
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn keys() -> &'static [&'static str] {
        KEYS
    }

    pub fn parse_mode(&self) -> ParseMode {
        if self.strict {
            ParseMode::Strict
        } else {
            ParseMode::Lenient
        }
    }

    pub fn model_config(&self, vocab_size: usize) -> ModelConfig {
        let h = &self.model;
        ModelConfig {
            vocab_size,
            embed_dim: h.embed_dim,
            lang_features: self.cleaning.append_lang_onehot,
            filters: h.filters,
            kernel: h.kernel,
            stride: h.stride,
            pooling: h.pooling,
            attention_enabled: h.attention_enabled,
            attention_hidden: h.attention_hidden,
            include_self: h.include_self,
            score_activation: h.score_activation,
            max_len: h.max_len,
        }
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let c = &mut self.cleaning;
        let m = &mut self.model;
        match key {
            "seed" => self.train.seed = parse_num(key, value)?,
            "epochs" => self.train.epochs = parse_num(key, value)?,
            "batch_size" => self.train.batch_size = parse_num(key, value)?,
            "shuffle" => self.train.shuffle = parse_bool(key, value)?,
            "lr" => self.optimizer.lr = parse_num(key, value)?,
            "beta1" => self.optimizer.beta1 = parse_num(key, value)?,
            "beta2" => self.optimizer.beta2 = parse_num(key, value)?,
            "epsilon" => self.optimizer.epsilon = parse_num(key, value)?,
            "embed_dim" => m.embed_dim = parse_num(key, value)?,
            "filters" => m.filters = parse_num(key, value)?,
            "kernel" => m.kernel = parse_num(key, value)?,
            "stride" => m.stride = parse_num(key, value)?,
            "pool" => {
                m.pooling = if value.eq_ignore_ascii_case("global") {
                    Pooling::Global
                } else {
                    let size = parse_num(key, value)?;
                    let stride = match m.pooling {
                        Pooling::Window { stride, .. } => stride,
                        Pooling::Global => size,
                    };
                    Pooling::Window { size, stride }
                }
            }
            "pool_stride" => {
                let stride = parse_num(key, value)?;
                match &mut m.pooling {
                    Pooling::Window { stride: s, .. } => *s = stride,
                    Pooling::Global => {
                        if stride != 1 {
                            return Err(bad(key, value, "global pooling takes pool_stride = 1"));
                        }
                    }
                }
            }
            "attention" => m.attention_enabled = parse_bool(key, value)?,
            "attention_hidden" => m.attention_hidden = parse_num(key, value)?,
            "include_self" => m.include_self = parse_bool(key, value)?,
            "attention_score" => {
                m.score_activation = match value {
                    "sigmoid" => ScoreActivation::Sigmoid,
                    "raw" => ScoreActivation::Identity,
                    _ => return Err(bad(key, value, "expected sigmoid or raw")),
                }
            }
            "max_len" => m.max_len = parse_num(key, value)?,
            "lowercase" => c.lowercase = parse_bool(key, value)?,
            "expand_contractions" => c.expand_contractions = parse_bool(key, value)?,
            "replace_emoji" => c.replace_emoji = parse_bool(key, value)?,
            "collapse_repeats" => c.collapse_repeats = parse_bool(key, value)?,
            "strip_hashtags" => c.strip_hashtags = parse_bool(key, value)?,
            "drop_hashtag_words" => c.drop_hashtag_words = parse_bool(key, value)?,
            "strip_usernames" => c.strip_usernames = parse_bool(key, value)?,
            "strip_links" => c.strip_links = parse_bool(key, value)?,
            "append_lang_onehot" => c.append_lang_onehot = parse_bool(key, value)?,
            "min_count" => self.min_count = parse_num(key, value)?,
            "strict" => self.strict = parse_bool(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Current value of `key` in text form.
    pub fn get(&self, key: &str) -> Option<String> {
        let c = &self.cleaning;
        let m = &self.model;
        Some(match key {
            "seed" => self.train.seed.to_string(),
            "epochs" => self.train.epochs.to_string(),
            "batch_size" => self.train.batch_size.to_string(),
            "shuffle" => self.train.shuffle.to_string(),
            "lr" => format!("{:?}", self.optimizer.lr),
            "beta1" => format!("{:?}", self.optimizer.beta1),
            "beta2" => format!("{:?}", self.optimizer.beta2),
            "epsilon" => format!("{:?}", self.optimizer.epsilon),
            "embed_dim" => m.embed_dim.to_string(),
            "filters" => m.filters.to_string(),
            "kernel" => m.kernel.to_string(),
            "stride" => m.stride.to_string(),
            "pool" => match m.pooling {
                Pooling::Window { size, .. } => size.to_string(),
                Pooling::Global => "global".into(),
            },
            "pool_stride" => match m.pooling {
                Pooling::Window { stride, .. } => stride.to_string(),
                Pooling::Global => "1".into(),
            },
            "attention" => m.attention_enabled.to_string(),
            "attention_hidden" => m.attention_hidden.to_string(),
            "include_self" => m.include_self.to_string(),
            "attention_score" => match m.score_activation {
                ScoreActivation::Sigmoid => "sigmoid".into(),
                ScoreActivation::Identity => "raw".into(),
            },
            "max_len" => m.max_len.to_string(),
            "lowercase" => c.lowercase.to_string(),
            "expand_contractions" => c.expand_contractions.to_string(),
            "replace_emoji" => c.replace_emoji.to_string(),
            "collapse_repeats" => c.collapse_repeats.to_string(),
            "strip_hashtags" => c.strip_hashtags.to_string(),
            "drop_hashtag_words" => c.drop_hashtag_words.to_string(),
            "strip_usernames" => c.strip_usernames.to_string(),
            "strip_links" => c.strip_links.to_string(),
            "append_lang_onehot" => c.append_lang_onehot.to_string(),
            "min_count" => self.min_count.to_string(),
            "strict" => self.strict.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }
}
