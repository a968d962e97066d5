//! Tweet ingestion and preprocessing: CONLL reading and writing, cleaning,
//! vocabulary, encoding and corpus statistics.

mod clean;
mod conll;
mod encode;
mod stats;
pub mod synth;
pub mod tables;
mod vocab;

pub use clean::{clean, clean_corpus, CleanedCorpus, CleaningConfig};
pub use conll::{parse_conll, parse_conll_str, read_conll, serialize_conll, write_conll, ParseMode, ParseOutput, SkippedBlock};
pub use encode::{encode, Encoded};
pub use stats::{corpus_stats, CorpusStats};
pub use vocab::{build_vocab, Vocabulary, PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Per-token language tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LangTag {
    Hin,
    Eng,
    O,
    Emt,
}

impl LangTag {
    pub const ALL: [LangTag; 4] = [LangTag::Hin, LangTag::Eng, LangTag::O, LangTag::Emt];

    /// Position in the one-hot encoding (HIN, ENG, O, EMT).
    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical spelling used when writing CONLL.
    pub fn as_str(self) -> &'static str {
        match self {
            LangTag::Hin => "Hin",
            LangTag::Eng => "Eng",
            LangTag::O => "O",
            LangTag::Emt => "EMT",
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LangTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hin" => Ok(LangTag::Hin),
            "eng" => Ok(LangTag::Eng),
            "o" => Ok(LangTag::O),
            "emt" => Ok(LangTag::Emt),
            _ => Err(format!("unknown language tag {s:?}")),
        }
    }
}

/// Sentiment class. The discriminant is the class index used by the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sentiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(Sentiment::Positive),
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            _ => Err(format!("unknown sentiment label {s:?}")),
        }
    }
}

/// One tweet: id, tokens with their language tags, and an optional label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub id: String,
    pub tokens: Vec<String>,
    pub lang_tags: Vec<LangTag>,
    pub label: Option<Sentiment>,
}

impl TweetRecord {
    pub fn new(id: impl Into<String>, label: Option<Sentiment>) -> Self {
        Self {
            id: id.into(),
            tokens: Vec::new(),
            lang_tags: Vec::new(),
            label,
        }
    }

    pub fn push(&mut self, token: impl Into<String>, tag: LangTag) {
        self.tokens.push(token.into());
        self.lang_tags.push(tag);
    }

    pub fn with_tokens<'a>(mut self, tokens: impl IntoIterator<Item = (&'a str, LangTag)>) -> Self {
        for (tok, tag) in tokens {
            self.push(tok, tag);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}
