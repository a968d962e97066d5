//! Sentiment classification of code-mixed Hindi-English tweets with a
//! convolution + pairwise additive self-attention network written from
//! scratch on `f64` tensors.
//!
//! The pipeline runs CONLL ingestion ([`corpus`]), cleaning and encoding,
//! the model ([`nn`]) built on hand-derived forward/backward ops
//! ([`tensor`]), Adam training and checkpoints ([`train`]) and scoring
//! ([`metrics`]). [`app`] ties these together into the commands exposed by
//! the `hcms` binary.
//!
//! ```no_run
//! use hcms::config::RunConfig;
//! use hcms::corpus::{build_vocab, clean_corpus, read_conll, ParseMode};
//!
//! let corpus = read_conll("train.conll", ParseMode::Lenient).unwrap();
//! let config = RunConfig::default();
//! let cleaned = clean_corpus(&corpus.records, &config.cleaning);
//! let vocab = build_vocab(&cleaned.records, config.min_count);
//! println!("{} tokens in vocabulary", vocab.len());
//! ```

pub mod app;
pub mod config;
pub mod corpus;
pub mod metrics;
pub mod nn;
pub mod tensor;
pub mod train;
