//! Command implementations behind the `hcms` binary.
//!
//! Every command writes its resolved configuration to `config.txt` in the
//! output directory next to the artifacts it produces.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::corpus::{
    build_vocab, clean, clean_corpus, corpus_stats, encode, read_conll, write_conll, CorpusError, CorpusStats,
    Sentiment, SkippedBlock, TweetRecord, Vocabulary,
};
use crate::metrics::{results_table, MetricsReport};
use crate::nn::Hcms;
use crate::train::{
    evaluate, load_checkpoint, save_checkpoint, train, Checkpoint, CheckpointError, Example, TrainError,
    TrainOutcome,
};

pub const CONFIG_FILE: &str = "config.txt";
pub const CHECKPOINT_FILE: &str = "model.hcms";
pub const EPOCH_LOG_FILE: &str = "epoch_log.tsv";
pub const CLEANED_FILE: &str = "cleaned.conll";
pub const SKIP_REPORT_FILE: &str = "skip_report.txt";
pub const PREDICTIONS_FILE: &str = "predictions.tsv";

#[derive(Debug, Error)]
pub enum AppError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: parse error at line {line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("{path}: {source}")]
    Checkpoint {
        path: PathBuf,
        source: CheckpointError,
    },
    #[error("data error: {0}")]
    Data(String),
    #[error(transparent)]
    Train(TrainError),
}

impl AppError {
    /// Process exit status for this error class.
    ///
    /// | code | class |
    /// |------|-------|
    /// | 1 | internal failure |
    /// | 2 | bad usage or configuration |
    /// | 3 | missing or unreadable file |
    /// | 4 | malformed corpus |
    /// | 5 | unreadable checkpoint or version mismatch |
    /// | 6 | unusable data (empty corpus, missing labels) |
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) | AppError::Config(_) => 2,
            AppError::Io { .. } => 3,
            AppError::Parse { .. } => 4,
            AppError::Checkpoint { .. } => 5,
            AppError::Data(_) => 6,
            AppError::Train(TrainError::Config(_)) => 2,
            AppError::Train(TrainError::Data(_) | TrainError::Label(_)) => 6,
            AppError::Train(_) => 1,
        }
    }
}

impl From<TrainError> for AppError {
    fn from(e: TrainError) -> Self {
        AppError::Train(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), AppError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn prepare_out_dir(out_dir: &Path, config: &RunConfig) -> Result<(), AppError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    write_file(&out_dir.join(CONFIG_FILE), config.to_text())
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

/// Reads a CONLL file in the parse mode selected by `config`.
pub fn load_corpus(path: &Path, config: &RunConfig) -> Result<(Vec<TweetRecord>, Vec<SkippedBlock>), AppError> {
    match read_conll(path, config.parse_mode()) {
        Ok(out) => Ok((out.records, out.skipped)),
        Err(CorpusError::Io(source)) => Err(AppError::Io {
            path: path.to_path_buf(),
            source,
        }),
        Err(CorpusError::Parse { line, reason }) => Err(AppError::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        }),
    }
}

/// Cleaned, labeled, encoded examples; records without a label or left
/// empty by cleaning are omitted.
pub fn prepare_examples(records: &[TweetRecord], vocab: &Vocabulary, config: &RunConfig) -> Vec<Example> {
    clean_corpus(records, &config.cleaning)
        .records
        .iter()
        .filter_map(|r| {
            let label = r.label?.index();
            let e = encode(r, vocab, &config.cleaning);
            Some(Example {
                ids: e.ids,
                lang: e.lang,
                label,
            })
        })
        .collect()
}

fn labeled(records: &[TweetRecord]) -> Vec<TweetRecord> {
    records.iter().filter(|r| r.label.is_some()).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessSummary {
    pub records: usize,
    pub skipped: Vec<SkippedBlock>,
    /// Ids of records that cleaning left empty.
    pub dropped: Vec<String>,
}

impl PreprocessSummary {
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "records_written\t{}", self.records);
        let _ = writeln!(out, "blocks_skipped\t{}", self.skipped.len());
        let _ = writeln!(out, "records_dropped_empty\t{}", self.dropped.len());
        for s in &self.skipped {
            let _ = writeln!(out, "skipped\tline {}\t{}", s.line, s.reason);
        }
        for id in &self.dropped {
            let _ = writeln!(out, "dropped\t{id}");
        }
        out
    }
}

/// Cleans a corpus and writes it back as CONLL with a skip report.
pub fn cmd_preprocess(input: &Path, config: &RunConfig, out_dir: &Path) -> Result<PreprocessSummary, AppError> {
    let (records, skipped) = load_corpus(input, config)?;
    prepare_out_dir(out_dir, config)?;
    let cleaned = clean_corpus(&records, &config.cleaning);
    let path = out_dir.join(CLEANED_FILE);
    write_conll(&path, &cleaned.records).map_err(|e| match e {
        CorpusError::Io(source) => AppError::Io { path: path.clone(), source },
        CorpusError::Parse { reason, .. } => AppError::Data(reason),
    })?;
    let summary = PreprocessSummary {
        records: cleaned.records.len(),
        skipped,
        dropped: cleaned.dropped,
    };
    write_file(&out_dir.join(SKIP_REPORT_FILE), summary.report())?;
    Ok(summary)
}

/// Trains in memory: vocabulary from the cleaned training records, model
/// selection on `val` (or the training set when `val` is empty).
pub fn fit(
    train_records: &[TweetRecord],
    val_records: &[TweetRecord],
    config: &RunConfig,
) -> Result<(Checkpoint, TrainOutcome), AppError> {
    let train_labeled = labeled(train_records);
    let cleaned = clean_corpus(&train_labeled, &config.cleaning);
    if cleaned.records.is_empty() {
        return Err(AppError::Data("no labeled, non-empty training records".into()));
    }
    let vocab = build_vocab(&cleaned.records, config.min_count);
    let train_ex = prepare_examples(&train_labeled, &vocab, config);
    let val_ex = prepare_examples(val_records, &vocab, config);
    let model = Hcms::new(config.model_config(vocab.len()), config.train.seed).map_err(TrainError::from)?;
    let outcome = train(model, &train_ex, &val_ex, &config.train, &config.optimizer)?;
    let checkpoint = Checkpoint {
        config: config.clone(),
        vocab,
        model: outcome.model.clone(),
    };
    Ok((checkpoint, outcome))
}

/// Trains a model and writes the checkpoint and epoch log.
pub fn cmd_train(train_path: &Path, val_path: Option<&Path>, config: &RunConfig, out_dir: &Path) -> Result<TrainOutcome, AppError> {
    let (train_records, _) = load_corpus(train_path, config)?;
    let val_records = match val_path {
        Some(p) => load_corpus(p, config)?.0,
        None => Vec::new(),
    };
    prepare_out_dir(out_dir, config)?;
    let (checkpoint, outcome) = fit(&train_records, &val_records, config)?;
    let ck_path = out_dir.join(CHECKPOINT_FILE);
    save_checkpoint(&checkpoint, &ck_path).map_err(|source| AppError::Checkpoint { path: ck_path, source })?;
    write_file(&out_dir.join(EPOCH_LOG_FILE), outcome.log_tsv())?;
    Ok(outcome)
}

pub fn open_checkpoint(path: &Path) -> Result<Checkpoint, AppError> {
    load_checkpoint(path).map_err(|source| match source {
        CheckpointError::Io(source) => AppError::Io {
            path: path.to_path_buf(),
            source,
        },
        source => AppError::Checkpoint {
            path: path.to_path_buf(),
            source,
        },
    })
}

/// Scores a checkpoint on a labeled corpus; writes `metrics.txt` and
/// `metrics.json`. Cleaning follows the checkpoint's configuration.
pub fn cmd_eval(checkpoint: &Path, labeled_path: &Path, out_dir: &Path) -> Result<MetricsReport, AppError> {
    let ck = open_checkpoint(checkpoint)?;
    let (records, _) = load_corpus(labeled_path, &ck.config)?;
    let examples = prepare_examples(&records, &ck.vocab, &ck.config);
    if examples.is_empty() {
        return Err(AppError::Data(format!("{}: no labeled records to evaluate", labeled_path.display())));
    }
    prepare_out_dir(out_dir, &ck.config)?;
    let report = evaluate(&ck.model, &examples)?.report;
    write_file(&out_dir.join("metrics.txt"), report.to_text())?;
    write_file(&out_dir.join("metrics.json"), json_text(&report.to_json()))?;
    Ok(report)
}

/// Labels every record of a corpus, one `id<TAB>label` line per record.
/// A record that cleaning empties is classified from an all-padding input.
pub fn cmd_predict(checkpoint: &Path, input: &Path, out_dir: &Path) -> Result<Vec<(String, Sentiment)>, AppError> {
    let ck = open_checkpoint(checkpoint)?;
    let (records, _) = load_corpus(input, &ck.config)?;
    prepare_out_dir(out_dir, &ck.config)?;
    let mut predictions = Vec::with_capacity(records.len());
    let mut out = String::new();
    for r in &records {
        let e = encode(&clean(r, &ck.config.cleaning), &ck.vocab, &ck.config.cleaning);
        let class = ck.model.predict(&e.ids, &e.lang).map_err(TrainError::from)?;
        let label = Sentiment::from_index(class).expect("model emits three classes");
        let _ = writeln!(out, "{}\t{}", r.id, label.as_str());
        predictions.push((r.id.clone(), label));
    }
    write_file(&out_dir.join(PREDICTIONS_FILE), out)?;
    Ok(predictions)
}

/// Label and language-tag distribution of a raw corpus.
pub fn cmd_stats(input: &Path, config: &RunConfig, out_dir: &Path) -> Result<CorpusStats, AppError> {
    let (records, _) = load_corpus(input, config)?;
    prepare_out_dir(out_dir, config)?;
    let stats = corpus_stats(&records);
    write_file(&out_dir.join("stats.txt"), stats.to_text())?;
    write_file(&out_dir.join("stats.json"), json_text(&stats.to_json()))?;
    Ok(stats)
}

/// One configuration of the ablation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub name: String,
    pub replace_emoji: bool,
    pub expand_contractions: bool,
    pub attention: bool,
    pub best_epoch: usize,
    /// Test-set scores of the selected model.
    pub report: MetricsReport,
}

/// The grid: four preprocessing rows over {emoji} × {contractions} with
/// the base model, then the base preprocessing with attention on and off.
pub fn ablation_grid(base: &RunConfig) -> Vec<(String, RunConfig)> {
    let mut rows = Vec::with_capacity(6);
    for (name, emoji, contractions) in [
        ("HCMS + emoji + contractions", true, true),
        ("HCMS + emoji", true, false),
        ("HCMS + contractions", false, true),
        ("HCMS, no emoji or contractions", false, false),
    ] {
        let mut c = base.clone();
        c.cleaning.replace_emoji = emoji;
        c.cleaning.expand_contractions = contractions;
        rows.push((name.to_string(), c));
    }
    for (name, attention) in [("HCMS", true), ("HCMS w/o self-attention", false)] {
        let mut c = base.clone();
        c.model.attention_enabled = attention;
        rows.push((name.to_string(), c));
    }
    rows
}

/// In-memory ablation over already loaded corpora. Identical
/// configurations are trained once.
pub fn ablate_records(
    train_records: &[TweetRecord],
    val_records: &[TweetRecord],
    test_records: &[TweetRecord],
    config: &RunConfig,
) -> Result<Vec<AblationRow>, AppError> {
    let mut done: HashMap<String, (usize, MetricsReport)> = HashMap::new();
    let mut rows = Vec::new();
    for (name, c) in ablation_grid(config) {
        let key = c.to_text();
        let (best_epoch, report) = match done.get(&key) {
            Some(hit) => hit.clone(),
            None => {
                let (ck, outcome) = fit(train_records, val_records, &c)?;
                let test = prepare_examples(test_records, &ck.vocab, &c);
                if test.is_empty() {
                    return Err(AppError::Data("no labeled test records".into()));
                }
                let report = evaluate(&ck.model, &test)?.report;
                done.insert(key, (outcome.best_epoch, report.clone()));
                (outcome.best_epoch, report)
            }
        };
        rows.push(AblationRow {
            name,
            replace_emoji: c.cleaning.replace_emoji,
            expand_contractions: c.cleaning.expand_contractions,
            attention: c.model.attention_enabled,
            best_epoch,
            report,
        });
    }
    Ok(rows)
}

pub fn ablation_table(rows: &[AblationRow]) -> String {
    let (pre, att) = rows.split_at(rows.len().min(4));
    let table = |rs: &[AblationRow]| {
        let named: Vec<(String, &MetricsReport)> = rs.iter().map(|r| (r.name.clone(), &r.report)).collect();
        results_table(&named)
    };
    format!("Preprocessing\n{}\nAttention\n{}", table(pre), table(att))
}

pub fn ablation_json(rows: &[AblationRow]) -> serde_json::Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "name": r.name,
            "replace_emoji": r.replace_emoji,
            "expand_contractions": r.expand_contractions,
            "attention": r.attention,
            "best_epoch": r.best_epoch,
            "test_f1": r.report.f1(),
            "test_macro_f1": r.report.macro_avg.f1,
            "test_accuracy": r.report.accuracy,
            "report": r.report.to_json(),
        }))
        .collect::<Vec<_>>())
}

/// Runs the ablation grid, scoring each configuration on `test_path`.
pub fn cmd_ablate(
    train_path: &Path,
    val_path: Option<&Path>,
    test_path: &Path,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<Vec<AblationRow>, AppError> {
    let (train_records, _) = load_corpus(train_path, config)?;
    let val_records = match val_path {
        Some(p) => load_corpus(p, config)?.0,
        None => Vec::new(),
    };
    let (test_records, _) = load_corpus(test_path, config)?;
    prepare_out_dir(out_dir, config)?;
    let rows = ablate_records(&train_records, &val_records, &test_records, config)?;
    write_file(&out_dir.join("ablation.txt"), ablation_table(&rows))?;
    write_file(&out_dir.join("ablation.json"), json_text(&ablation_json(&rows)))?;
    Ok(rows)
}
