//! Reader and writer for the tab-separated CONLL tweet format:
//!
//! ```text
//! meta<TAB>id<TAB>label        (label omitted for unlabeled data)
//! token<TAB>lang_tag
//! ...
//! <blank line>
//! ```

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{CorpusError, LangTag, Sentiment, TweetRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Skip malformed blocks and report them. Also accepts whitespace
    /// instead of tabs and a `meta<TAB>label<TAB>id` field order.
    #[default]
    Lenient,
    /// Abort on the first malformed line.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedBlock {
    /// 1-based line number of the offending line.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutput {
    pub records: Vec<TweetRecord>,
    pub skipped: Vec<SkippedBlock>,
}

struct Line {
    number: usize,
    text: String,
}

fn fields(text: &str, mode: ParseMode) -> Vec<&str> {
    match mode {
        ParseMode::Strict => text.split('\t').collect(),
        ParseMode::Lenient => text.split_whitespace().collect(),
    }
}

fn parse_meta(line: &Line, mode: ParseMode) -> Result<TweetRecord, SkippedBlock> {
    let err = |reason: String| SkippedBlock {
        line: line.number,
        reason,
    };
    let f = fields(&line.text, mode);
    if f.first() != Some(&"meta") {
        return Err(err(format!("expected a meta line, found {:?}", line.text)));
    }
    match f.len() {
        2 if !f[1].is_empty() => Ok(TweetRecord::new(f[1], None)),
        3 if !f[1].is_empty() => {
            if let Ok(label) = f[2].parse::<Sentiment>() {
                return Ok(TweetRecord::new(f[1], Some(label)));
            }
            if mode == ParseMode::Lenient {
                if let Ok(label) = f[1].parse::<Sentiment>() {
                    return Ok(TweetRecord::new(f[2], Some(label)));
                }
            }
            Err(err(format!("unknown sentiment label {:?}", f[2])))
        }
        _ => Err(err(format!("malformed meta line {:?}", line.text))),
    }
}

fn parse_block(block: &[Line], mode: ParseMode) -> Result<TweetRecord, SkippedBlock> {
    let mut record = parse_meta(&block[0], mode)?;
    for line in &block[1..] {
        let f = fields(&line.text, mode);
        if f.len() != 2 || f[0].is_empty() {
            return Err(SkippedBlock {
                line: line.number,
                reason: format!("expected token<TAB>tag, found {:?}", line.text),
            });
        }
        let tag = f[1].parse::<LangTag>().map_err(|reason| SkippedBlock {
            line: line.number,
            reason,
        })?;
        record.push(f[0], tag);
    }
    Ok(record)
}

/// Parses a CONLL stream into records, one per blank-line-separated block.
pub fn parse_conll<R: BufRead>(reader: R, mode: ParseMode) -> Result<ParseOutput, CorpusError> {
    let mut out = ParseOutput::default();
    let mut block: Vec<Line> = Vec::new();
    let flush = |block: &mut Vec<Line>, out: &mut ParseOutput| -> Result<(), CorpusError> {
        if block.is_empty() {
            return Ok(());
        }
        match parse_block(block, mode) {
            Ok(r) => out.records.push(r),
            Err(skip) if mode == ParseMode::Strict => {
                return Err(CorpusError::Parse {
                    line: skip.line,
                    reason: skip.reason,
                })
            }
            Err(skip) => out.skipped.push(skip),
        }
        block.clear();
        Ok(())
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.strip_suffix('\r').unwrap_or(&line);
        if text.trim().is_empty() {
            flush(&mut block, &mut out)?;
        } else {
            block.push(Line {
                number: i + 1,
                text: text.to_string(),
            });
        }
    }
    flush(&mut block, &mut out)?;
    Ok(out)
}

pub fn parse_conll_str(text: &str, mode: ParseMode) -> Result<ParseOutput, CorpusError> {
    parse_conll(text.as_bytes(), mode)
}

pub fn read_conll(path: impl AsRef<Path>, mode: ParseMode) -> Result<ParseOutput, CorpusError> {
    let file = fs::File::open(path)?;
    parse_conll(BufReader::new(file), mode)
}

/// Writes records in canonical form (tab-separated, canonical tag spelling).
pub fn serialize_conll(records: &[TweetRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str("meta\t");
        out.push_str(&r.id);
        if let Some(label) = r.label {
            out.push('\t');
            out.push_str(label.as_str());
        }
        out.push('\n');
        for (tok, tag) in r.tokens.iter().zip(&r.lang_tags) {
            out.push_str(tok);
            out.push('\t');
            out.push_str(tag.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn write_conll(path: impl AsRef<Path>, records: &[TweetRecord]) -> Result<(), CorpusError> {
    fs::write(path, serialize_conll(records))?;
    Ok(())
}
