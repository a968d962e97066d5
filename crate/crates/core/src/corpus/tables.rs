//! Bundled emoji and contraction tables (`data/*.tsv`).

use std::collections::HashMap;
use std::sync::OnceLock;

const EMOJI_TSV: &str = include_str!("../../data/emoji.tsv");
const CONTRACTIONS_TSV: &str = include_str!("../../data/contractions.tsv");

fn parse_table(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Version line of a table file, e.g. `1`.
fn table_version(text: &str) -> &str {
    text.lines()
        .find_map(|l| l.strip_prefix("# version:"))
        .map_or("unversioned", str::trim)
}

pub struct EmojiTable {
    names: HashMap<String, String>,
    max_chars: usize,
}

impl EmojiTable {
    /// Longest table entry starting at the beginning of `s`, as
    /// `(byte length, name)`.
    pub fn match_prefix(&self, s: &str) -> Option<(usize, &str)> {
        let ends: Vec<usize> = s
            .char_indices()
            .skip(1)
            .map(|(i, _)| i)
            .chain(std::iter::once(s.len()))
            .take(self.max_chars)
            .collect();
        ends.iter()
            .rev()
            .find_map(|&end| self.names.get(&s[..end]).map(|n| (end, n.as_str())))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn emoji() -> &'static EmojiTable {
    static TABLE: OnceLock<EmojiTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let names = parse_table(EMOJI_TSV);
        let max_chars = names.keys().map(|k| k.chars().count()).max().unwrap_or(1);
        EmojiTable { names, max_chars }
    })
}

/// Lowercase contraction → expansion (space-separated words).
pub fn contractions() -> &'static HashMap<String, String> {
    static TABLE: OnceLock<HashMap<String, String>> = OnceLock::new();
    TABLE.get_or_init(|| parse_table(CONTRACTIONS_TSV))
}

pub fn emoji_table_version() -> &'static str {
    table_version(EMOJI_TSV)
}

pub fn contraction_table_version() -> &'static str {
    table_version(CONTRACTIONS_TSV)
}
