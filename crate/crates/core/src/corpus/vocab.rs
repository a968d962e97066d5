use std::collections::HashMap;

use super::TweetRecord;

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

/// Token ↔ index map with PAD at 0 and UNK at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    min_count: usize,
}

impl Vocabulary {
    /// Builds from tokens already in index order, starting at index 2.
    pub fn from_tokens<I, S>(tokens: I, min_count: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Self {
            index: HashMap::new(),
            tokens: vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()],
            min_count,
        };
        for t in tokens {
            let t = t.into();
            if !v.index.contains_key(&t) {
                v.index.insert(t.clone(), v.tokens.len());
                v.tokens.push(t);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false: PAD and UNK are present.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    /// Index of `token`, or [`UNK_ID`].
    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    /// Every entry in index order, PAD and UNK included.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Tokens seen at least `min_count` times, ordered by descending frequency
/// then lexicographically.
pub fn build_vocab(records: &[TweetRecord], min_count: usize) -> Vocabulary {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in records {
        for t in &r.tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(t, c)| c >= min_count.max(1) && t != PAD_TOKEN && t != UNK_TOKEN)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Vocabulary::from_tokens(kept.into_iter().map(|(t, _)| t), min_count)
}
