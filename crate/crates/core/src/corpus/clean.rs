//! Tweet cleaning. Enabled steps run per token in a fixed order:
//! lowercase → link strip → username strip → hashtag strip → emoji
//! replacement → contraction expansion → repeat collapse.

use super::{tables, TweetRecord};

/// Per-step toggles. Every flag is independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleaningConfig {
    pub lowercase: bool,
    pub expand_contractions: bool,
    pub replace_emoji: bool,
    /// Cap runs of a repeated character at two.
    pub collapse_repeats: bool,
    /// Remove the leading `#` of hashtags.
    pub strip_hashtags: bool,
    /// With `strip_hashtags`, drop the whole hashtag instead of keeping the word.
    pub drop_hashtag_words: bool,
    pub strip_usernames: bool,
    pub strip_links: bool,
    /// Not a cleaning step: tells the encoder to emit language one-hots.
    pub append_lang_onehot: bool,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            expand_contractions: true,
            replace_emoji: true,
            collapse_repeats: true,
            strip_hashtags: true,
            drop_hashtag_words: false,
            strip_usernames: true,
            strip_links: true,
            append_lang_onehot: false,
        }
    }
}

impl CleaningConfig {
    /// Every step off.
    pub fn none() -> Self {
        Self {
            lowercase: false,
            expand_contractions: false,
            replace_emoji: false,
            collapse_repeats: false,
            strip_hashtags: false,
            drop_hashtag_words: false,
            strip_usernames: false,
            strip_links: false,
            append_lang_onehot: false,
        }
    }
}

const REPEAT_CAP: usize = 2;

fn collapse_runs(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev = None;
    let mut run = 0;
    for c in s.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= REPEAT_CAP {
            out.push(c);
        }
    }
    out
}

/// Emoji modifiers left over when a sequence only partially matches the table.
fn is_emoji_residue(c: char) -> bool {
    matches!(c, '\u{200d}' | '\u{fe0f}' | '\u{fe0e}' | '\u{2640}' | '\u{2642}' | '\u{1f3fb}'..='\u{1f3ff}')
}

struct Cleaner<'a> {
    cfg: &'a CleaningConfig,
}

impl Cleaner<'_> {
    /// Form used for matching, so later steps cannot create a match that
    /// an earlier step would have acted on.
    fn key(&self, tok: &str) -> String {
        let lower = tok.to_lowercase().replace('\u{2019}', "'");
        if self.cfg.collapse_repeats {
            collapse_runs(&lower)
        } else {
            lower
        }
    }

    fn is_link(&self, tok: &str) -> bool {
        let k = self.key(tok);
        let www = if self.cfg.collapse_repeats { "ww." } else { "www." };
        k.starts_with("http://") || k.starts_with("https://") || k.starts_with(www)
    }

    /// Link, username and hashtag steps. `None` drops the token.
    fn strip(&self, tok: String) -> Option<String> {
        if self.cfg.strip_links && self.is_link(&tok) {
            return None;
        }
        if self.cfg.strip_usernames && tok.starts_with('@') {
            return None;
        }
        if self.cfg.strip_hashtags && tok.starts_with('#') {
            let word = tok.trim_start_matches('#');
            if self.cfg.drop_hashtag_words || word.is_empty() {
                return None;
            }
            return self.strip(word.to_string());
        }
        Some(tok)
    }

    fn split_emoji(&self, tok: String, out: &mut Vec<String>) {
        let table = tables::emoji();
        let mut text = String::new();
        let mut rest = tok.as_str();
        let flush = |text: &mut String, out: &mut Vec<String>| {
            if let Some(t) = self.strip(std::mem::take(text)) {
                if !t.is_empty() && !t.chars().all(is_emoji_residue) {
                    out.push(t);
                }
            }
            text.clear();
        };
        while let Some(c) = rest.chars().next() {
            if let Some((len, name)) = table.match_prefix(rest) {
                flush(&mut text, out);
                out.push(name.to_string());
                rest = &rest[len..];
            } else {
                text.push(c);
                rest = &rest[c.len_utf8()..];
            }
        }
        flush(&mut text, out);
    }

    fn expand(&self, tok: String, out: &mut Vec<String>) {
        if let Some(full) = tables::contractions().get(&self.key(&tok)) {
            out.extend(full.split(' ').map(str::to_string));
        } else {
            out.push(tok);
        }
    }

    fn token(&self, tok: &str) -> Vec<String> {
        let tok = if self.cfg.lowercase {
            tok.to_lowercase()
        } else {
            tok.to_string()
        };
        let Some(tok) = self.strip(tok) else {
            return Vec::new();
        };
        let mut pieces = Vec::new();
        if self.cfg.replace_emoji {
            self.split_emoji(tok, &mut pieces);
        } else {
            pieces.push(tok);
        }
        if self.cfg.expand_contractions {
            let mut expanded = Vec::with_capacity(pieces.len());
            for p in pieces {
                self.expand(p, &mut expanded);
            }
            pieces = expanded;
        }
        if self.cfg.collapse_repeats {
            for p in &mut pieces {
                *p = collapse_runs(p);
            }
        }
        pieces.retain(|p| !p.is_empty());
        pieces
    }
}

/// Applies the enabled cleaning steps. Tokens produced from one input token
/// inherit its language tag. The result may have no tokens.
pub fn clean(record: &TweetRecord, cfg: &CleaningConfig) -> TweetRecord {
    let cleaner = Cleaner { cfg };
    let mut out = TweetRecord::new(record.id.clone(), record.label);
    for (tok, &tag) in record.tokens.iter().zip(&record.lang_tags) {
        for piece in cleaner.token(tok) {
            out.push(piece, tag);
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanedCorpus {
    pub records: Vec<TweetRecord>,
    /// Ids of records left with no tokens.
    pub dropped: Vec<String>,
}

pub fn clean_corpus(records: &[TweetRecord], cfg: &CleaningConfig) -> CleanedCorpus {
    let mut out = CleanedCorpus::default();
    for r in records {
        let c = clean(r, cfg);
        if c.is_empty() {
            out.dropped.push(c.id);
        } else {
            out.records.push(c);
        }
    }
    out
}
