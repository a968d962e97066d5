use super::{CleaningConfig, LangTag, TweetRecord, Vocabulary};

/// Model-ready form of a cleaned tweet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub ids: Vec<usize>,
    /// Per-token tags, present only when language one-hots are requested.
    pub lang: Vec<LangTag>,
}

impl Encoded {
    /// The 4-wide one-hot rows (HIN, ENG, O, EMT) the embedding layer appends.
    pub fn lang_onehot(&self) -> Vec<[f64; 4]> {
        self.lang
            .iter()
            .map(|t| {
                let mut row = [0.0; 4];
                row[t.index()] = 1.0;
                row
            })
            .collect()
    }
}

/// Maps tokens to ids, substituting UNK for unknown tokens.
pub fn encode(record: &TweetRecord, vocab: &Vocabulary, cfg: &CleaningConfig) -> Encoded {
    Encoded {
        ids: record.tokens.iter().map(|t| vocab.id(t)).collect(),
        lang: if cfg.append_lang_onehot {
            record.lang_tags.clone()
        } else {
            Vec::new()
        },
    }
}
