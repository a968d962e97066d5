//! Synthetic long-range sentiment task.
//!
//! A tweet carries at most one sentiment cue and optionally a negation word,
//! always more than `min_gap` tokens apart. Negation flips the cue's
//! polarity; tweets without a cue are neutral. Deciding the class needs
//! both tokens at once, which no single convolution window sees.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LangTag, Sentiment, TweetRecord};

const FILLER: &[(&str, LangTag)] = &[
    ("yaar", LangTag::Hin),
    ("aaj", LangTag::Hin),
    ("kal", LangTag::Hin),
    ("bhai", LangTag::Hin),
    ("match", LangTag::Eng),
    ("dekha", LangTag::Hin),
    ("movie", LangTag::Eng),
    ("ka", LangTag::Hin),
    ("the", LangTag::Eng),
    ("team", LangTag::Eng),
    ("was", LangTag::Eng),
    ("ye", LangTag::Hin),
    ("wala", LangTag::Hin),
    ("song", LangTag::Eng),
    ("phir", LangTag::Hin),
    ("se", LangTag::Hin),
    ("today", LangTag::Eng),
    ("hai", LangTag::Hin),
];
const POSITIVE: &[(&str, LangTag)] = &[
    ("accha", LangTag::Hin),
    ("badhiya", LangTag::Hin),
    ("great", LangTag::Eng),
    ("awesome", LangTag::Eng),
];
const NEGATIVE: &[(&str, LangTag)] = &[
    ("bekaar", LangTag::Hin),
    ("ghatiya", LangTag::Hin),
    ("terrible", LangTag::Eng),
    ("awful", LangTag::Eng),
];
const NEGATION: &[(&str, LangTag)] = &[("nahi", LangTag::Hin), ("not", LangTag::Eng)];

#[derive(Debug, Clone, Copy)]
pub struct LongRangeTask {
    pub min_len: usize,
    pub max_len: usize,
    /// Cue and negation are separated by more than this many tokens.
    pub min_gap: usize,
}

impl Default for LongRangeTask {
    fn default() -> Self {
        Self {
            min_len: 12,
            max_len: 16,
            min_gap: 4,
        }
    }
}

impl LongRangeTask {
    pub fn generate(&self, count: usize, seed: u64, id_prefix: &str) -> Vec<TweetRecord> {
        assert!(self.min_len >= self.min_gap + 2 && self.min_len <= self.max_len);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| self.one(&mut rng, format!("{id_prefix}{i}")))
            .collect()
    }

    fn one<R: Rng>(&self, rng: &mut R, id: String) -> TweetRecord {
        let len = rng.random_range(self.min_len..=self.max_len);
        let mut slots: Vec<(&str, LangTag)> = (0..len).map(|_| *FILLER.choose(rng).expect("filler")).collect();
        let negated = rng.random_bool(0.5);
        let polarity = match rng.random_range(0..3) {
            0 => Some(Sentiment::Positive),
            1 => Some(Sentiment::Negative),
            _ => None,
        };
        // pick two positions more than min_gap apart
        let (cue_pos, neg_pos) = loop {
            let a = rng.random_range(0..len);
            let b = rng.random_range(0..len);
            if a.abs_diff(b) > self.min_gap {
                break (a, b);
            }
        };
        let label = match polarity {
            Some(p) => {
                let pool = if p == Sentiment::Positive { POSITIVE } else { NEGATIVE };
                slots[cue_pos] = *pool.choose(rng).expect("cue");
                match (p, negated) {
                    (p, false) => p,
                    (Sentiment::Positive, true) => Sentiment::Negative,
                    (_, true) => Sentiment::Positive,
                }
            }
            None => Sentiment::Neutral,
        };
        if negated {
            slots[neg_pos] = *NEGATION.choose(rng).expect("negation");
        }
        TweetRecord::new(id, Some(label)).with_tokens(slots)
    }
}
