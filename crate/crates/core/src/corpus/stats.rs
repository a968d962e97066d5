use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{LangTag, Sentiment, TweetRecord};

/// Sentiment and language-tag distribution of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub records: usize,
    pub unlabeled: usize,
    /// Indexed by [`Sentiment::index`].
    pub sentiment: [usize; 3],
    /// Indexed by [`LangTag::index`].
    pub language: [usize; 4],
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

impl CorpusStats {
    pub fn labeled(&self) -> usize {
        self.sentiment.iter().sum()
    }

    pub fn tokens(&self) -> usize {
        self.language.iter().sum()
    }

    /// Share of labeled records per class, in percent.
    pub fn sentiment_percent(&self, s: Sentiment) -> f64 {
        percent(self.sentiment[s.index()], self.labeled())
    }

    /// Share of tokens per language tag, in percent.
    pub fn language_percent(&self, t: LangTag) -> f64 {
        percent(self.language[t.index()], self.tokens())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "records: {}  (unlabeled: {})", self.records, self.unlabeled);
        let _ = writeln!(out, "\nsentiment distribution ({} labeled)", self.labeled());
        for s in Sentiment::ALL {
            let _ = writeln!(
                out,
                "  {:<10} {:>8} {:>7.2}%",
                s.as_str(),
                self.sentiment[s.index()],
                self.sentiment_percent(s)
            );
        }
        let _ = writeln!(out, "\nlanguage distribution ({} tokens)", self.tokens());
        for t in LangTag::ALL {
            let _ = writeln!(
                out,
                "  {:<10} {:>8} {:>7.2}%",
                t.as_str(),
                self.language[t.index()],
                self.language_percent(t)
            );
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let sentiment: serde_json::Map<String, Value> = Sentiment::ALL
            .iter()
            .map(|&s| {
                (
                    s.as_str().to_string(),
                    json!({"count": self.sentiment[s.index()], "percent": self.sentiment_percent(s)}),
                )
            })
            .collect();
        let language: serde_json::Map<String, Value> = LangTag::ALL
            .iter()
            .map(|&t| {
                (
                    t.as_str().to_string(),
                    json!({"count": self.language[t.index()], "percent": self.language_percent(t)}),
                )
            })
            .collect();
        json!({
            "records": self.records,
            "unlabeled": self.unlabeled,
            "tokens": self.tokens(),
            "sentiment": sentiment,
            "language": language,
        })
    }
}

pub fn corpus_stats(records: &[TweetRecord]) -> CorpusStats {
    let mut s = CorpusStats {
        records: records.len(),
        ..CorpusStats::default()
    };
    for r in records {
        match r.label {
            Some(label) => s.sentiment[label.index()] += 1,
            None => s.unlabeled += 1,
        }
        for tag in &r.lang_tags {
            s.language[tag.index()] += 1;
        }
    }
    s
}
