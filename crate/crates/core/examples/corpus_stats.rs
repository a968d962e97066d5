//! Label and language-tag distribution of a corpus.
//!
//! `cargo run --example corpus_stats -- [corpus.conll]`

use hcms::corpus::{corpus_stats, read_conll, ParseMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.conll").into());
    let corpus = read_conll(&path, ParseMode::Lenient)?;
    print!("{}", corpus_stats(&corpus.records).to_text());
    Ok(())
}
