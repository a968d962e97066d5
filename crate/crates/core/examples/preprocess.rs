//! Cleans a CONLL corpus and prints a few tweets before and after.
//!
//! `cargo run --example preprocess -- [corpus.conll]`

use hcms::corpus::{clean, read_conll, CleaningConfig, ParseMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.conll").into());
    let corpus = read_conll(&path, ParseMode::Lenient)?;
    println!("{} records, {} skipped blocks", corpus.records.len(), corpus.skipped.len());

    let cfg = CleaningConfig::default();
    for r in corpus.records.iter().take(5) {
        let c = clean(r, &cfg);
        println!("{}", r.id);
        println!("  raw:     {}", r.tokens.join(" "));
        println!("  cleaned: {}", c.tokens.join(" "));
    }
    Ok(())
}
