//! Trains on the bundled training split, selects on validation and scores
//! the test split.

use hcms::app::{fit, load_corpus, prepare_examples};
use hcms::config::RunConfig;
use hcms::train::evaluate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::default();
    config.set("epochs", "20")?;
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (train, _) = load_corpus(format!("{data}/train.conll").as_ref(), &config)?;
    let (val, _) = load_corpus(format!("{data}/val.conll").as_ref(), &config)?;
    let (test, _) = load_corpus(format!("{data}/test.conll").as_ref(), &config)?;

    let (ck, outcome) = fit(&train, &val, &config)?;
    println!("selected epoch {}", outcome.best_epoch);
    let eval = evaluate(&ck.model, &prepare_examples(&test, &ck.vocab, &config))?;
    print!("{}", eval.report.to_text());
    Ok(())
}
