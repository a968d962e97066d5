//! Trains on the bundled training split until it is memorised.

use hcms::app::{fit, load_corpus, prepare_examples};
use hcms::config::RunConfig;
use hcms::train::evaluate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::default();
    for (k, v) in [("embed_dim", "32"), ("filters", "32"), ("kernel", "4"), ("attention_hidden", "16"), ("epochs", "30")] {
        config.set(k, v)?;
    }
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.conll");
    let (train, _) = load_corpus(path.as_ref(), &config)?;

    let (ck, outcome) = fit(&train, &[], &config)?;
    print!("{}", outcome.log_tsv());
    let examples = prepare_examples(&train, &ck.vocab, &config);
    let eval = evaluate(&ck.model, &examples)?;
    println!("best epoch {}, training accuracy {:.3}", outcome.best_epoch, eval.report.accuracy);
    Ok(())
}
