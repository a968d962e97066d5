//! Saves a model, reloads it and checks the predictions agree bit for bit.

use hcms::app::{fit, load_corpus, prepare_examples};
use hcms::config::RunConfig;
use hcms::train::{load_checkpoint, save_checkpoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::default();
    config.set("epochs", "3")?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.conll");
    let (train, _) = load_corpus(path.as_ref(), &config)?;
    let (ck, _) = fit(&train, &[], &config)?;

    let file = std::env::temp_dir().join("hcms-example.hcms");
    save_checkpoint(&ck, &file)?;
    let back = load_checkpoint(&file)?;
    println!("{} bytes, {} parameters", std::fs::metadata(&file)?.len(), back.model.num_parameters());

    let mut identical = 0;
    let examples = prepare_examples(&train, &ck.vocab, &config);
    for e in &examples {
        let a = ck.model.predict_proba(&e.ids, &e.lang)?;
        let b = back.model.predict_proba(&e.ids, &e.lang)?;
        if a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits()) {
            identical += 1;
        }
    }
    println!("{identical}/{} predictions bit-identical", examples.len());
    std::fs::remove_file(&file)?;
    Ok(())
}
