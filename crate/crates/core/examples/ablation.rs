//! Preprocessing and attention ablation on a synthetic task where a
//! sentiment cue and a distant negation decide the label.
//!
//! `cargo run --release --example ablation -- [seed]`

use hcms::app::{ablate_records, ablation_table};
use hcms::config::RunConfig;
use hcms::corpus::synth::LongRangeTask;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let task = LongRangeTask::default();
    let train = task.generate(150, 1000 + seed, "tr");
    let val = task.generate(60, 2000 + seed, "va");
    let test = task.generate(600, 3000 + seed, "te");

    let mut config = RunConfig::default();
    for (k, v) in [("embed_dim", "16"), ("filters", "16"), ("kernel", "3"), ("attention_hidden", "16"), ("max_len", "16"), ("epochs", "30")] {
        config.set(k, v)?;
    }
    config.train.seed = seed;
    let rows = ablate_records(&train, &val, &test, &config)?;
    print!("{}", ablation_table(&rows));
    Ok(())
}
