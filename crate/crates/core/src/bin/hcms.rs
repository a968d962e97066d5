use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hcms::app::{self, AppError};
use hcms::config::RunConfig;

/// Sentiment classifier for code-mixed tweets.
///
/// Exit codes: 0 success, 1 internal failure, 2 bad usage or configuration,
/// 3 missing or unreadable file, 4 malformed corpus, 5 bad checkpoint,
/// 6 unusable data.
#[derive(Parser)]
#[command(name = "hcms", version)]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for initialisation and shuffling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for outputs and the resolved config.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Override a configuration key, e.g. `--set epochs=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a CONLL corpus.
    Preprocess { input: PathBuf },
    /// Train a model.
    Train {
        train: PathBuf,
        #[arg(long)]
        val: Option<PathBuf>,
    },
    /// Score a checkpoint on a labeled corpus.
    Eval { checkpoint: PathBuf, corpus: PathBuf },
    /// Label every tweet of a corpus.
    Predict { checkpoint: PathBuf, corpus: PathBuf },
    /// Label and language distribution of a corpus.
    Stats { corpus: PathBuf },
    /// Preprocessing and attention ablation grid.
    Ablate {
        train: PathBuf,
        test: PathBuf,
        #[arg(long)]
        val: Option<PathBuf>,
    },
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, AppError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| AppError::Usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = cli.seed {
        config.train.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let config = resolve_config(cli)?;
    let out = &cli.out_dir;
    match &cli.command {
        Command::Preprocess { input } => {
            let s = app::cmd_preprocess(input, &config, out)?;
            print!("{}", s.report());
        }
        Command::Train { train, val } => {
            let o = app::cmd_train(train, val.as_deref(), &config, out)?;
            print!("{}", o.log_tsv());
            println!("best epoch {}", o.best_epoch);
        }
        Command::Eval { checkpoint, corpus } => {
            print!("{}", app::cmd_eval(checkpoint, corpus, out)?.to_text());
        }
        Command::Predict { checkpoint, corpus } => {
            let n = app::cmd_predict(checkpoint, corpus, out)?.len();
            println!("{n} predictions written to {}", out.join(app::PREDICTIONS_FILE).display());
        }
        Command::Stats { corpus } => {
            print!("{}", app::cmd_stats(corpus, &config, out)?.to_text());
        }
        Command::Ablate { train, test, val } => {
            let rows = app::cmd_ablate(train, val.as_deref(), test, &config, out)?;
            print!("{}", app::ablation_table(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
