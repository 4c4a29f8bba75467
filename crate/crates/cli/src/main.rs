use clap::{Parser, Subcommand, ValueEnum};

mod conf;
mod corpus;
mod error;
mod eval;
mod files;
mod finetune;
mod generate;
mod golden;
mod train;

#[derive(Parser)]
#[command(name = "spoke", version, about = "Train and run a molecular meta-language model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample training pairs from a SMILES list
    Corpus(corpus::Args),
    /// Train a model on a corpus
    Train(train::Args),
    /// Generate molecules from a checkpoint
    Generate(generate::Args),
    /// Fit a regression head on top of a checkpoint
    Finetune(finetune::FinetuneArgs),
    /// Predict a property with a fine-tuned head
    Predict(finetune::PredictArgs),
    /// Export final-layer hidden states per molecule
    Embed(finetune::EmbedArgs),
    /// Score generated outputs
    Eval(eval::Args),
    /// Cartesian coordinates to internal coordinates
    ConfEncode(conf::EncodeArgs),
    /// Internal coordinates to Cartesian coordinates
    ConfDecode(conf::DecodeArgs),
    /// Compare descriptors and fingerprints with the vendored reference files
    GoldenCheck(golden::Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dtype {
    F32,
    F64,
}

/// Runs `$f::<f32>` or `$f::<f64>` by the `--dtype` flag.
#[macro_export]
macro_rules! with_dtype {
    ($dtype:expr, $f:ident ( $($arg:expr),* )) => {
        match $dtype {
            $crate::Dtype::F32 => $f::<f32>($($arg),*),
            $crate::Dtype::F64 => $f::<f64>($($arg),*),
        }
    };
}

fn run(cli: Cli) -> error::Result<()> {
    match cli.command {
        Command::Corpus(a) => corpus::run(a),
        Command::Train(a) => train::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Finetune(a) => finetune::run_finetune(a),
        Command::Predict(a) => finetune::run_predict(a),
        Command::Embed(a) => finetune::run_embed(a),
        Command::Eval(a) => eval::run(a),
        Command::ConfEncode(a) => conf::encode(a),
        Command::ConfDecode(a) => conf::decode(a),
        Command::GoldenCheck(a) => golden::run(a),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
