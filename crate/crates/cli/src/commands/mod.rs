mod analyze;
mod classify;
mod eval;
mod ingest;
mod simulate;
mod train;

use clap::Subcommand;

use crate::util::CmdResult;

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with ground-truth labels and embeddings.
    Simulate(simulate::SimulateArgs),
    /// Parse, validate and normalize a corpus file; report rejects and orphans.
    Ingest(ingest::IngestArgs),
    /// Train a classifier (two-step PU or a baseline) and label the corpus.
    Train(train::TrainArgs),
    /// Score a corpus with a previously trained model.
    Classify(classify::ClassifyArgs),
    /// Evaluate label files against gold labels; optionally sweep keyword presets.
    Eval(eval::EvalArgs),
    /// Topic-shift analytics over a labeled corpus.
    Analyze(analyze::AnalyzeArgs),
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Simulate(args) => simulate::run(args),
        Command::Ingest(args) => ingest::run(args),
        Command::Train(args) => train::run(args),
        Command::Classify(args) => classify::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Analyze(args) => analyze::run(args),
    }
}
