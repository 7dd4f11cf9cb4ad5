mod acoustic;
mod evaluate;
mod features;
mod output;
mod phonetic;
mod viz;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use accdist_core::Error;

/// Pronunciation distances from acoustic features and phonetic transcriptions,
/// evaluated against human ratings.
///
/// Tabular output is TSV preceded by `#` comment lines recording the version,
/// the command and its configuration. Set ACCDIST_THREADS to bound parallelism
/// (0 or unset: one thread per core).
#[derive(Debug, Parser)]
#[command(name = "accdist", version)]
pub struct Cli {
    /// Seed recorded in output headers and used for validation splits.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute 39-dimensional MFCCs of a WAV file and write them as ACFT.
    Mfcc(features::MfccArgs),
    /// Check a feature file or a dataset manifest and everything it references.
    Validate(features::ValidateArgs),
    /// DTW distance between two feature files.
    Dist(acoustic::DistArgs),
    /// Native-likeness of every target speaker against the reference set.
    Likeness(acoustic::LikenessArgs),
    /// Phonetic native-likeness from transcriptions with segment costs.
    LevDist(phonetic::LevDistArgs),
    /// Induce PMI-based segment costs from a manifest's transcriptions.
    PmiTrain(phonetic::PmiTrainArgs),
    /// Select the hidden layer whose distances best match the ratings.
    Layers(acoustic::LayersArgs),
    /// Pearson correlation of speaker scores with ratings.
    Corr(evaluate::CorrArgs),
    /// Steiger's test for two dependent correlations.
    Steiger(evaluate::SteigerArgs),
    /// Multiple regression of ratings on several score tables.
    Regress(evaluate::RegressArgs),
    /// Classical multidimensional scaling of a square distance table.
    Mds(evaluate::MdsArgs),
    /// Correlation with ratings of each word on its own.
    PerWord(acoustic::PerWordArgs),
    /// Correlation with ratings when each reference speaker is used alone.
    SweepRef(acoustic::SweepRefArgs),
    /// Min-max scaled distances of recording conditions to an anchor recording.
    Living(acoustic::LivingArgs),
    /// Draw distance profiles and MDS maps as SVG with CSV twins.
    #[command(subcommand)]
    Viz(viz::VizCommand),
}

/// Output destination shared by most subcommands.
#[derive(Debug, Clone, Args)]
pub struct OutputArg {
    /// Output file (default: standard output).
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

fn init_threads() -> Result<(), String> {
    let n = match std::env::var("ACCDIST_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("ACCDIST_THREADS must be a non-negative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let seed = cli.seed;
    match &cli.command {
        Command::Mfcc(a) => features::mfcc(a),
        Command::Validate(a) => features::validate(a),
        Command::Dist(a) => acoustic::dist(a, seed),
        Command::Likeness(a) => acoustic::likeness(a, seed),
        Command::LevDist(a) => phonetic::lev_dist(a, seed),
        Command::PmiTrain(a) => phonetic::pmi_train(a, seed),
        Command::Layers(a) => acoustic::layers(a, seed),
        Command::Corr(a) => evaluate::corr(a, seed),
        Command::Steiger(a) => evaluate::steiger(a, seed),
        Command::Regress(a) => evaluate::regress(a, seed),
        Command::Mds(a) => evaluate::mds(a, seed),
        Command::PerWord(a) => acoustic::per_word(a, seed),
        Command::SweepRef(a) => acoustic::sweep_ref(a, seed),
        Command::Living(a) => acoustic::living(a, seed),
        Command::Viz(v) => viz::run(v, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    if let Err(msg) = init_threads() {
        eprintln!("accdist: {msg}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("accdist: error[{}]: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
