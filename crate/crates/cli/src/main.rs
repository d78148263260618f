mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "punforge",
    version,
    about = "Generate punning riddles from a lexicon"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate riddles.
    Gen(GenArgs),
    /// Parse and lint knowledge-base files; exit code is the number of findings.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Re-derive one riddle and print how it was built.
    Explain {
        /// 1-based riddle index from a `gen` run with the same options.
        #[arg(long)]
        id: usize,
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Aggregate joke ratings into tables.
    Report(ReportArgs),
}

#[derive(Args, Clone, Debug)]
pub struct KbArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub homophones: PathBuf,
    /// Schema definitions; the six built-in schemata when omitted.
    #[arg(long)]
    pub schemata: Option<PathBuf>,
    /// Template definitions; the eleven built-in templates when omitted.
    #[arg(long)]
    pub templates: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Args, Clone, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub kb: KbArgs,
    #[arg(long)]
    pub np: Option<String>,
    #[arg(long)]
    pub schema: Option<String>,
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Draw riddles at random (seeded) instead of listing them all.
    #[arg(long)]
    pub sample: bool,
    #[arg(long)]
    pub max: Option<usize>,
    /// Drop riddles scoring below this total (decimal or fraction).
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also print a trace for every rejected candidate.
    #[arg(long)]
    pub show_rejected: bool,
    /// TOML file with `seed`, `threshold` and a `[weights]` table.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub w_alliteration: Option<String>,
    #[arg(long)]
    pub w_rhyme: Option<String>,
    #[arg(long)]
    pub w_funny_letters: Option<String>,
    #[arg(long)]
    pub w_question_length: Option<String>,
    #[arg(long)]
    pub min_question_len: Option<usize>,
    #[arg(long)]
    pub max_question_len: Option<usize>,
}

#[derive(Args, Clone, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long, value_parser = ["schema", "template", "pair", "phrase"])]
    pub by: String,
    /// Rules file of `schema <name>`, `template <name>`, `pair <schema> <template>` lines.
    #[arg(long)]
    pub trim: Option<PathBuf>,
    #[arg(long)]
    pub schemata: Option<PathBuf>,
    #[arg(long)]
    pub templates: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(&args),
        Command::Validate { paths } => commands::validate(&paths),
        Command::Explain { id, gen } => commands::explain(id, &gen),
        Command::Report(args) => commands::report(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
