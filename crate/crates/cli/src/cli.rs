use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "translit",
    version,
    about = "Name transliteration between scripts"
)]
pub struct Cli {
    /// TOML file of extra `[[script]]` declarations.
    #[arg(long, global = true, value_name = "FILE")]
    pub scripts: Option<PathBuf>,

    /// Log progress; repeat for more detail. RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the tokens of a name list into a lexicon file.
    Ingest {
        /// Script id of the names, e.g. `latin` or `hebrew`.
        #[arg(long)]
        script: String,
        /// Name list, one name per line.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Lexicon TSV to write.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Train a character n-gram model on a lexicon.
    TrainLm {
        /// Lexicon TSV written by `ingest`.
        #[arg(long, value_name = "FILE")]
        lex: PathBuf,
        /// Highest n-gram order.
        #[arg(long, default_value_t = translit_core::ngram::DEFAULT_ORDER)]
        order: usize,
        /// Model TSV to write.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Extend a transliteration table from monolingual lexicons.
    LearnTable(LearnArgs),
    /// Print the origin label of each name.
    Classify {
        #[command(flatten)]
        profiles: ProfileArgs,
        /// Names to classify; read one per line from stdin when absent.
        names: Vec<String>,
    },
    /// Print ranked transliterations as TSV.
    Transliterate {
        #[command(flatten)]
        profiles: ProfileArgs,
        /// `auto` or a profile id.
        #[arg(long, default_value = "auto")]
        origin: String,
        /// Candidates to print per token.
        #[arg(long, default_value_t = translit_core::generate::DEFAULT_TOP_K)]
        k: usize,
        /// Pronunciation dictionary for profiles with a phoneme table.
        #[arg(long, value_name = "FILE")]
        pron_lex: Option<PathBuf>,
        /// Skip the lexicon lookup step.
        #[arg(long)]
        no_lookup: bool,
        /// Names to transliterate; read one per line from stdin when absent.
        names: Vec<String>,
    },
    /// Top-k accuracy by origin on a gold file.
    Eval {
        #[command(flatten)]
        profiles: ProfileArgs,
        /// TSV of name, `|`-separated accepted forms and origin.
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// A name is correct when a gold form is among the top k.
        #[arg(long, default_value_t = translit_core::generate::DEFAULT_TOP_K)]
        k: usize,
        /// Use each row's gold origin instead of classifying.
        #[arg(long)]
        use_gold_origin: bool,
        /// Skip the lexicon lookup step.
        #[arg(long)]
        no_lookup: bool,
    },
    /// Summarize a learner trace.
    InspectTrace {
        /// Trace TSV written by `learn-table --trace`.
        #[arg(value_name = "FILE")]
        trace: PathBuf,
        /// Also list rejected transitions.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Directory holding profiles.toml.
    #[arg(long, value_name = "DIR")]
    pub profiles: PathBuf,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Starting table: a file, or `bundled:<name>`.
    #[arg(long, value_name = "TABLE")]
    pub base: String,
    /// Source-script lexicon; its common tokens drive learning.
    #[arg(long, value_name = "FILE")]
    pub source_lex: PathBuf,
    /// Target-script lexicon that transliterations should match.
    #[arg(long, value_name = "FILE")]
    pub target_lex: PathBuf,
    /// Target-script model from `train-lm`.
    #[arg(long, value_name = "FILE")]
    pub lm: PathBuf,
    /// Lookup distance under which a lexicon entry counts as the match.
    #[arg(long, default_value_t = translit_core::phonetic::DEFAULT_THRESHOLD)]
    pub epsilon: f64,
    /// Source tokens seen fewer times are ignored.
    #[arg(long, default_value_t = translit_core::learner::DEFAULT_MIN_COUNT)]
    pub min_count: u64,
    /// Candidates per token checked against the target lexicon.
    #[arg(long, default_value_t = translit_core::generate::DEFAULT_TOP_K)]
    pub top_k: usize,
    #[arg(long, default_value_t = translit_core::learner::DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Longest source or target n-gram proposed as a transition.
    #[arg(long, default_value_t = translit_core::learner::DEFAULT_MAX_NGRAM_LEN)]
    pub max_ngram_len: usize,
    /// Phonetic class file; the bundled classes when absent.
    #[arg(long, value_name = "FILE")]
    pub classes: Option<PathBuf>,
    /// Learned table to write.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Where to write the per-iteration trace.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}
