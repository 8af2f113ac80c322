use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file or text. `line` is 1-based, 0 when not applicable.
    #[error("{what}: line {line}: {message}")]
    Format {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("unknown script `{0}`")]
    UnknownScript(String),

    #[error("symbol {symbol:?} is not part of script `{script}`")]
    ForeignSymbol { symbol: char, script: String },

    #[error("script mismatch: expected `{expected}`, found `{found}`")]
    ScriptMismatch { expected: String, found: String },

    #[error("cannot train on empty lexicon")]
    EmptyLexicon,

    #[error("empty token")]
    EmptyToken,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("table does not cover source symbols: {}", display_symbols(.missing))]
    Coverage { missing: Vec<char> },

    #[error("transition {key}{position} -> {output:?} is not in the table")]
    MissingTransition {
        key: String,
        position: String,
        output: String,
    },

    #[error("token `{0}` cannot be segmented with this table")]
    Unsegmentable(String),

    #[error("unknown origin `{origin}`; available profiles: {}", .available.join(", "))]
    UnknownOrigin {
        origin: String,
        available: Vec<String>,
    },

    #[error("no pronunciation for `{0}`")]
    NoPronunciation(String),

    #[error("nothing to learn from: no source token reaches the common-token threshold")]
    NothingToLearn,

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn format(what: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end:
    /// 1 usage, 2 data format, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::UnknownOrigin { .. } => 1,
            Error::Unsegmentable(_) | Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}

fn display_symbols(symbols: &[char]) -> String {
    symbols
        .iter()
        .map(|c| format!("{c:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Reads a whole UTF-8 file, attaching the path to any error.
pub fn read_file(path: impl AsRef<std::path::Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes a whole file, attaching the path to any error.
pub fn write_file(path: impl AsRef<std::path::Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
