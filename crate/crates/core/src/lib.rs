//! Cross-script transliteration of personal names.
//!
//! A token is expanded into every spelling a transliteration table allows,
//! the spellings are ranked by an interpolated character n-gram model of the
//! target script, and the best few are optionally snapped to the nearest
//! entry of a target-script name lexicon. Tables can be refined from
//! unaligned name lists by [`learner::learn`], and names are routed to a
//! per-origin profile by [`origin::OriginClassifier`].

pub mod error;
pub mod generate;
pub mod learner;
pub mod lexicon;
pub mod ngram;
pub mod origin;
pub mod phonetic;
pub mod pipeline;
pub mod pron;
pub mod script;
pub mod table;

pub use error::{Error, Result};
pub use generate::{derivable, generate, rank, transliterate_token, Candidate};
pub use learner::{learn, LearnOutcome, LearnerConfig, LearnerInputs, StopReason, Trace};
pub use lexicon::{ingest_name_list, NameLexicon};
pub use ngram::{InterpolationWeights, NgramModel};
pub use origin::{FirstNameList, OriginClassifier};
pub use phonetic::{lookup, ClassFile, PhoneticClassTable};
pub use pipeline::{OriginMode, OriginProfile, Profiles, TransliterateOptions};
pub use pron::{PhonemeTable, PronunciationDict, PronunciationLexicon};
pub use script::{Script, ScriptRegistry, Token};
pub use table::{Position, Transition, TranslitTable};

/// Data files shipped with the crate.
pub mod data {
    pub const LATIN_HEBREW_BACKWARD: &str = include_str!("../data/latin_hebrew_backward.tsv");
    pub const LATIN_HEBREW_GENERIC: &str = include_str!("../data/latin_hebrew_generic.tsv");
    pub const PHONETIC_CLASSES: &str = include_str!("../data/phonetic_classes.txt");

    /// Looks up bundled data by file stem.
    pub fn bundled(name: &str) -> Option<&'static str> {
        match name {
            "latin_hebrew_backward" => Some(LATIN_HEBREW_BACKWARD),
            "latin_hebrew_generic" => Some(LATIN_HEBREW_GENERIC),
            "phonetic_classes" => Some(PHONETIC_CLASSES),
            _ => None,
        }
    }
}
