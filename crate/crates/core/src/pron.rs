//! The phoneme path: source tokens are looked up in a pronunciation
//! dictionary and the phoneme sequences, not the spellings, are fed through a
//! phoneme-keyed transliteration table.
//!
//! Dictionary format: `WORD PH PH ...` per line, `;;;` or `#` comments,
//! alternative pronunciations as `WORD(2)`. Stress digits on phonemes are
//! dropped.
//!
//! Phoneme table format: like a spelling table, but with a `#!phonemes<TAB>target`
//! header and space-separated phoneme names as keys:
//!
//! ```text
//! #!phonemes	hebrew
//! HH	ה|ח
//! *Y UW	יו
//! ```
//!
//! Phonemes are interned as private-use characters so that the ordinary
//! table, generation and ranking code applies unchanged.

// the doc examples above are literal TSV
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generate::{derivation, generate, rank, transliterate_token, Candidate, Step};
use crate::ngram::{InterpolationWeights, NgramModel};
use crate::script::{Script, ScriptRegistry, Token};
use crate::table::{Position, Transition, TranslitTable};

const HEADER: &str = "#!phonemes";
const PHONEME_SCRIPT: &str = "phoneme";
const FIRST_CODE: u32 = 0xE000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PronunciationDict {
    entries: BTreeMap<String, Vec<Vec<String>>>,
}

impl PronunciationDict {
    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "pronunciation dictionary";
        let mut entries: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-empty line");
            let word = strip_variant(word).to_lowercase();
            let phones: Vec<String> = fields
                .map(|p| p.trim_end_matches(|c: char| c.is_ascii_digit()).to_string())
                .collect();
            if phones.is_empty() || phones.iter().any(String::is_empty) {
                return Err(Error::format(
                    WHAT,
                    idx + 1,
                    format!("no phonemes for {word:?}"),
                ));
            }
            let prons = entries.entry(word).or_default();
            if !prons.contains(&phones) {
                prons.push(phones);
            }
        }
        Ok(PronunciationDict { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (word, prons) in &self.entries {
            for (i, p) in prons.iter().enumerate() {
                if i == 0 {
                    let _ = writeln!(out, "{word} {}", p.join(" "));
                } else {
                    let _ = writeln!(out, "{word}({}) {}", i + 1, p.join(" "));
                }
            }
        }
        out
    }

    pub fn get(&self, word: &str) -> Option<&[Vec<String>]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every phoneme used by any entry.
    pub fn phonemes(&self) -> BTreeSet<&str> {
        self.entries
            .values()
            .flatten()
            .flatten()
            .map(String::as_str)
            .collect()
    }
}

fn strip_variant(word: &str) -> &str {
    match word.strip_suffix(')').and_then(|w| w.rsplit_once('(')) {
        Some((base, n)) if !base.is_empty() && n.chars().all(|c| c.is_ascii_digit()) => base,
        _ => word,
    }
}

/// A transliteration table keyed by phoneme sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeTable {
    names: Vec<String>,
    codes: BTreeMap<String, char>,
    script: Script,
    table: TranslitTable,
}

impl PhonemeTable {
    /// Builds a table from `(phonemes, position, output)` rows.
    pub fn new<I>(target: &Script, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<String>, Position, String)>,
    {
        let rows: Vec<_> = rows.into_iter().collect();
        let names: BTreeSet<&String> = rows.iter().flat_map(|r| r.0.iter()).collect();
        if names.is_empty() {
            return Err(Error::InvalidArgument("phoneme table has no rows".into()));
        }
        let names: Vec<String> = names.into_iter().cloned().collect();
        let mut codes = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            let code = char::from_u32(FIRST_CODE + i as u32)
                .filter(|_| i < 6400)
                .ok_or_else(|| Error::InvalidArgument("too many phonemes".into()))?;
            codes.insert(n.clone(), code);
        }
        let script = Script::new(PHONEME_SCRIPT, codes.values().copied(), false)?;
        let transitions: Vec<Transition> = rows
            .iter()
            .map(|(phones, pos, out)| {
                let key: String = phones.iter().map(|p| codes[p]).collect();
                Transition::new(key, *pos, out.clone())
            })
            .collect();
        let table =
            TranslitTable::from_transitions(&script, target, transitions).map_err(|e| match e {
                Error::Coverage { missing } => Error::InvalidArgument(format!(
                    "phonemes without a position-independent row: {}",
                    missing
                        .iter()
                        .map(|c| names[(*c as u32 - FIRST_CODE) as usize].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                )),
                other => other,
            })?;
        Ok(PhonemeTable {
            names,
            codes,
            script,
            table,
        })
    }

    pub fn parse(text: &str, scripts: &ScriptRegistry) -> Result<Self> {
        const WHAT: &str = "phoneme table";
        let mut target: Option<&Script> = None;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix(HEADER) {
                target = Some(scripts.get(rest.trim())?);
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (marked, outputs) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(WHAT, lineno, "expected phonemes<TAB>outputs"))?;
            let (key, position) =
                Position::unmark(marked).map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
            let phones: Vec<String> = key.split(' ').map(str::to_string).collect();
            if phones.iter().any(String::is_empty) {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("bad phoneme key {marked:?}"),
                ));
            }
            for o in outputs.split('|') {
                rows.push((phones.clone(), position, o.to_string()));
            }
        }
        let target =
            target.ok_or_else(|| Error::format(WHAT, 0, format!("missing {HEADER} header")))?;
        Self::new(target, rows).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::format(WHAT, 0, m),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}\t{}", self.table.target_script());
        for e in self.table.entries() {
            let _ = writeln!(
                out,
                "{}\t{}",
                e.position.mark(&self.decode(e.key)),
                e.outputs.join("|")
            );
        }
        out
    }

    pub fn target_script(&self) -> &str {
        self.table.target_script()
    }

    pub fn phonemes(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &TranslitTable {
        &self.table
    }

    /// Interned form of a phoneme sequence; `None` if a phoneme is unknown.
    pub fn encode<S: AsRef<str>>(&self, phones: &[S]) -> Option<String> {
        phones
            .iter()
            .map(|p| self.codes.get(p.as_ref()).copied())
            .collect()
    }

    /// Space-separated phoneme names for an interned key.
    pub fn decode(&self, key: &str) -> String {
        key.chars()
            .map(|c| self.names[(c as u32 - FIRST_CODE) as usize].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A pronunciation dictionary paired with the phoneme table that consumes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronunciationLexicon {
    dict: PronunciationDict,
    phonemes: PhonemeTable,
}

impl PronunciationLexicon {
    /// Fails if the dictionary uses a phoneme the table does not cover.
    pub fn new(dict: PronunciationDict, phonemes: PhonemeTable) -> Result<Self> {
        let missing: Vec<&str> = dict
            .phonemes()
            .into_iter()
            .filter(|p| !phonemes.codes.contains_key(*p))
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "phonemes missing from the phoneme table: {}",
                missing.join(" ")
            )));
        }
        Ok(PronunciationLexicon { dict, phonemes })
    }

    pub fn dict(&self) -> &PronunciationDict {
        &self.dict
    }

    pub fn phoneme_table(&self) -> &PhonemeTable {
        &self.phonemes
    }

    /// Ranked candidates over all pronunciations of `token`, or `None` if the
    /// dictionary lacks it.
    pub fn transliterate_token(
        &self,
        token: &str,
        model: &NgramModel,
        weights: &InterpolationWeights,
        k: usize,
        cap: usize,
    ) -> Result<Option<Vec<Candidate>>> {
        let Some(prons) = self.dict.get(token) else {
            return Ok(None);
        };
        if model.script() != self.phonemes.target_script() {
            return Err(Error::ScriptMismatch {
                expected: self.phonemes.target_script().to_string(),
                found: model.script().to_string(),
            });
        }
        let keys: Vec<String> = prons
            .iter()
            .map(|p| self.phonemes.encode(p).expect("checked at construction"))
            .collect();
        let mut texts = BTreeSet::new();
        for key in &keys {
            texts.extend(generate(self.phonemes.table(), key, cap)?.texts);
        }
        let texts: Vec<String> = texts.into_iter().collect();
        let mut ranked = rank(&texts, model, weights, k)?;
        for c in &mut ranked {
            c.derivation = keys.iter().find_map(|key| {
                derivation(self.phonemes.table(), key, &c.text).map(|steps| {
                    steps
                        .into_iter()
                        .map(|s| Step {
                            key: self.phonemes.decode(&s.key),
                            ..s
                        })
                        .collect()
                })
            });
        }
        Ok(Some(ranked))
    }
}

/// Transliterates each token through its pronunciation. Tokens missing from
/// the dictionary go through `fallback` (the spelling table) with a warning,
/// or fail when no fallback is given.
pub fn forward_transliterate(
    tokens: &[Token],
    pron: &PronunciationLexicon,
    fallback: Option<&TranslitTable>,
    model: &NgramModel,
    weights: &InterpolationWeights,
    k: usize,
    cap: usize,
) -> Result<Vec<Vec<Candidate>>> {
    tokens
        .iter()
        .map(
            |t| match pron.transliterate_token(t.as_str(), model, weights, k, cap)? {
                Some(c) => Ok(c),
                None => match fallback {
                    Some(table) => {
                        log::warn!("no pronunciation for {:?}; using its spelling", t.as_str());
                        transliterate_token(table, model, weights, t.as_str(), k, cap)
                    }
                    None => Err(Error::NoPronunciation(t.as_str().to_string())),
                },
            },
        )
        .collect()
}
