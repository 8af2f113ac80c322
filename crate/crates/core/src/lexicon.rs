//! Monolingual name lexicons: frequency-counted tokens in a single script.
//!
//! Name lists are plain UTF-8 text, one full name per line, `#` comments.
//! The serialized form is a TSV of `token<TAB>count` preceded by two header
//! lines recording the script and provenance tag.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::script::{Script, ScriptRegistry, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameLexicon {
    script: String,
    source_tag: String,
    entries: BTreeMap<Token, u64>,
}

/// A line that could not be fully ingested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub lexicon: NameLexicon,
    pub diagnostics: Vec<Diagnostic>,
}

/// Builds a lexicon from raw name-list lines.
///
/// Each line is split on whitespace; every piece is normalized with `script`.
/// A piece containing symbols from outside the script is dropped and reported,
/// the rest of the line still counts.
pub fn ingest_name_list<I, S>(lines: I, script: &Script) -> IngestReport
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut lexicon = NameLexicon::new(script.id());
    let mut diagnostics = Vec::new();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.as_ref().trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for chunk in line.split_whitespace() {
            match script.normalize(chunk) {
                Ok(Some(tok)) => *lexicon.entries.entry(tok).or_insert(0) += 1,
                Ok(None) => {}
                Err(e) => diagnostics.push(Diagnostic {
                    line: idx + 1,
                    message: format!("rejected {chunk:?}: {e}"),
                }),
            }
        }
    }
    IngestReport {
        lexicon,
        diagnostics,
    }
}

impl NameLexicon {
    pub fn new(script: impl Into<String>) -> Self {
        NameLexicon {
            script: script.into(),
            source_tag: String::new(),
            entries: BTreeMap::new(),
        }
    }

    /// Builds a lexicon from already-normalized `(token, count)` pairs.
    /// Counts for repeated tokens add up.
    pub fn from_counts<I, S>(script: &Script, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut lex = NameLexicon::new(script.id());
        for (text, count) in counts {
            if count == 0 {
                return Err(Error::InvalidArgument(format!(
                    "count for {:?} must be positive",
                    text.as_ref()
                )));
            }
            let tok = script.token(text.as_ref())?;
            *lex.entries.entry(tok).or_insert(0) += count;
        }
        Ok(lex)
    }

    pub fn with_source_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    pub fn script(&self) -> &str {
        &self.script
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn count(&self, token: &str) -> u64 {
        self.entries.get(token).copied().unwrap_or(0)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    /// Entries in lexicographic token order.
    pub fn iter(&self) -> impl Iterator<Item = (&Token, u64)> {
        self.entries.iter().map(|(t, c)| (t, *c))
    }

    /// Entries by descending count, then lexicographic token.
    pub fn ranked(&self) -> Vec<(&Token, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Tokens seen at least `min_count` times, most frequent first.
    pub fn common_tokens(&self, min_count: u64) -> Result<Vec<Token>> {
        if min_count == 0 {
            return Err(Error::InvalidArgument(
                "min_count must be at least 1".into(),
            ));
        }
        Ok(self
            .ranked()
            .into_iter()
            .filter(|(_, c)| *c >= min_count)
            .map(|(t, _)| t.clone())
            .collect())
    }

    /// Merges another lexicon of the same script into this one.
    pub fn merge(&mut self, other: &NameLexicon) -> Result<()> {
        if other.script != self.script {
            return Err(Error::ScriptMismatch {
                expected: self.script.clone(),
                found: other.script.clone(),
            });
        }
        for (t, c) in other.iter() {
            *self.entries.entry(t.clone()).or_insert(0) += c;
        }
        Ok(())
    }

    /// Expands the lexicon back into name-list lines, one token per line,
    /// each repeated `count` times.
    pub fn to_name_lines(&self) -> Vec<String> {
        self.ranked()
            .into_iter()
            .flat_map(|(t, c)| std::iter::repeat_n(t.as_str().to_string(), c as usize))
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#script\t{}", self.script);
        let _ = writeln!(out, "#source\t{}", self.source_tag);
        for (t, c) in self.ranked() {
            let _ = writeln!(out, "{t}\t{c}");
        }
        out
    }

    pub fn from_tsv(text: &str, scripts: &ScriptRegistry) -> Result<Self> {
        const WHAT: &str = "lexicon";
        let mut script: Option<&Script> = None;
        let mut source_tag = String::new();
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix("#script\t") {
                script = Some(scripts.get(rest.trim())?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("#source\t") {
                source_tag = rest.to_string();
                continue;
            }
            if line == "#source" {
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let script =
                script.ok_or_else(|| Error::format(WHAT, lineno, "missing #script header"))?;
            let (tok, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(WHAT, lineno, "expected token<TAB>count"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::format(WHAT, lineno, format!("bad count {count:?}")))?;
            if count == 0 {
                return Err(Error::format(WHAT, lineno, "count must be positive"));
            }
            let tok = script
                .token(tok)
                .map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
            if entries.insert(tok, count).is_some() {
                return Err(Error::format(WHAT, lineno, "duplicate token"));
            }
        }
        let script = script.ok_or_else(|| Error::format(WHAT, 0, "missing #script header"))?;
        Ok(NameLexicon {
            script: script.id().to_string(),
            source_tag,
            entries,
        })
    }
}
