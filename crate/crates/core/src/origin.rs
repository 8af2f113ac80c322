//! Name-origin classification from frequent-first-name lists.
//!
//! Every token votes for each origin whose list contains it; the most voted
//! origin wins, ties going to the configured priority order. When no list
//! recognises any token, optional per-origin source-script language models
//! decide by mean log-likelihood, and failing that the default origin is used.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lexicon::ingest_name_list;
use crate::ngram::{InterpolationWeights, NgramModel};
use crate::script::Script;

/// The reserved label for names no profile claims.
pub const OTHER: &str = "other";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstNameList {
    origin: String,
    names: BTreeSet<String>,
}

impl FirstNameList {
    pub fn new<I, S>(origin: impl Into<String>, names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let origin = origin.into();
        let names: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "first-name list for `{origin}` is empty"
            )));
        }
        Ok(FirstNameList { origin, names })
    }

    /// Reads a name-list file body, normalizing exactly as lexicon ingestion does.
    pub fn from_lines<I, S>(origin: impl Into<String>, lines: I, script: &Script) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let report = ingest_name_list(lines, script);
        for d in &report.diagnostics {
            log::warn!("first-name list line {}: {}", d.line, d.message);
        }
        Self::new(
            origin,
            report.lexicon.iter().map(|(t, _)| t.as_str().to_string()),
        )
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn contains(&self, token: &str) -> bool {
        self.names.contains(token)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct OriginClassifier {
    lists: Vec<FirstNameList>,
    priority: Vec<String>,
    default: String,
    models: Vec<(String, NgramModel)>,
}

impl OriginClassifier {
    pub fn new(
        lists: Vec<FirstNameList>,
        priority: Vec<String>,
        default: impl Into<String>,
    ) -> Result<Self> {
        if lists.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one first-name list is required".into(),
            ));
        }
        Ok(OriginClassifier {
            lists,
            priority,
            default: default.into(),
            models: Vec::new(),
        })
    }

    /// Adds source-script models consulted when no list votes.
    pub fn with_models(mut self, models: Vec<(String, NgramModel)>) -> Self {
        self.models = models;
        self
    }

    pub fn default_origin(&self) -> &str {
        &self.default
    }

    /// Votes per origin for the given tokens.
    pub fn votes<S: AsRef<str>>(&self, tokens: &[S]) -> BTreeMap<&str, usize> {
        let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
        for tok in tokens {
            for list in &self.lists {
                if list.contains(tok.as_ref()) {
                    *votes.entry(list.origin()).or_insert(0) += 1;
                }
            }
        }
        votes
    }

    fn priority_rank(&self, origin: &str) -> (usize, String) {
        let idx = self
            .priority
            .iter()
            .position(|p| p == origin)
            .unwrap_or(self.priority.len());
        (idx, origin.to_string())
    }

    pub fn classify<S: AsRef<str>>(&self, tokens: &[S]) -> String {
        let votes = self.votes(tokens);
        if let Some(max) = votes.values().copied().max() {
            return votes
                .into_iter()
                .filter(|(_, v)| *v == max)
                .map(|(o, _)| o)
                .min_by_key(|o| self.priority_rank(o))
                .expect("non-empty")
                .to_string();
        }
        if !self.models.is_empty() && !tokens.is_empty() {
            let mut best: Option<(f64, &str)> = None;
            for (origin, model) in &self.models {
                let w = InterpolationWeights::uniform(model.max_order());
                let Ok(fit) = model.model_fit(tokens, &w) else {
                    continue;
                };
                let better = match best {
                    None => true,
                    Some((bf, bo)) => {
                        fit > bf
                            || (fit == bf && self.priority_rank(origin) < self.priority_rank(bo))
                    }
                };
                if better {
                    best = Some((fit, origin));
                }
            }
            if let Some((_, origin)) = best {
                return origin.to_string();
            }
        }
        self.default.clone()
    }
}
