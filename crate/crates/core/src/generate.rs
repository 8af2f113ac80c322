//! Noisy candidate generation and language-model ranking.
//!
//! `generate` enumerates every string obtainable by segmenting a token into
//! table keys and choosing one output per piece. The enumeration runs
//! right-to-left over token positions, keeping a deduplicated set of suffix
//! expansions per position, so ambiguous segmentations that produce the same
//! text never multiply the work.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ngram::{InterpolationWeights, NgramModel};
use crate::table::{char_bounds, Position, Transition, TranslitTable};

pub const DEFAULT_CANDIDATE_CAP: usize = 50_000;
pub const DEFAULT_TOP_K: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    /// Distinct candidate texts in lexicographic order.
    pub texts: Vec<String>,
    pub truncated: bool,
}

/// One step of a derivation: which row produced which output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub key: String,
    pub position: Position,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub text: String,
    /// Interpolated log-probability under the ranking model.
    pub score: f64,
    /// How the table produced this text, when known.
    pub derivation: Option<Vec<Step>>,
}

/// Every non-empty transliteration of `token` licensed by `table`,
/// deduplicated.
///
/// If an intermediate suffix set grows past `cap` it is cut to its `cap`
/// lexicographically smallest members and the result is flagged truncated.
pub fn generate(table: &TranslitTable, token: &str, cap: usize) -> Result<Generated> {
    if token.is_empty() {
        return Err(Error::EmptyToken);
    }
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "candidate cap must be positive".into(),
        ));
    }
    let bounds = char_bounds(token);
    let n = bounds.len() - 1;
    let mut suffixes: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n + 1];
    suffixes[n].insert(String::new());
    let mut truncated = false;
    for i in (0..n).rev() {
        let mut here = BTreeSet::new();
        for (end, _, _, outputs) in table.matches_at(token, &bounds, i) {
            for tail in &suffixes[end] {
                for o in outputs {
                    here.insert(format!("{o}{tail}"));
                }
            }
        }
        if here.len() > cap {
            truncated = true;
            here = here.into_iter().take(cap).collect();
        }
        suffixes[i] = here;
    }
    if suffixes[0].is_empty() {
        return Err(Error::Unsegmentable(token.to_string()));
    }
    // a candidate must be a token, so a full deletion is not one
    let texts: Vec<String> = std::mem::take(&mut suffixes[0])
        .into_iter()
        .filter(|t| !t.is_empty())
        .collect();
    if truncated {
        log::warn!("candidates for {token:?} truncated at {cap}");
    }
    Ok(Generated { texts, truncated })
}

/// Whether `table` (plus an optional extra transition) can turn `token` into
/// exactly `target`. Equivalent to membership in the untruncated output of
/// [`generate`], but polynomial.
pub fn derivable(
    table: &TranslitTable,
    extra: Option<&Transition>,
    token: &str,
    target: &str,
) -> bool {
    let tb = char_bounds(token);
    let n = tb.len() - 1;
    let m = target.len();
    // reach[i][j]: token symbols ..i can produce target bytes ..j
    let mut reach = vec![vec![false; m + 1]; n + 1];
    reach[0][0] = true;
    for i in 0..n {
        for j in 0..=m {
            if !reach[i][j] || !target.is_char_boundary(j) {
                continue;
            }
            let rest = &target[j..];
            for (end, _, _, outputs) in table.matches_at(token, &tb, i) {
                for o in outputs {
                    if rest.starts_with(o.as_str()) {
                        reach[end][j + o.len()] = true;
                    }
                }
            }
            if let Some(x) = extra {
                let key_len = x.source.chars().count();
                let end = i + key_len;
                if end <= n
                    && token[tb[i]..tb[end]] == x.source
                    && x.position.admits(i, end, n)
                    && rest.starts_with(x.target.as_str())
                {
                    reach[end][j + x.target.len()] = true;
                }
            }
        }
    }
    reach[n][m]
}

/// One derivation of `target` from `token`, preferring the earliest rows in
/// table order at each step.
pub fn derivation(table: &TranslitTable, token: &str, target: &str) -> Option<Vec<Step>> {
    let tb = char_bounds(token);
    let n = tb.len() - 1;
    let m = target.len();
    // back[i][j]: predecessor state and step that first reached (i, j)
    let mut back: Vec<Vec<Option<(usize, usize, Step)>>> = vec![vec![None; m + 1]; n + 1];
    let mut reach = vec![vec![false; m + 1]; n + 1];
    reach[0][0] = true;
    for i in 0..n {
        for j in 0..=m {
            if !reach[i][j] || !target.is_char_boundary(j) {
                continue;
            }
            for (end, key, position, outputs) in table.matches_at(token, &tb, i) {
                for o in outputs {
                    if target[j..].starts_with(o.as_str()) && !reach[end][j + o.len()] {
                        reach[end][j + o.len()] = true;
                        back[end][j + o.len()] = Some((
                            i,
                            j,
                            Step {
                                key: key.to_string(),
                                position,
                                output: o.clone(),
                            },
                        ));
                    }
                }
            }
        }
    }
    if !reach[n][m] {
        return None;
    }
    let mut steps = Vec::new();
    let (mut i, mut j) = (n, m);
    while (i, j) != (0, 0) {
        let (pi, pj, step) = back[i][j].clone()?;
        steps.push(step);
        i = pi;
        j = pj;
    }
    steps.reverse();
    Some(steps)
}

fn by_score_then_text(a: &Candidate, b: &Candidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.text.cmp(&b.text))
}

/// Scores `candidates` and returns the best `k`, highest score first, ties
/// broken by text.
pub fn rank<S: AsRef<str>>(
    candidates: &[S],
    model: &NgramModel,
    weights: &InterpolationWeights,
    k: usize,
) -> Result<Vec<Candidate>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if candidates.is_empty() {
        return Err(Error::EmptyInput("no candidates to rank"));
    }
    let mut scored = Vec::with_capacity(candidates.len());
    for c in candidates {
        let text = c.as_ref();
        scored.push(Candidate {
            text: text.to_string(),
            score: model.score(text, weights)?,
            derivation: None,
        });
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_score_then_text);
        scored.truncate(k);
    }
    scored.sort_by(by_score_then_text);
    Ok(scored)
}

/// `generate` followed by `rank`; the transliteration primitive used
/// throughout the pipeline and the table learner. Derivations are attached
/// to the returned candidates.
pub fn transliterate_token(
    table: &TranslitTable,
    model: &NgramModel,
    weights: &InterpolationWeights,
    token: &str,
    k: usize,
    cap: usize,
) -> Result<Vec<Candidate>> {
    let generated = generate(table, token, cap)?;
    let mut ranked = rank(&generated.texts, model, weights, k)?;
    for c in &mut ranked {
        c.derivation = derivation(table, token, &c.text);
    }
    Ok(ranked)
}
