//! Unsupervised growth of a transliteration table.
//!
//! Starting from a generic table, the learner transliterates the common
//! source-script names of one origin, collects those whose top candidates
//! miss the target lexicon, and mines short substring pairs that would let
//! the table derive the nearest lexicon entry. The most frequent unvisited
//! pair is added tentatively and kept only if the target model likes the
//! resulting top transliterations at least as much as before.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generate::{derivable, transliterate_token, DEFAULT_CANDIDATE_CAP, DEFAULT_TOP_K};
use crate::lexicon::NameLexicon;
use crate::ngram::{InterpolationWeights, NgramModel};
use crate::phonetic::{lookup, PhoneticClassTable, DEFAULT_THRESHOLD};
use crate::script::Token;
use crate::table::{Position, Transition, TranslitTable};

pub const DEFAULT_MIN_COUNT: u64 = 3;
pub const DEFAULT_MAX_NGRAM_LEN: usize = 2;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

const TRACE_HEADER: &str = "iter\tsource\ttarget\tprior_fit\tposterior_fit\taccepted\tunmatched";

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    /// Lookup threshold for pairing an unmatched token with a lexicon entry.
    pub epsilon: f64,
    /// Source tokens seen fewer times than this are ignored.
    pub min_count: u64,
    /// Longest source or target substring in a mined transition.
    pub max_ngram_len: usize,
    pub top_k: usize,
    pub max_iterations: usize,
    pub candidate_cap: usize,
    /// Weights for the acceptance fit; trigram-only when unset.
    pub fit_weights: Option<InterpolationWeights>,
    /// Weights for ranking candidates; uniform when unset.
    pub rank_weights: Option<InterpolationWeights>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            epsilon: DEFAULT_THRESHOLD,
            min_count: DEFAULT_MIN_COUNT,
            max_ngram_len: DEFAULT_MAX_NGRAM_LEN,
            top_k: DEFAULT_TOP_K,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            fit_weights: None,
            rank_weights: None,
        }
    }
}

impl LearnerConfig {
    fn validate(&self, model: &NgramModel) -> Result<(InterpolationWeights, InterpolationWeights)> {
        if self.top_k == 0 {
            return Err(Error::InvalidArgument("top_k must be at least 1".into()));
        }
        if self.max_ngram_len == 0 {
            return Err(Error::InvalidArgument(
                "max_ngram_len must be at least 1".into(),
            ));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        let order = model.max_order();
        let fit = match &self.fit_weights {
            Some(w) => w.clone(),
            None => InterpolationWeights::single(order, 3.min(order)),
        };
        let rank = match &self.rank_weights {
            Some(w) => w.clone(),
            None => InterpolationWeights::uniform(order),
        };
        for w in [&fit, &rank] {
            if w.len() != order {
                return Err(Error::InvalidArgument(format!(
                    "expected {order} interpolation weights, got {}",
                    w.len()
                )));
            }
        }
        Ok((fit, rank))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub transition: Transition,
    pub prior_fit: f64,
    pub posterior_fit: f64,
    pub accepted: bool,
    /// Unmatched tokens when the iteration began.
    pub unmatched: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Every common token has a lexicon entry among its top candidates.
    AllMatched,
    /// No unvisited transition remains.
    Exhausted,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub table: TranslitTable,
    pub trace: Trace,
    pub stop: StopReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
}

impl Trace {
    pub fn accepted(&self) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter(|r| r.accepted)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{TRACE_HEADER}");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.iteration,
                r.transition.position.mark(&r.transition.source),
                r.transition.target,
                r.prior_fit,
                r.posterior_fit,
                r.accepted,
                r.unmatched
            );
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        const WHAT: &str = "trace";
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == TRACE_HEADER => {}
            _ => return Err(Error::format(WHAT, 1, "missing trace header")),
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("expected 7 fields, got {}", f.len()),
                ));
            }
            let bad = |field: &str| Error::format(WHAT, lineno, format!("bad {field}"));
            let (source, position) = Position::unmark(f[1]).map_err(|_| bad("source"))?;
            records.push(IterationRecord {
                iteration: f[0].parse().map_err(|_| bad("iteration"))?,
                transition: Transition::new(source, position, f[2]),
                prior_fit: f[3].parse().map_err(|_| bad("prior_fit"))?,
                posterior_fit: f[4].parse().map_err(|_| bad("posterior_fit"))?,
                accepted: f[5].parse().map_err(|_| bad("accepted"))?,
                unmatched: f[6].parse().map_err(|_| bad("unmatched"))?,
            });
        }
        Ok(Trace { records })
    }
}

/// The data one learning run works on.
#[derive(Debug, Clone, Copy)]
pub struct LearnerInputs<'a> {
    /// Source-script names of the origin being learned, with counts.
    pub source: &'a NameLexicon,
    /// Target-script names the transliterations should land on.
    pub target: &'a NameLexicon,
    /// Target-script model for ranking and for the acceptance fit.
    pub model: &'a NgramModel,
    /// Target-script phonetic classes for the lookup.
    pub classes: &'a PhoneticClassTable,
}

struct State<'a> {
    inputs: LearnerInputs<'a>,
    config: &'a LearnerConfig,
    rank_weights: InterpolationWeights,
    fit_weights: InterpolationWeights,
    tokens: Vec<Token>,
}

impl<'a> State<'a> {
    fn new(
        table: &TranslitTable,
        inputs: LearnerInputs<'a>,
        config: &'a LearnerConfig,
    ) -> Result<Self> {
        let (fit_weights, rank_weights) = config.validate(inputs.model)?;
        if inputs.model.script() != inputs.target.script() {
            return Err(Error::ScriptMismatch {
                expected: inputs.target.script().to_string(),
                found: inputs.model.script().to_string(),
            });
        }
        if inputs.source.script() != table.source_script() {
            return Err(Error::ScriptMismatch {
                expected: table.source_script().to_string(),
                found: inputs.source.script().to_string(),
            });
        }
        let tokens = match inputs.source.common_tokens(config.min_count.max(1)) {
            Ok(t) if !t.is_empty() => t,
            _ => return Err(Error::NothingToLearn),
        };
        Ok(State {
            inputs,
            config,
            rank_weights,
            fit_weights,
            tokens,
        })
    }

    /// Top-k candidate texts per token.
    fn candidates(&self, table: &TranslitTable) -> Result<Vec<Vec<String>>> {
        self.tokens
            .iter()
            .map(|t| {
                let ranked = transliterate_token(
                    table,
                    self.inputs.model,
                    &self.rank_weights,
                    t.as_str(),
                    self.config.top_k,
                    self.config.candidate_cap,
                )?;
                Ok(ranked.into_iter().map(|c| c.text).collect())
            })
            .collect()
    }

    fn fit(&self, candidates: &[Vec<String>]) -> Result<f64> {
        let top: Vec<&str> = candidates.iter().map(|c| c[0].as_str()).collect();
        self.inputs.model.model_fit(&top, &self.fit_weights)
    }

    fn unmatched(&self, candidates: &[Vec<String>]) -> Vec<usize> {
        (0..self.tokens.len())
            .filter(|&i| !candidates[i].iter().any(|c| self.inputs.target.contains(c)))
            .collect()
    }

    /// Counts, for each transition absent from `table`, the unmatched tokens
    /// it would let the table derive their nearest lexicon entry for.
    fn mine(
        &self,
        table: &TranslitTable,
        candidates: &[Vec<String>],
        unmatched: &[usize],
    ) -> Result<BTreeMap<Transition, usize>> {
        let mut counts: BTreeMap<Transition, usize> = BTreeMap::new();
        for &i in unmatched {
            let token = self.tokens[i].as_str();
            let found = lookup(
                &candidates[i],
                self.inputs.target,
                self.inputs.classes,
                self.config.epsilon,
            )?;
            let Some(target) = found.matched.filter(|_| found.replaced) else {
                continue;
            };
            let target = target.as_str();
            if derivable(table, None, token, target) {
                continue;
            }
            for t in substring_pairs(token, target, self.config.max_ngram_len) {
                if !table.contains(&t) && derivable(table, Some(&t), token, target) {
                    *counts.entry(t).or_insert(0) += 1;
                }
            }
        }
        Ok(counts)
    }
}

/// Position-independent pairs of a source substring (1..=max symbols) and a
/// target substring (0..=max symbols), deduplicated.
fn substring_pairs(source: &str, target: &str, max: usize) -> BTreeSet<Transition> {
    let s: Vec<char> = source.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let mut sources = BTreeSet::new();
    for len in 1..=max.min(s.len()) {
        for w in s.windows(len) {
            sources.insert(w.iter().collect::<String>());
        }
    }
    let mut targets = BTreeSet::from([String::new()]);
    for len in 1..=max.min(t.len()) {
        for w in t.windows(len) {
            targets.insert(w.iter().collect::<String>());
        }
    }
    let mut out = BTreeSet::new();
    for a in &sources {
        for b in &targets {
            out.insert(Transition::any(a.clone(), b.clone()));
        }
    }
    out
}

/// Common source tokens none of whose top-k transliterations under `table`
/// is in the target lexicon, most frequent first.
pub fn find_unmatched(
    table: &TranslitTable,
    inputs: LearnerInputs<'_>,
    config: &LearnerConfig,
) -> Result<Vec<Token>> {
    let state = State::new(table, inputs, config)?;
    let candidates = state.candidates(table)?;
    Ok(state
        .unmatched(&candidates)
        .into_iter()
        .map(|i| state.tokens[i].clone())
        .collect())
}

/// Per-transition counts mined from the tokens [`find_unmatched`] returns.
pub fn mine_candidates(
    table: &TranslitTable,
    inputs: LearnerInputs<'_>,
    config: &LearnerConfig,
) -> Result<BTreeMap<Transition, usize>> {
    let state = State::new(table, inputs, config)?;
    let candidates = state.candidates(table)?;
    let unmatched = state.unmatched(&candidates);
    state.mine(table, &candidates, &unmatched)
}

/// Runs the learner from `initial`.
pub fn learn(
    initial: &TranslitTable,
    inputs: LearnerInputs<'_>,
    config: &LearnerConfig,
) -> Result<LearnOutcome> {
    learn_observed(initial, inputs, config, |_, _, _| {})
}

/// Like [`learn`], calling `observer(before, after, record)` after every
/// decision, where `before` is the table prior to the tentative addition.
pub fn learn_observed<F>(
    initial: &TranslitTable,
    inputs: LearnerInputs<'_>,
    config: &LearnerConfig,
    mut observer: F,
) -> Result<LearnOutcome>
where
    F: FnMut(&TranslitTable, &TranslitTable, &IterationRecord),
{
    let state = State::new(initial, inputs, config)?;

    let mut table = initial.clone();
    let mut candidates = state.candidates(&table)?;
    let mut fit = state.fit(&candidates)?;
    let mut mined: Option<BTreeMap<Transition, usize>> = None;
    let mut visited: BTreeSet<Transition> = BTreeSet::new();
    let mut trace = Trace::default();

    for iteration in 1..=config.max_iterations {
        let unmatched = state.unmatched(&candidates);
        if unmatched.is_empty() {
            return Ok(LearnOutcome {
                table,
                trace,
                stop: StopReason::AllMatched,
            });
        }
        if mined.is_none() {
            mined = Some(state.mine(&table, &candidates, &unmatched)?);
        }
        let best = mined
            .as_ref()
            .expect("mined above")
            .iter()
            .filter(|(t, _)| !visited.contains(*t))
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(t, _)| t.clone());
        let Some(transition) = best else {
            return Ok(LearnOutcome {
                table,
                trace,
                stop: StopReason::Exhausted,
            });
        };
        visited.insert(transition.clone());

        let before = table.clone();
        table.add_transition(&transition)?;
        let trial = state.candidates(&table)?;
        let posterior = state.fit(&trial)?;
        let accepted = posterior >= fit;
        let record = IterationRecord {
            iteration,
            transition: transition.clone(),
            prior_fit: fit,
            posterior_fit: posterior,
            accepted,
            unmatched: unmatched.len(),
        };
        if accepted {
            log::info!("iteration {iteration}: accepted {transition:?} ({fit} -> {posterior})");
            candidates = trial;
            fit = posterior;
            mined = None;
        } else {
            log::debug!("iteration {iteration}: rejected {transition:?} ({fit} -> {posterior})");
            table.remove_transition(&transition)?;
        }
        observer(&before, &table, &record);
        trace.records.push(record);
    }
    Ok(LearnOutcome {
        table,
        trace,
        stop: StopReason::IterationLimit,
    })
}
