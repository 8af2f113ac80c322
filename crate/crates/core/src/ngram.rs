//! Character n-gram language models with fixed-weight linear interpolation.
//!
//! Tokens are padded on the left with `max_order - 1` start markers and
//! terminated by one end marker. Counts for every order `1..=max_order` are
//! accumulated, weighted by the token's lexicon count. Conditionals use
//! add-one smoothing over the declared symbol inventory plus the end and
//! unknown markers, so every conditional distribution sums to one.
//!
//! A token's score is the sum over its symbols of
//! `ln(sum_k w_k * P_k(symbol | previous k-1 symbols))`. The end marker is
//! trained but not scored, which keeps scores strictly decreasing as symbols
//! are appended.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::lexicon::NameLexicon;
use crate::script::Script;

pub const MAX_SUPPORTED_ORDER: usize = 6;
pub const DEFAULT_ORDER: usize = 4;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A model symbol: a script character or one of the padding markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Start,
    End,
    Unknown,
    Char(char),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Start => f.write_str("<s>"),
            Sym::End => f.write_str("</s>"),
            Sym::Unknown => f.write_str("<unk>"),
            Sym::Char(c) => write!(f, "{c}"),
        }
    }
}

impl Sym {
    fn parse(s: &str) -> Option<Sym> {
        match s {
            "<s>" => Some(Sym::Start),
            "</s>" => Some(Sym::End),
            "<unk>" => Some(Sym::Unknown),
            _ => {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Some(Sym::Char(c)),
                    _ => None,
                }
            }
        }
    }
}

/// Per-order mixture coefficients. Non-negative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationWeights(Vec<f64>);

impl InterpolationWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() > MAX_SUPPORTED_ORDER {
            return Err(Error::InvalidArgument(format!(
                "need 1..={MAX_SUPPORTED_ORDER} interpolation weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "interpolation weights must be finite and non-negative: {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "interpolation weights must sum to 1, got {sum}"
            )));
        }
        Ok(InterpolationWeights(weights))
    }

    /// Equal weight on every order; `uniform(4)` is `[0.25; 4]`.
    pub fn uniform(orders: usize) -> Self {
        assert!((1..=MAX_SUPPORTED_ORDER).contains(&orders));
        InterpolationWeights(vec![1.0 / orders as f64; orders])
    }

    /// All mass on a single order (1-based), e.g. trigram-only `[0, 0, 1, 0]`.
    pub fn single(orders: usize, order: usize) -> Self {
        assert!((1..=orders).contains(&order) && orders <= MAX_SUPPORTED_ORDER);
        let mut w = vec![0.0; orders];
        w[order - 1] = 1.0;
        InterpolationWeights(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    next: HashMap<Sym, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    script: String,
    max_order: usize,
    inventory: BTreeSet<char>,
    /// `orders[k - 1]` maps a (k-1)-symbol context to its successor counts.
    orders: Vec<HashMap<Vec<Sym>, ContextCounts>>,
}

impl NgramModel {
    pub fn train(lex: &NameLexicon, script: &Script, max_order: usize) -> Result<Self> {
        if lex.script() != script.id() {
            return Err(Error::ScriptMismatch {
                expected: script.id().to_string(),
                found: lex.script().to_string(),
            });
        }
        if !(1..=MAX_SUPPORTED_ORDER).contains(&max_order) {
            return Err(Error::InvalidArgument(format!(
                "max_order must be in 1..={MAX_SUPPORTED_ORDER}, got {max_order}"
            )));
        }
        if lex.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut model = NgramModel {
            script: script.id().to_string(),
            max_order,
            inventory: script.symbols().clone(),
            orders: vec![HashMap::new(); max_order],
        };
        for (tok, weight) in lex.iter() {
            let mut padded = model.padded(tok.as_str());
            padded.push(Sym::End);
            for pos in (max_order - 1)..padded.len() {
                for k in 1..=max_order {
                    let ctx = &padded[pos + 1 - k..pos];
                    let entry = model.orders[k - 1].entry(ctx.to_vec()).or_default();
                    entry.total += weight;
                    *entry.next.entry(padded[pos]).or_insert(0) += weight;
                }
            }
        }
        Ok(model)
    }

    pub fn script(&self) -> &str {
        &self.script
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn inventory(&self) -> &BTreeSet<char> {
        &self.inventory
    }

    /// Every outcome a conditional distributes mass over.
    pub fn vocabulary(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = self.inventory.iter().map(|c| Sym::Char(*c)).collect();
        v.push(Sym::End);
        v.push(Sym::Unknown);
        v
    }

    /// Smoothing denominator increment: inventory size plus end and unknown.
    pub fn vocabulary_size(&self) -> usize {
        self.inventory.len() + 2
    }

    pub fn symbol(&self, c: char) -> Sym {
        if self.inventory.contains(&c) {
            Sym::Char(c)
        } else {
            Sym::Unknown
        }
    }

    /// Start-padded symbol sequence for `token` (no end marker).
    fn padded(&self, token: &str) -> Vec<Sym> {
        let mut v = vec![Sym::Start; self.max_order - 1];
        v.extend(token.chars().map(|c| self.symbol(c)));
        v
    }

    /// Observed contexts of the given order (1-based), in sorted order.
    pub fn contexts(&self, order: usize) -> Vec<&[Sym]> {
        let mut v: Vec<&[Sym]> = self.orders[order - 1].keys().map(Vec::as_slice).collect();
        v.sort();
        v
    }

    pub fn count(&self, context: &[Sym], next: Sym) -> u64 {
        self.orders
            .get(context.len())
            .and_then(|m| m.get(context))
            .and_then(|c| c.next.get(&next))
            .copied()
            .unwrap_or(0)
    }

    pub fn context_total(&self, context: &[Sym]) -> u64 {
        self.orders
            .get(context.len())
            .and_then(|m| m.get(context))
            .map_or(0, |c| c.total)
    }

    /// Add-one smoothed `P(next | context)`; the order is `context.len() + 1`.
    pub fn conditional(&self, context: &[Sym], next: Sym) -> f64 {
        debug_assert!(context.len() < self.max_order);
        let v = self.vocabulary_size() as f64;
        match self.orders[context.len()].get(context) {
            Some(c) => {
                let n = c.next.get(&next).copied().unwrap_or(0);
                (n as f64 + 1.0) / (c.total as f64 + v)
            }
            None => 1.0 / v,
        }
    }

    /// Maximum-likelihood `P(next | context)` without smoothing; `None` for
    /// an unseen context.
    pub fn raw_conditional(&self, context: &[Sym], next: Sym) -> Option<f64> {
        let c = self.orders.get(context.len())?.get(context)?;
        Some(c.next.get(&next).copied().unwrap_or(0) as f64 / c.total as f64)
    }

    fn check_weights(&self, weights: &InterpolationWeights) -> Result<()> {
        if weights.len() != self.max_order {
            return Err(Error::InvalidArgument(format!(
                "{} interpolation weights for a model of order {}",
                weights.len(),
                self.max_order
            )));
        }
        Ok(())
    }

    /// Interpolated log-probability of `token` (natural log, always < 0).
    pub fn score(&self, token: &str, weights: &InterpolationWeights) -> Result<f64> {
        if token.is_empty() {
            return Err(Error::EmptyToken);
        }
        self.check_weights(weights)?;
        Ok(self.score_unchecked(token, weights.as_slice()))
    }

    fn score_unchecked(&self, token: &str, weights: &[f64]) -> f64 {
        let padded = self.padded(token);
        let mut total = 0.0;
        for pos in (self.max_order - 1)..padded.len() {
            let mut p = 0.0;
            for (k0, w) in weights.iter().enumerate() {
                if *w > 0.0 {
                    p += w * self.conditional(&padded[pos - k0..pos], padded[pos]);
                }
            }
            total += p.ln();
        }
        total
    }

    /// Mean length-normalized log-score over `tokens`.
    pub fn model_fit<S: AsRef<str>>(
        &self,
        tokens: &[S],
        weights: &InterpolationWeights,
    ) -> Result<f64> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput("model_fit needs at least one token"));
        }
        self.check_weights(weights)?;
        let mut sum = 0.0;
        for t in tokens {
            let t = t.as_ref();
            if t.is_empty() {
                return Err(Error::EmptyToken);
            }
            sum += self.score_unchecked(t, weights.as_slice()) / t.chars().count() as f64;
        }
        Ok(sum / tokens.len() as f64)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#ngram\tv1");
        let _ = writeln!(out, "#script\t{}", self.script);
        let _ = writeln!(out, "#max_order\t{}", self.max_order);
        let inv: String = self.inventory.iter().collect();
        let _ = writeln!(out, "#inventory\t{inv}");
        for k in 1..=self.max_order {
            let _ = writeln!(out, "#order\t{k}");
            for ctx in self.contexts(k) {
                let counts = &self.orders[k - 1][ctx];
                let mut next: Vec<_> = counts.next.iter().collect();
                next.sort();
                let ctx_text = ctx.iter().map(Sym::to_string).collect::<Vec<_>>().join(" ");
                for (sym, n) in next {
                    let _ = writeln!(out, "{ctx_text}\t{sym}\t{n}");
                }
            }
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        const WHAT: &str = "ngram model";
        let mut lines = text.lines().enumerate();
        let mut header = |key: &str| -> Result<String> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| Error::format(WHAT, 0, format!("missing #{key} header")))?;
            line.strip_prefix(&format!("#{key}\t"))
                .map(str::to_string)
                .ok_or_else(|| Error::format(WHAT, idx + 1, format!("expected #{key} header")))
        };
        let version = header("ngram")?;
        if version != "v1" {
            return Err(Error::format(
                WHAT,
                1,
                format!("unsupported version {version:?}"),
            ));
        }
        let script = header("script")?;
        let max_order: usize = header("max_order")?
            .parse()
            .map_err(|_| Error::format(WHAT, 3, "bad max_order"))?;
        if !(1..=MAX_SUPPORTED_ORDER).contains(&max_order) {
            return Err(Error::format(
                WHAT,
                3,
                format!("max_order {max_order} out of range"),
            ));
        }
        let inventory: BTreeSet<char> = header("inventory")?.chars().collect();
        let mut orders: Vec<HashMap<Vec<Sym>, ContextCounts>> = vec![HashMap::new(); max_order];
        let mut current: Option<usize> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if let Some(k) = line.strip_prefix("#order\t") {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::format(WHAT, lineno, "bad order"))?;
                if !(1..=max_order).contains(&k) {
                    return Err(Error::format(
                        WHAT,
                        lineno,
                        format!("order {k} out of range"),
                    ));
                }
                current = Some(k);
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let k = current.ok_or_else(|| Error::format(WHAT, lineno, "count before #order"))?;
            let mut fields = line.split('\t');
            let (Some(ctx), Some(sym), Some(n), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    "expected context<TAB>symbol<TAB>count",
                ));
            };
            let ctx: Vec<Sym> = if ctx.is_empty() {
                Vec::new()
            } else {
                ctx.split(' ')
                    .map(|s| {
                        Sym::parse(s)
                            .ok_or_else(|| Error::format(WHAT, lineno, format!("bad symbol {s:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            if ctx.len() != k - 1 {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("context length {} for order {k}", ctx.len()),
                ));
            }
            let sym = Sym::parse(sym)
                .ok_or_else(|| Error::format(WHAT, lineno, format!("bad symbol {sym:?}")))?;
            let n: u64 = n
                .parse()
                .map_err(|_| Error::format(WHAT, lineno, "bad count"))?;
            let entry = orders[k - 1].entry(ctx).or_default();
            entry.total += n;
            if entry.next.insert(sym, n).is_some() {
                return Err(Error::format(WHAT, lineno, "duplicate n-gram"));
            }
        }
        Ok(NgramModel {
            script,
            max_order,
            inventory,
            orders,
        })
    }
}
