//! Transliteration tables: source multigraphs, optionally anchored to the
//! start or end of a token, each mapping to an ordered set of target strings.
//!
//! File format (UTF-8, tab separated):
//!
//! ```text
//! #!scripts	latin	hebrew
//! # free comment
//! ch	ח|כ|צ'
//! *a	ע|א
//! e*	ה
//! '
//! ```
//!
//! A leading `*` anchors the key to the token start, a trailing `*` to the
//! token end. Outputs are separated by `|`; an empty output deletes the key.

// the doc examples above are literal TSV
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::script::{Script, ScriptRegistry};

pub const DEFAULT_MAX_KEY_LEN: usize = 4;
pub const DEFAULT_SEGMENTATION_CAP: usize = 10_000;

const HEADER: &str = "#!scripts";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    Any,
    Initial,
    Final,
}

impl Position {
    const ALL: [Position; 3] = [Position::Any, Position::Initial, Position::Final];

    fn index(self) -> usize {
        self as usize
    }

    /// Whether a piece spanning `start..end` of a token of `len` symbols may
    /// use an entry with this position.
    pub fn admits(self, start: usize, end: usize, len: usize) -> bool {
        match self {
            Position::Any => true,
            Position::Initial => start == 0,
            Position::Final => end == len,
        }
    }

    /// Renders `key` with its positional marker.
    pub fn mark(self, key: &str) -> String {
        match self {
            Position::Any => key.to_string(),
            Position::Initial => format!("*{key}"),
            Position::Final => format!("{key}*"),
        }
    }

    /// Splits a marked key into the bare key and its position.
    pub fn unmark(marked: &str) -> Result<(&str, Position)> {
        let (initial, rest) = match marked.strip_prefix('*') {
            Some(r) => (true, r),
            None => (false, marked),
        };
        let (fin, bare) = match rest.strip_suffix('*') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        if bare.is_empty() || bare.contains('*') {
            return Err(Error::InvalidArgument(format!("malformed key {marked:?}")));
        }
        match (initial, fin) {
            (false, false) => Ok((bare, Position::Any)),
            (true, false) => Ok((bare, Position::Initial)),
            (false, true) => Ok((bare, Position::Final)),
            (true, true) => Err(Error::InvalidArgument(format!(
                "key {marked:?} cannot be both initial and final"
            ))),
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Position::Any => "",
            Position::Initial => " (initial)",
            Position::Final => " (final)",
        })
    }
}

/// A single source multigraph → target string rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: String,
    pub position: Position,
    pub target: String,
}

impl Transition {
    pub fn new(source: impl Into<String>, position: Position, target: impl Into<String>) -> Self {
        Transition {
            source: source.into(),
            position,
            target: target.into(),
        }
    }

    pub fn any(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self::new(source, Position::Any, target)
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {:?}",
            self.position.mark(&self.source),
            self.target
        )
    }
}

/// Borrowed view of one `(key, position)` row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry<'a> {
    pub key: &'a str,
    pub position: Position,
    pub outputs: &'a [String],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslitTable {
    source_script: String,
    target_script: String,
    /// Outputs per key, indexed by [`Position`]; an empty vector means no row.
    rows: BTreeMap<String, [Vec<String>; 3]>,
    max_key_len: usize,
}

/// One piece of a segmentation: symbols `start..end` of the token covered by
/// the row `(key, position)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece {
    pub start: usize,
    pub end: usize,
    pub key: String,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segmentation {
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentations {
    pub segmentations: Vec<Segmentation>,
    pub truncated: bool,
}

impl TranslitTable {
    /// An empty table. It fails the coverage invariant until rows are added;
    /// use [`TranslitTable::from_transitions`] for a validated table.
    pub fn empty(source_script: &Script, target_script: &Script) -> Self {
        TranslitTable {
            source_script: source_script.id().to_string(),
            target_script: target_script.id().to_string(),
            rows: BTreeMap::new(),
            max_key_len: 0,
        }
    }

    /// Builds a table from transitions, checking symbols against both scripts
    /// and coverage of the source script. Duplicate transitions are an error.
    pub fn from_transitions<I>(source: &Script, target: &Script, transitions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Transition>,
    {
        let mut table = Self::empty(source, target);
        for t in transitions {
            table.check_transition(&t, source, target)?;
            if !table.insert(&t) {
                return Err(Error::InvalidArgument(format!("duplicate transition {t}")));
            }
        }
        table.check_coverage(source)?;
        Ok(table)
    }

    fn check_transition(&self, t: &Transition, source: &Script, target: &Script) -> Result<()> {
        if t.source.is_empty() {
            return Err(Error::InvalidArgument("empty source key".into()));
        }
        let len = t.source.chars().count();
        if len > DEFAULT_MAX_KEY_LEN {
            return Err(Error::InvalidArgument(format!(
                "key {:?} longer than {DEFAULT_MAX_KEY_LEN} symbols",
                t.source
            )));
        }
        for c in t.source.chars() {
            if !source.contains(c) {
                return Err(Error::ForeignSymbol {
                    symbol: c,
                    script: source.id().to_string(),
                });
            }
        }
        for c in t.target.chars() {
            if !target.contains(c) {
                return Err(Error::ForeignSymbol {
                    symbol: c,
                    script: target.id().to_string(),
                });
            }
        }
        Ok(())
    }

    /// Source symbols lacking a position-independent row.
    pub fn uncovered(&self, source: &Script) -> Vec<char> {
        source
            .symbols()
            .iter()
            .filter(|c| {
                let mut buf = [0u8; 4];
                let key: &str = c.encode_utf8(&mut buf);
                self.outputs(key, Position::Any).is_empty()
            })
            .copied()
            .collect()
    }

    pub fn check_coverage(&self, source: &Script) -> Result<()> {
        if source.id() != self.source_script {
            return Err(Error::ScriptMismatch {
                expected: self.source_script.clone(),
                found: source.id().to_string(),
            });
        }
        let missing = self.uncovered(source);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Coverage { missing })
        }
    }

    pub fn source_script(&self) -> &str {
        &self.source_script
    }

    pub fn target_script(&self) -> &str {
        &self.target_script
    }

    pub fn max_key_len(&self) -> usize {
        self.max_key_len
    }

    pub fn outputs(&self, key: &str, position: Position) -> &[String] {
        self.rows
            .get(key)
            .map_or(&[][..], |slots| slots[position.index()].as_slice())
    }

    pub fn contains(&self, t: &Transition) -> bool {
        self.outputs(&t.source, t.position).contains(&t.target)
    }

    /// Rows in key order, then Any, Initial, Final.
    pub fn entries(&self) -> impl Iterator<Item = TableEntry<'_>> {
        self.rows.iter().flat_map(|(key, slots)| {
            Position::ALL.into_iter().filter_map(move |p| {
                let outputs = &slots[p.index()];
                (!outputs.is_empty()).then_some(TableEntry {
                    key,
                    position: p,
                    outputs,
                })
            })
        })
    }

    /// All transitions, in row order then output order.
    pub fn transitions(&self) -> Vec<Transition> {
        self.entries()
            .flat_map(|e| {
                e.outputs
                    .iter()
                    .map(move |o| Transition::new(e.key, e.position, o.clone()))
            })
            .collect()
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.rows.values().flatten().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Set insertion without validation; returns false if already present.
    fn insert(&mut self, t: &Transition) -> bool {
        let slot = &mut self.rows.entry(t.source.clone()).or_default()[t.position.index()];
        if slot.contains(&t.target) {
            return false;
        }
        slot.push(t.target.clone());
        self.max_key_len = self.max_key_len.max(t.source.chars().count());
        true
    }

    /// Adds a transition with set semantics. Returns whether the table changed.
    pub fn add_transition(&mut self, t: &Transition) -> Result<bool> {
        if t.source.is_empty() {
            return Err(Error::InvalidArgument("empty source key".into()));
        }
        if t.source.chars().count() > DEFAULT_MAX_KEY_LEN {
            return Err(Error::InvalidArgument(format!(
                "key {:?} longer than {DEFAULT_MAX_KEY_LEN} symbols",
                t.source
            )));
        }
        Ok(self.insert(t))
    }

    /// Like [`add_transition`](Self::add_transition), but also checks the
    /// symbols against the table's scripts.
    pub fn add_checked(
        &mut self,
        t: &Transition,
        source: &Script,
        target: &Script,
    ) -> Result<bool> {
        self.check_transition(t, source, target)?;
        self.add_transition(t)
    }

    /// Removes a transition. Removing an absent transition, or the last
    /// position-independent output of a single-symbol key, is an error.
    pub fn remove_transition(&mut self, t: &Transition) -> Result<()> {
        let missing = || Error::MissingTransition {
            key: t.source.clone(),
            position: t.position.to_string(),
            output: t.target.clone(),
        };
        let slots = self.rows.get_mut(&t.source).ok_or_else(missing)?;
        let slot = &mut slots[t.position.index()];
        let idx = slot
            .iter()
            .position(|o| *o == t.target)
            .ok_or_else(missing)?;
        if slot.len() == 1 && t.position == Position::Any && t.source.chars().count() == 1 {
            return Err(Error::Coverage {
                missing: t.source.chars().collect(),
            });
        }
        slot.remove(idx);
        if slots.iter().all(Vec::is_empty) {
            self.rows.remove(&t.source);
            self.max_key_len = self
                .rows
                .keys()
                .map(|k| k.chars().count())
                .max()
                .unwrap_or(0);
        }
        Ok(())
    }

    /// Rows usable for the piece starting at symbol `start` of `symbols`,
    /// as `(end, key, position, outputs)`.
    pub(crate) fn matches_at<'a>(
        &'a self,
        token: &'a str,
        bounds: &[usize],
        start: usize,
    ) -> impl Iterator<Item = (usize, &'a str, Position, &'a [String])> + 'a {
        let n = bounds.len() - 1;
        let max_end = n.min(start + self.max_key_len);
        let begin = bounds[start];
        let ends: Vec<(usize, usize)> = ((start + 1)..=max_end).map(|e| (e, bounds[e])).collect();
        ends.into_iter().flat_map(move |(end, byte_end)| {
            let key = &token[begin..byte_end];
            let slots = self.rows.get_key_value(key);
            Position::ALL.into_iter().filter_map(move |p| {
                let (k, slots) = slots?;
                let outputs = &slots[p.index()];
                (!outputs.is_empty() && p.admits(start, end, n)).then_some((
                    end,
                    k.as_str(),
                    p,
                    outputs.as_slice(),
                ))
            })
        })
    }

    /// All segmentations of `token` into table keys, up to the default cap.
    pub fn segmentations(&self, token: &str) -> Result<Segmentations> {
        self.segmentations_capped(token, DEFAULT_SEGMENTATION_CAP)
    }

    /// All segmentations, in depth-first order (shorter first pieces first,
    /// then Any, Initial, Final). Stops after `cap` and flags truncation.
    pub fn segmentations_capped(&self, token: &str, cap: usize) -> Result<Segmentations> {
        if token.is_empty() {
            return Err(Error::EmptyToken);
        }
        let bounds = char_bounds(token);
        let n = bounds.len() - 1;
        // reachable[i]: the suffix starting at symbol i can be segmented.
        let mut reachable = vec![false; n + 1];
        reachable[n] = true;
        for i in (0..n).rev() {
            reachable[i] = self
                .matches_at(token, &bounds, i)
                .any(|(end, ..)| reachable[end]);
        }
        if !reachable[0] {
            return Err(Error::Unsegmentable(token.to_string()));
        }
        let mut out = Segmentations {
            segmentations: Vec::new(),
            truncated: false,
        };
        let mut stack = Vec::new();
        self.enumerate(token, &bounds, 0, &reachable, &mut stack, &mut out, cap);
        if out.truncated {
            log::warn!("segmentations of {token:?} truncated at {cap}");
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        token: &str,
        bounds: &[usize],
        start: usize,
        reachable: &[bool],
        stack: &mut Vec<Piece>,
        out: &mut Segmentations,
        cap: usize,
    ) {
        if start == bounds.len() - 1 {
            if out.segmentations.len() >= cap {
                out.truncated = true;
            } else {
                out.segmentations.push(Segmentation {
                    pieces: stack.clone(),
                });
            }
            return;
        }
        for (end, key, position, _) in self.matches_at(token, bounds, start) {
            if out.truncated {
                return;
            }
            if !reachable[end] {
                continue;
            }
            stack.push(Piece {
                start,
                end,
                key: key.to_string(),
                position,
            });
            self.enumerate(token, bounds, end, reachable, stack, out, cap);
            stack.pop();
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{HEADER}\t{}\t{}",
            self.source_script, self.target_script
        );
        for e in self.entries() {
            let _ = writeln!(out, "{}\t{}", e.position.mark(e.key), e.outputs.join("|"));
        }
        out
    }

    /// Parses a table file, validating symbols, uniqueness and coverage.
    pub fn parse(text: &str, scripts: &ScriptRegistry) -> Result<Self> {
        const WHAT: &str = "table";
        let mut table: Option<(TranslitTable, &Script, &Script)> = None;
        let mut seen: BTreeSet<(String, Position)> = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix(HEADER) {
                if table.is_some() {
                    return Err(Error::format(WHAT, lineno, "duplicate scripts header"));
                }
                let ids: Vec<&str> = rest.split('\t').filter(|s| !s.is_empty()).collect();
                let [src, tgt] = ids[..] else {
                    return Err(Error::format(
                        WHAT,
                        lineno,
                        "header must name source and target scripts",
                    ));
                };
                let (src, tgt) = (scripts.get(src)?, scripts.get(tgt)?);
                table = Some((TranslitTable::empty(src, tgt), src, tgt));
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (tbl, src, tgt) = table
                .as_mut()
                .ok_or_else(|| Error::format(WHAT, lineno, format!("missing {HEADER} header")))?;
            let (marked, outputs) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(WHAT, lineno, "expected key<TAB>outputs"))?;
            let (key, position) =
                Position::unmark(marked).map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
            if !seen.insert((key.to_string(), position)) {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("duplicate key {marked:?}"),
                ));
            }
            for output in outputs.split('|') {
                let t = Transition::new(key, position, output);
                tbl.check_transition(&t, src, tgt)
                    .map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
                if !tbl.insert(&t) {
                    return Err(Error::format(
                        WHAT,
                        lineno,
                        format!("duplicate output {output:?} for {marked:?}"),
                    ));
                }
            }
        }
        let (tbl, src, _) =
            table.ok_or_else(|| Error::format(WHAT, 0, format!("missing {HEADER} header")))?;
        tbl.check_coverage(src)?;
        Ok(tbl)
    }
}

/// Byte offsets of every symbol boundary, including both ends.
pub(crate) fn char_bounds(s: &str) -> Vec<usize> {
    let mut v: Vec<usize> = s.char_indices().map(|(i, _)| i).collect();
    v.push(s.len());
    v
}

/// The learner's starting point: an independent copy of the generic table.
pub fn uniform_table(base: &TranslitTable) -> TranslitTable {
    base.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scripts() -> (Script, Script) {
        (
            Script::new("src", "abck".chars(), false).unwrap(),
            Script::new("tgt", "xyzq".chars(), false).unwrap(),
        )
    }

    fn registry() -> ScriptRegistry {
        let (s, t) = scripts();
        let mut reg = ScriptRegistry::with_builtins();
        reg.register(s);
        reg.register(t);
        reg
    }

    const TOY: &str = "#!scripts\tsrc\ttgt\na\tx|y\nb\tz\nc\tq\nk\tq\nck\tq\n*a\tz\n";

    #[test]
    fn parse_reads_markers_and_outputs() {
        let t = TranslitTable::parse(TOY, &registry()).unwrap();
        assert_eq!(t.outputs("a", Position::Any), ["x", "y"]);
        assert_eq!(t.outputs("a", Position::Initial), ["z"]);
        assert_eq!(t.outputs("ck", Position::Any), ["q"]);
        assert_eq!(t.max_key_len(), 2);
        assert_eq!(t.len(), 7);
    }

    #[test]
    fn parse_errors() {
        let reg = registry();
        let dup = format!("{TOY}a\tz\n");
        let err = TranslitTable::parse(&dup, &reg).unwrap_err();
        assert!(err.to_string().contains("line 8"), "{err}");
        assert!(
            TranslitTable::parse("#!scripts\tsrc\ttgt\na\tx\n", &reg).is_err(),
            "coverage"
        );
        assert!(
            TranslitTable::parse(&format!("{TOY}d\tx\n"), &reg).is_err(),
            "foreign key symbol"
        );
        assert!(
            TranslitTable::parse(&format!("{TOY}ab\tw\n"), &reg).is_err(),
            "foreign output"
        );
        assert!(
            TranslitTable::parse("a\tx\n", &reg).is_err(),
            "missing header"
        );
        assert!(TranslitTable::parse(&format!("{TOY}*b*\tx\n"), &reg).is_err());
        assert!(TranslitTable::parse(&format!("{TOY}bb\tx|x\n"), &reg).is_err());
        match TranslitTable::parse("#!scripts\tsrc\ttgt\na\tx\nb\tx\n", &reg) {
            Err(Error::Coverage { missing }) => assert_eq!(missing, vec!['c', 'k']),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_output_means_deletion() {
        let text = "#!scripts\tsrc\ttgt\na\tx|\nb\t\nc\tq\nk\tq\n";
        let t = TranslitTable::parse(text, &registry()).unwrap();
        assert_eq!(t.outputs("a", Position::Any), ["x", ""]);
        assert_eq!(t.outputs("b", Position::Any), [""]);
        assert_eq!(t.to_tsv(), text);
    }

    #[test]
    fn serialization_round_trip() {
        let t = TranslitTable::parse(TOY, &registry()).unwrap();
        let text = t.to_tsv();
        let back = TranslitTable::parse(&text, &registry()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_tsv(), text);
    }

    #[test]
    fn segmentations_of_ck() {
        let t = TranslitTable::parse(TOY, &registry()).unwrap();
        let segs = t.segmentations("ck").unwrap();
        let keys: Vec<Vec<&str>> = segs
            .segmentations
            .iter()
            .map(|s| s.pieces.iter().map(|p| p.key.as_str()).collect())
            .collect();
        assert_eq!(keys, vec![vec!["c", "k"], vec!["ck"]]);
    }

    #[test]
    fn single_symbol_token_is_initial_and_final() {
        let t = TranslitTable::parse(TOY, &registry()).unwrap();
        let segs = t.segmentations("a").unwrap();
        let positions: Vec<Position> = segs
            .segmentations
            .iter()
            .map(|s| s.pieces[0].position)
            .collect();
        assert_eq!(positions, vec![Position::Any, Position::Initial]);
        // `*a` is not usable mid-token
        assert_eq!(t.segmentations("ba").unwrap().segmentations.len(), 1);
    }

    #[test]
    fn segmentation_cap_truncates() {
        let (s, tg) = scripts();
        let t = TranslitTable::from_transitions(
            &s,
            &tg,
            ["a", "b", "c", "k", "aa", "aaa"].map(|k| Transition::any(k, "x")),
        )
        .unwrap();
        let segs = t.segmentations_capped("aaaaaaaa", 5).unwrap();
        assert!(segs.truncated);
        assert_eq!(segs.segmentations.len(), 5);
        assert!(!t.segmentations("aaaa").unwrap().truncated);
    }

    #[test]
    fn unsegmentable_token_errors() {
        let t = TranslitTable::parse(TOY, &registry()).unwrap();
        assert!(matches!(
            t.segmentations("ad"),
            Err(Error::Unsegmentable(_))
        ));
        assert!(t.segmentations("").is_err());
    }

    #[test]
    fn add_remove_set_semantics() {
        let base = TranslitTable::parse(TOY, &registry()).unwrap();
        let mut t = uniform_table(&base);
        assert_eq!(t, base);
        let tr = Transition::any("ab", "zz");
        assert!(t.add_transition(&tr).unwrap());
        assert_ne!(t, base, "copy is independent");
        assert!(!t.add_transition(&tr).unwrap(), "idempotent");
        t.remove_transition(&tr).unwrap();
        assert_eq!(t, base);
        assert!(t.remove_transition(&tr).is_err(), "absent");
        assert!(matches!(
            t.remove_transition(&Transition::any("b", "z")),
            Err(Error::Coverage { .. })
        ));
        t.remove_transition(&Transition::any("a", "y")).unwrap();
        assert_eq!(t.outputs("a", Position::Any), ["x"]);
        t.remove_transition(&Transition::any("ck", "q")).unwrap();
        assert_eq!(t.max_key_len(), 1);
    }
}
