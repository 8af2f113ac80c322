//! Edit distance with phonetic substitution classes, and lexicon lookup.
//!
//! Substituting two symbols that share a class (labials `bvmp`, say) costs
//! `in_class_cost < 1`; any other substitution, insertion or deletion costs 1.
//!
//! Class file format: one class per line, `script<TAB>symbols`, plus an
//! optional `#!in_class_cost<TAB>0.5` header.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lexicon::NameLexicon;
use crate::script::Token;

pub const DEFAULT_IN_CLASS_COST: f64 = 0.5;
pub const DEFAULT_THRESHOLD: f64 = 1.0;

const COST_HEADER: &str = "#!in_class_cost";

#[derive(Debug, Clone, PartialEq)]
pub struct PhoneticClassTable {
    classes: Vec<BTreeSet<char>>,
    in_class_cost: f64,
    pairs: HashSet<(char, char)>,
}

impl PhoneticClassTable {
    pub fn new<I, S>(classes: I, in_class_cost: f64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if !(in_class_cost > 0.0 && in_class_cost < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "in-class cost must lie in (0, 1), got {in_class_cost}"
            )));
        }
        let classes: Vec<BTreeSet<char>> = classes
            .into_iter()
            .map(|c| c.as_ref().chars().collect::<BTreeSet<char>>())
            .filter(|c| !c.is_empty())
            .collect();
        let mut pairs = HashSet::new();
        for class in &classes {
            for &a in class {
                for &b in class {
                    if a != b {
                        pairs.insert((a, b));
                    }
                }
            }
        }
        Ok(PhoneticClassTable {
            classes,
            in_class_cost,
            pairs,
        })
    }

    /// No classes: plain Levenshtein distance.
    pub fn plain() -> Self {
        Self::new(Vec::<String>::new(), DEFAULT_IN_CLASS_COST).expect("valid")
    }

    pub fn classes(&self) -> &[BTreeSet<char>] {
        &self.classes
    }

    pub fn in_class_cost(&self) -> f64 {
        self.in_class_cost
    }

    pub fn substitution_cost(&self, a: char, b: char) -> f64 {
        if a == b {
            0.0
        } else if self.pairs.contains(&(a, b)) {
            self.in_class_cost
        } else {
            1.0
        }
    }

    /// Weighted edit distance between two tokens of the same script.
    pub fn distance(&self, a: &str, b: &str) -> f64 {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        self.distance_chars(&a, &b)
    }

    pub(crate) fn distance_chars(&self, a: &[char], b: &[char]) -> f64 {
        let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64).collect();
        let mut cur = vec![0.0; b.len() + 1];
        for (i, &ca) in a.iter().enumerate() {
            cur[0] = (i + 1) as f64;
            for (j, &cb) in b.iter().enumerate() {
                let sub = prev[j] + self.substitution_cost(ca, cb);
                let del = prev[j + 1] + 1.0;
                let ins = cur[j] + 1.0;
                cur[j + 1] = sub.min(del).min(ins);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[b.len()]
    }
}

/// A parsed class file: per-script class lists sharing one in-class cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFile {
    pub in_class_cost: f64,
    pub scripts: BTreeMap<String, Vec<String>>,
}

impl ClassFile {
    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "class table";
        let mut in_class_cost = DEFAULT_IN_CLASS_COST;
        let mut scripts: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix(COST_HEADER) {
                in_class_cost = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::format(WHAT, lineno, format!("bad cost {rest:?}")))?;
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (script, symbols) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(WHAT, lineno, "expected script<TAB>symbols"))?;
            let symbols = symbols.trim();
            if symbols.chars().count() < 2 {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    "a class needs at least two symbols",
                ));
            }
            scripts
                .entry(script.to_string())
                .or_default()
                .push(symbols.to_string());
        }
        // validates the cost
        PhoneticClassTable::new(Vec::<String>::new(), in_class_cost)
            .map_err(|e| Error::format(WHAT, 0, e.to_string()))?;
        Ok(ClassFile {
            in_class_cost,
            scripts,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{COST_HEADER}\t{}", self.in_class_cost);
        for (script, classes) in &self.scripts {
            for c in classes {
                let _ = writeln!(out, "{script}\t{c}");
            }
        }
        out
    }

    /// Classes for one script; an unlisted script gets plain edit distance.
    pub fn for_script(&self, script: &str) -> PhoneticClassTable {
        let classes = self.scripts.get(script).cloned().unwrap_or_default();
        PhoneticClassTable::new(classes, self.in_class_cost).expect("cost validated at parse")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LookupResult {
    pub matched: Option<Token>,
    /// Distance of the closest pair examined; infinite when none was.
    pub distance: f64,
    pub replaced: bool,
    /// Index of the candidate that produced the closest pair.
    pub candidate: Option<usize>,
}

/// Finds the lexicon entry closest to any of `candidates`.
///
/// Ties go to the higher lexicon count, then the lexicographically smaller
/// entry. The match replaces the candidates only if its distance is within
/// `threshold`. Entries whose length differs from a candidate by more than
/// the threshold (or the best distance so far) are skipped unexamined.
pub fn lookup<S: AsRef<str>>(
    candidates: &[S],
    lexicon: &NameLexicon,
    classes: &PhoneticClassTable,
    threshold: f64,
) -> Result<LookupResult> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold must be >= 0, got {threshold}"
        )));
    }
    let cands: Vec<Vec<char>> = candidates
        .iter()
        .map(|c| c.as_ref().chars().collect())
        .collect();
    let mut best: Option<(f64, u64, &Token, usize)> = None;
    for (entry, count) in lexicon.iter() {
        let entry_chars: Vec<char> = entry.as_str().chars().collect();
        for (ci, cand) in cands.iter().enumerate() {
            let bound = best.map_or(threshold, |b| b.0.min(threshold));
            if cand.len().abs_diff(entry_chars.len()) as f64 > bound {
                continue;
            }
            let d = classes.distance_chars(cand, &entry_chars);
            let better = match best {
                None => true,
                Some((bd, bc, bt, _)) => {
                    d < bd || (d == bd && (count > bc || (count == bc && entry < bt)))
                }
            };
            if better {
                best = Some((d, count, entry, ci));
            }
        }
    }
    Ok(match best {
        Some((d, _, tok, ci)) => LookupResult {
            matched: Some(tok.clone()),
            distance: d,
            replaced: d <= threshold,
            candidate: Some(ci),
        },
        None => LookupResult {
            matched: None,
            distance: f64::INFINITY,
            replaced: false,
            candidate: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::Script;

    fn latin_classes() -> PhoneticClassTable {
        PhoneticClassTable::new(["bvmp", "szc", "kqcg", "aeiou"], 0.5).unwrap()
    }

    #[test]
    fn identity_and_in_class_substitution() {
        let c = latin_classes();
        assert_eq!(c.distance("rafael", "rafael"), 0.0);
        assert_eq!(c.distance("bat", "vat"), 0.5);
        assert_eq!(c.distance("bat", "tat"), 1.0);
        assert_eq!(c.distance("", "abc"), 3.0);
        assert_eq!(c.distance("abc", ""), 3.0);
        assert_eq!(c.distance("", ""), 0.0);
    }

    #[test]
    fn overlapping_classes() {
        let c = latin_classes();
        // c is both sibilant and velar
        assert_eq!(c.substitution_cost('s', 'c'), 0.5);
        assert_eq!(c.substitution_cost('c', 'k'), 0.5);
        assert_eq!(c.substitution_cost('s', 'k'), 1.0);
    }

    #[test]
    fn cost_must_be_below_one() {
        assert!(PhoneticClassTable::new(["ab"], 1.0).is_err());
        assert!(PhoneticClassTable::new(["ab"], 0.0).is_err());
        assert!(PhoneticClassTable::new(["ab"], f64::NAN).is_err());
    }

    #[test]
    fn class_file_round_trip() {
        let text = "#!in_class_cost\t0.5\nhebrew\tבומפ\nlatin\tbvmp\nlatin\tszc\n";
        let f = ClassFile::parse(text).unwrap();
        assert_eq!(f.to_text(), text);
        assert_eq!(f.for_script("latin").classes().len(), 2);
        assert!(f.for_script("arabic").classes().is_empty());
        assert!(ClassFile::parse("latin\tb\n").is_err());
        assert!(ClassFile::parse("#!in_class_cost\t1.5\n").is_err());
        assert!(ClassFile::parse("latin bvmp\n").is_err());
    }

    fn lex(pairs: &[(&str, u64)]) -> NameLexicon {
        NameLexicon::from_counts(&Script::latin(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn exact_candidate_is_replaced_at_zero() {
        let l = lex(&[("haim", 5), ("chaim", 2)]);
        let r = lookup(&["xyz", "haim"], &l, &latin_classes(), 1.0).unwrap();
        assert_eq!(r.matched.unwrap().as_str(), "haim");
        assert_eq!(r.distance, 0.0);
        assert!(r.replaced);
        assert_eq!(r.candidate, Some(1));
    }

    #[test]
    fn zero_threshold_without_exact_match() {
        let l = lex(&[("haim", 5)]);
        let r = lookup(&["haym"], &l, &latin_classes(), 0.0).unwrap();
        assert!(!r.replaced);
    }

    #[test]
    fn ties_prefer_count_then_text() {
        let l = lex(&[("bob", 1), ("pob", 3), ("mob", 3)]);
        let r = lookup(&["vob"], &l, &latin_classes(), 1.0).unwrap();
        assert_eq!(r.matched.unwrap().as_str(), "mob");
        assert_eq!(r.distance, 0.5);
    }

    #[test]
    fn empty_lexicon_is_not_an_error() {
        let r = lookup(&["abc"], &NameLexicon::new("latin"), &latin_classes(), 1.0).unwrap();
        assert!(!r.replaced && r.matched.is_none());
        assert!(lookup(&["abc"], &NameLexicon::new("latin"), &latin_classes(), -1.0).is_err());
    }
}
