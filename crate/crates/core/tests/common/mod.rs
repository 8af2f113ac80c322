//! Shared fixtures, synthetic corpora and reference oracles for the
//! integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use translit_core::lexicon::ingest_name_list;
use translit_core::table::Position;
use translit_core::{
    NameLexicon, NgramModel, PhoneticClassTable, Script, Transition, TranslitTable,
};

pub const ORIGINS: [&str; 4] = ["hebrew", "arabic", "english", "spanish"];

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// The `{origin}_origin.{script}.txt` name list as a lexicon.
pub fn origin_lexicon(origin: &str, script: &Script) -> NameLexicon {
    let text = read_fixture(&format!("{origin}_origin.{}.txt", script.id()));
    let report = ingest_name_list(text.lines(), script);
    assert!(
        report.diagnostics.is_empty(),
        "{origin}: {:?}",
        report.diagnostics
    );
    report.lexicon
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Toy language: a small source alphabet spelled into Cyrillic by a known
// table, with context rules deciding between ambiguous outputs.

const CONSONANTS: [char; 12] = ['b', 'c', 'd', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't'];
const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

pub fn toy_source() -> Script {
    Script::new("toysrc", "abcdegiklmnoprstuy".chars(), true).unwrap()
}

pub fn toy_target() -> Script {
    Script::new("toytgt", "абцдегжиклмнопрсзтуый".chars(), false).unwrap()
}

fn primary(c: char) -> char {
    let (src, tgt) = ("abcdegiklmnoprstuy", "абкдегиклмнопрстуы");
    let i = src.chars().position(|x| x == c).expect("toy symbol");
    tgt.chars().nth(i).unwrap()
}

/// The secondary outputs: c before e/i, g before e/i, s between vowels,
/// and a context-free coin flip for y.
pub fn toy_secondary() -> Vec<Transition> {
    vec![
        Transition::any("c", "ц"),
        Transition::any("g", "ж"),
        Transition::any("s", "з"),
        Transition::any("y", "й"),
    ]
}

pub fn toy_true_table() -> TranslitTable {
    let mut rows: Vec<Transition> = "abcdegiklmnoprstuy"
        .chars()
        .map(|c| Transition::any(c.to_string(), primary(c).to_string()))
        .collect();
    rows.extend(toy_secondary());
    TranslitTable::from_transitions(&toy_source(), &toy_target(), rows).unwrap()
}

/// Spells a toy name by the context rules; only `y` draws from `rng`.
pub fn toy_spell(name: &str, rng: &mut impl Rng) -> String {
    let s: Vec<char> = name.chars().collect();
    let vowel = |i: Option<usize>| i.and_then(|i| s.get(i)).is_some_and(|c| VOWELS.contains(c));
    let front = |i: usize| matches!(s.get(i + 1), Some('e' | 'i'));
    (0..s.len())
        .map(|i| match s[i] {
            'c' if front(i) => 'ц',
            'g' if front(i) => 'ж',
            's' if vowel(i.checked_sub(1)) && vowel(Some(i + 1)) => 'з',
            'y' if rng.random_bool(0.5) => 'й',
            c => primary(c),
        })
        .collect()
}

/// A random consonant-vowel alternation of 4 to 7 letters; `y_rate` is the
/// chance a consonant slot holds `y`.
pub fn toy_name(rng: &mut impl Rng, y_rate: f64) -> String {
    let len = rng.random_range(4..=7);
    let mut consonant = rng.random_bool(0.6);
    let mut out = String::new();
    for _ in 0..len {
        let c = if consonant {
            if rng.random_bool(y_rate) {
                'y'
            } else {
                CONSONANTS[rng.random_range(0..CONSONANTS.len())]
            }
        } else {
            VOWELS[rng.random_range(0..VOWELS.len())]
        };
        out.push(c);
        consonant = !consonant;
    }
    out
}

/// `n` toy names with their spellings, every spelling at plain edit
/// distance at least 3 from every other and from those in `avoid`.
pub fn toy_corpus(
    rng: &mut impl Rng,
    n: usize,
    y_rate: f64,
    avoid: &[(String, String)],
) -> Vec<(String, String)> {
    let plain = PhoneticClassTable::plain();
    let mut out: Vec<(String, String)> = Vec::new();
    let mut guard = 0;
    while out.len() < n {
        guard += 1;
        assert!(guard < 1_000_000, "toy corpus generation stalled");
        let name = toy_name(rng, y_rate);
        let spelled = toy_spell(&name, rng);
        let far = out
            .iter()
            .chain(avoid)
            .all(|(_, t)| plain.distance(t, &spelled) >= 3.0);
        if far {
            out.push((name, spelled));
        }
    }
    out
}

/// Learner test corpus: names spelled by the true table, with some rows
/// removed from the learner's starting table.
pub struct Planted {
    pub true_table: TranslitTable,
    pub initial: TranslitTable,
    pub deleted: Vec<Transition>,
    pub source: NameLexicon,
    pub target: NameLexicon,
    pub model: NgramModel,
    pub pairs: Vec<(String, String)>,
}

pub fn planted(seed: u64, n: usize) -> Planted {
    let mut r = rng(seed);
    let pairs = toy_corpus(&mut r, n, 0.0, &[]);
    let (src, tgt) = (toy_source(), toy_target());
    let counts: Vec<u64> = (0..pairs.len()).map(|_| r.random_range(3..=30)).collect();
    let source = NameLexicon::from_counts(
        &src,
        pairs
            .iter()
            .zip(&counts)
            .map(|((s, _), c)| (s.as_str(), *c)),
    )
    .unwrap();
    let target = NameLexicon::from_counts(
        &tgt,
        pairs
            .iter()
            .zip(&counts)
            .map(|((_, t), c)| (t.as_str(), *c)),
    )
    .unwrap();
    let model = NgramModel::train(&target, &tgt, 3).unwrap();
    let true_table = toy_true_table();
    let deleted: Vec<Transition> = toy_secondary().into_iter().take(3).collect();
    let mut initial = true_table.clone();
    for t in &deleted {
        initial.remove_transition(t).unwrap();
    }
    Planted {
        true_table,
        initial,
        deleted,
        source,
        target,
        model,
        pairs,
    }
}

// ---------------------------------------------------------------------------
// Random small tables over a 3-symbol alphabet.

pub fn abc() -> Script {
    Script::new("abc", "abc".chars(), false).unwrap()
}

pub fn xyz() -> Script {
    Script::new("xyz", "xyz".chars(), false).unwrap()
}

fn random_string(rng: &mut impl Rng, alphabet: &[char], min: usize, max: usize) -> String {
    let len = rng.random_range(min..=max);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// A covering table with 1-2 outputs per symbol (deletions allowed) and a
/// few extra rows of up to 3 symbols, anchored or not.
pub fn random_table(rng: &mut impl Rng) -> TranslitTable {
    let src = ['a', 'b', 'c'];
    let tgt = ['x', 'y', 'z'];
    let mut rows = BTreeSet::new();
    for c in src {
        for _ in 0..rng.random_range(1..=2) {
            rows.insert(Transition::any(
                c.to_string(),
                random_string(rng, &tgt, 0, 2),
            ));
        }
    }
    for _ in 0..rng.random_range(0..=4) {
        let key = random_string(rng, &src, 1, 3);
        let position = [Position::Any, Position::Initial, Position::Final][rng.random_range(0..3)];
        rows.insert(Transition::new(
            key,
            position,
            random_string(rng, &tgt, 0, 2),
        ));
    }
    TranslitTable::from_transitions(&abc(), &xyz(), rows).unwrap()
}

pub fn random_token(rng: &mut impl Rng, max_len: usize) -> String {
    random_string(rng, &['a', 'b', 'c'], 1, max_len)
}

// ---------------------------------------------------------------------------
// Oracles.

/// Every transliteration by direct enumeration: each way of cutting the
/// token into pieces, times each choice of one applicable row output per
/// piece. A row applies to a piece if its key equals the piece and its
/// anchor (if any) agrees with where the piece sits.
pub fn brute_force_generate(table: &TranslitTable, token: &str) -> BTreeSet<String> {
    let symbols: Vec<char> = token.chars().collect();
    let n = symbols.len();
    let mut rows: BTreeMap<(String, Position), Vec<String>> = BTreeMap::new();
    for e in table.entries() {
        rows.insert((e.key.to_string(), e.position), e.outputs.to_vec());
    }
    let mut out = BTreeSet::new();
    // a cut mask over the n-1 gaps between symbols
    for mask in 0u32..(1 << (n - 1)) {
        let mut pieces = Vec::new();
        let mut start = 0;
        for gap in 0..n - 1 {
            if mask & (1 << gap) != 0 {
                pieces.push((start, gap + 1));
                start = gap + 1;
            }
        }
        pieces.push((start, n));
        let choices: Vec<Vec<String>> = pieces
            .iter()
            .map(|&(s, e)| {
                let key: String = symbols[s..e].iter().collect();
                let mut opts = Vec::new();
                for (pos, ok) in [
                    (Position::Any, true),
                    (Position::Initial, s == 0),
                    (Position::Final, e == n),
                ] {
                    if ok {
                        if let Some(o) = rows.get(&(key.clone(), pos)) {
                            opts.extend(o.iter().cloned());
                        }
                    }
                }
                opts
            })
            .collect();
        let mut partial = vec![String::new()];
        for opts in &choices {
            partial = partial
                .iter()
                .flat_map(|p| opts.iter().map(move |o| format!("{p}{o}")))
                .collect();
        }
        out.extend(partial);
    }
    out.remove("");
    out
}

/// Weighted edit distance by the textbook recursion, without memoisation.
pub fn naive_distance(a: &[char], b: &[char], sub: &dyn Fn(char, char) -> f64) -> f64 {
    match (a.split_last(), b.split_last()) {
        (None, _) => b.len() as f64,
        (_, None) => a.len() as f64,
        (Some((x, ra)), Some((y, rb))) => {
            let del = naive_distance(ra, b, sub) + 1.0;
            let ins = naive_distance(a, rb, sub) + 1.0;
            let rep = naive_distance(ra, rb, sub) + sub(*x, *y);
            del.min(ins).min(rep)
        }
    }
}

/// The closest `(distance, count, entry)` over every candidate and entry,
/// scanning the whole lexicon; ties prefer higher counts, then smaller text.
pub fn exhaustive_nearest<'a>(
    candidates: &[String],
    lexicon: &'a NameLexicon,
    classes: &PhoneticClassTable,
) -> Option<(f64, u64, &'a str)> {
    let mut best: Option<(f64, u64, &str)> = None;
    for (entry, count) in lexicon.iter() {
        for c in candidates {
            let ca: Vec<char> = c.chars().collect();
            let eb: Vec<char> = entry.as_str().chars().collect();
            let d = naive_or_dp(&ca, &eb, classes);
            let key = (d, count, entry.as_str());
            best = Some(match best {
                None => key,
                Some(b)
                    if key.0 < b.0
                        || (key.0 == b.0 && (key.1 > b.1 || (key.1 == b.1 && key.2 < b.2))) =>
                {
                    key
                }
                Some(b) => b,
            });
        }
    }
    best
}

/// Naive recursion for short pairs, a plain full-matrix DP otherwise.
fn naive_or_dp(a: &[char], b: &[char], classes: &PhoneticClassTable) -> f64 {
    let sub = |x: char, y: char| classes.substitution_cost(x, y);
    if a.len() + b.len() <= 8 {
        return naive_distance(a, b, &sub);
    }
    let mut m = vec![vec![0.0; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i as f64;
    }
    for (j, cell) in m[0].iter_mut().enumerate() {
        *cell = j as f64;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            m[i][j] = (m[i - 1][j] + 1.0)
                .min(m[i][j - 1] + 1.0)
                .min(m[i - 1][j - 1] + sub(a[i - 1], b[j - 1]));
        }
    }
    m[a.len()][b.len()]
}
