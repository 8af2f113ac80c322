mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::Rng;

use translit_core::table::{uniform_table, Position};
use translit_core::{data, Script, ScriptRegistry, Transition, TranslitTable};

/// Segmentation count by cut-point subsets: each piece contributes one
/// factor per row whose key and anchor fit it.
fn brute_force_count(table: &TranslitTable, token: &str) -> usize {
    let rows: BTreeSet<(String, Position)> = table
        .entries()
        .map(|e| (e.key.to_string(), e.position))
        .collect();
    let s: Vec<char> = token.chars().collect();
    let n = s.len();
    let mut total = 0;
    for mask in 0u32..(1 << (n - 1)) {
        let mut cuts = vec![0];
        cuts.extend((0..n - 1).filter(|g| mask & (1 << g) != 0).map(|g| g + 1));
        cuts.push(n);
        let mut product = 1;
        for w in cuts.windows(2) {
            let key: String = s[w[0]..w[1]].iter().collect();
            let fits = [
                (Position::Any, true),
                (Position::Initial, w[0] == 0),
                (Position::Final, w[1] == n),
            ]
            .iter()
            .filter(|(p, ok)| *ok && rows.contains(&(key.clone(), *p)))
            .count();
            product *= fits;
        }
        total += product;
    }
    total
}

fn backward() -> TranslitTable {
    TranslitTable::parse(
        data::LATIN_HEBREW_BACKWARD,
        &ScriptRegistry::with_builtins(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn segmentation_count_matches_cut_points(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let table = common::random_table(&mut r);
        for _ in 0..10 {
            let token = common::random_token(&mut r, 6);
            let segs = table.segmentations(&token).unwrap();
            prop_assert!(!segs.truncated);
            prop_assert!(!segs.segmentations.is_empty());
            prop_assert_eq!(segs.segmentations.len(), brute_force_count(&table, &token));
            for seg in &segs.segmentations {
                let joined: String = seg.pieces.iter().map(|p| p.key.as_str()).collect();
                prop_assert_eq!(&joined, &token);
                for p in &seg.pieces {
                    prop_assert!(p.position.admits(p.start, p.end, token.chars().count()));
                }
            }
        }
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let table = common::random_table(&mut common::rng(seed));
        let mut reg = ScriptRegistry::with_builtins();
        reg.register(common::abc());
        reg.register(common::xyz());
        let text = table.to_tsv();
        let back = TranslitTable::parse(&text, &reg).unwrap();
        prop_assert_eq!(&back, &table);
        prop_assert_eq!(back.to_tsv(), text);
    }

    #[test]
    fn add_remove_matches_set_model(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let mut table = common::random_table(&mut r);
        let mut model: BTreeSet<Transition> = table.transitions().into_iter().collect();
        let pool: Vec<Transition> = ["a", "b", "ab", "ca"]
            .iter()
            .flat_map(|k| ["", "x", "zy"].iter().map(move |o| Transition::any(*k, *o)))
            .chain([Transition::new("a", Position::Initial, "y"), Transition::new("bc", Position::Final, "")])
            .collect();
        for _ in 0..10 {
            let t = &pool[r.random_range(0..pool.len())];
            if r.random_bool(0.5) {
                let changed = table.add_transition(t).unwrap();
                prop_assert_eq!(changed, model.insert(t.clone()));
            } else {
                let covering = t.position == Position::Any
                    && t.source.chars().count() == 1
                    && model.iter().filter(|m| m.source == t.source && m.position == Position::Any).count() == 1;
                let result = table.remove_transition(t);
                if model.contains(t) && !covering {
                    prop_assert!(result.is_ok());
                    model.remove(t);
                } else {
                    prop_assert!(result.is_err());
                }
            }
            let now: BTreeSet<Transition> = table.transitions().into_iter().collect();
            prop_assert_eq!(&now, &model);
            for t in &model {
                prop_assert!(table.contains(t));
            }
        }
    }
}

#[test]
fn bundled_rows_parse_as_written() {
    let t = backward();
    assert_eq!(t.outputs("x", Position::Any), ["קס"]);
    assert_eq!(t.outputs("ck", Position::Any), ["ק"]);
    assert_eq!(t.outputs("a", Position::Initial), ["ע", "א"]);
    assert_eq!(t.outputs("e", Position::Final), ["ה"]);
    assert_eq!(t.outputs("a'a", Position::Any), ["ע"]);
    assert!(t.outputs("'", Position::Any).contains(&String::new()));
}

#[test]
fn bundled_tables_cover_their_scripts() {
    let reg = ScriptRegistry::with_builtins();
    let spanish = common::read_fixture("profiles/spanish.tsv");
    for text in [
        data::LATIN_HEBREW_BACKWARD,
        data::LATIN_HEBREW_GENERIC,
        spanish.as_str(),
    ] {
        let t = TranslitTable::parse(text, &reg).unwrap();
        t.check_coverage(&Script::latin()).unwrap();
        assert!(t.max_key_len() <= 3);
        let copy = uniform_table(&t);
        copy.check_coverage(&Script::latin()).unwrap();
        assert_eq!(copy, t);
    }
}

#[test]
fn uniform_copy_is_independent() {
    let base = backward();
    let mut copy = uniform_table(&base);
    copy.add_transition(&Transition::any("q", "כ")).unwrap();
    assert_ne!(copy, base);
    assert_eq!(base, backward());
}

#[test]
fn positional_rows_both_apply_to_a_single_symbol() {
    let (src, tgt) = (
        Script::new("s", "a".chars(), false).unwrap(),
        Script::new("t", "x".chars(), false).unwrap(),
    );
    let t = TranslitTable::from_transitions(
        &src,
        &tgt,
        [
            Transition::any("a", "x"),
            Transition::new("a", Position::Initial, "xx"),
        ],
    )
    .unwrap();
    assert_eq!(t.segmentations("a").unwrap().segmentations.len(), 2);
}

#[test]
fn segmentation_cap_truncates() {
    let (src, tgt) = (
        Script::new("s", "a".chars(), false).unwrap(),
        Script::new("t", "x".chars(), false).unwrap(),
    );
    let rows = (1..=4).map(|n| Transition::any("a".repeat(n), "x"));
    let t = TranslitTable::from_transitions(&src, &tgt, rows).unwrap();
    let capped = t.segmentations_capped(&"a".repeat(20), 100).unwrap();
    assert!(capped.truncated);
    assert_eq!(capped.segmentations.len(), 100);
}

#[test]
fn parse_reports_problems_with_line_numbers() {
    let reg = ScriptRegistry::with_builtins();
    let header = "#!scripts\tlatin\thebrew\n";
    let full: String = ('a'..='z')
        .chain(['\''])
        .map(|c| format!("{c}\tא\n"))
        .collect();
    let ok = format!("{header}{full}");
    TranslitTable::parse(&ok, &reg).unwrap();

    let dup = format!("{ok}a\tב\n");
    let err = TranslitTable::parse(&dup, &reg).unwrap_err().to_string();
    assert!(err.contains("line 29"), "{err}");

    let foreign = format!("{ok}sh\tq\n");
    assert!(TranslitTable::parse(&foreign, &reg).is_err());

    let missing: String = full
        .lines()
        .filter(|l| !l.starts_with('q'))
        .map(|l| format!("{l}\n"))
        .collect();
    let err = TranslitTable::parse(&format!("{header}{missing}"), &reg)
        .unwrap_err()
        .to_string();
    assert!(err.contains('q'), "{err}");
}

#[test]
fn entries_are_grouped_by_key_then_position() {
    let t = backward();
    let mut seen: BTreeMap<(&str, Position), usize> = BTreeMap::new();
    for e in t.entries() {
        assert!(!e.outputs.is_empty());
        *seen.entry((e.key, e.position)).or_default() += 1;
    }
    assert!(seen.values().all(|n| *n == 1));
}
