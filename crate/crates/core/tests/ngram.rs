mod common;

use proptest::prelude::*;
use rand::Rng;

use translit_core::ngram::Sym;
use translit_core::{InterpolationWeights, NameLexicon, NgramModel, Script};

fn abc_model(tokens: &[(&str, u64)], order: usize) -> NgramModel {
    let lex = NameLexicon::from_counts(&common::abc(), tokens.iter().copied()).unwrap();
    NgramModel::train(&lex, &common::abc(), order).unwrap()
}

#[test]
fn single_token_closed_form() {
    let m = abc_model(&[("ab", 1)], 2);
    let v = m.vocabulary_size() as f64;
    assert_eq!(v, 5.0);
    assert_eq!(
        m.conditional(&[Sym::Char('a')], Sym::Char('b')),
        2.0 / (1.0 + v)
    );
    let uni = abc_model(&[("aa", 1)], 1);
    assert_eq!(uni.raw_conditional(&[], Sym::Char('a')), Some(2.0 / 3.0));
    assert_eq!(uni.raw_conditional(&[], Sym::Char('b')), Some(0.0));
}

#[test]
fn random_tokens_normalize() {
    let mut r = common::rng(7);
    let s = Script::latin();
    let tokens: Vec<(String, u64)> = (0..200)
        .map(|_| {
            let len = r.random_range(1..9);
            (
                (0..len)
                    .map(|_| (b'a' + r.random_range(0..26u8)) as char)
                    .collect(),
                r.random_range(1..5),
            )
        })
        .collect();
    let lex = NameLexicon::from_counts(&s, tokens.iter().map(|(t, c)| (t.as_str(), *c))).unwrap();
    let m = NgramModel::train(&lex, &s, 4).unwrap();
    let vocab = m.vocabulary();
    for k in 1..=4 {
        for ctx in m.contexts(k) {
            let sum: f64 = vocab.iter().map(|v| m.conditional(ctx, *v)).sum();
            assert!((sum - 1.0).abs() <= 1e-9, "{ctx:?}: {sum}");
        }
    }
}

#[test]
fn lower_orders_are_marginals_of_higher_ones() {
    let lex = common::origin_lexicon("arabic", &Script::hebrew());
    let m = NgramModel::train(&lex, &Script::hebrew(), 4).unwrap();
    for k in 2..=4 {
        for ctx in m.contexts(k) {
            // dropping the oldest symbol of a context yields the lower-order context
            let total = m.context_total(ctx);
            assert!(m.context_total(&ctx[1..]) >= total);
        }
        let mut sums = std::collections::HashMap::new();
        for ctx in m.contexts(k) {
            *sums.entry(ctx[1..].to_vec()).or_insert(0) += m.context_total(ctx);
        }
        for (lower, sum) in sums {
            assert_eq!(m.context_total(&lower), sum, "{lower:?}");
        }
    }
}

#[test]
fn degenerate_weights_give_the_unigram_likelihood() {
    let m = abc_model(&[("abc", 2), ("ca", 1)], 3);
    let w = InterpolationWeights::new(vec![1.0, 0.0, 0.0]).unwrap();
    let by_hand: f64 = "cab"
        .chars()
        .map(|c| m.conditional(&[], Sym::Char(c)).ln())
        .sum();
    assert_eq!(m.score("cab", &w).unwrap(), by_hand);
}

#[test]
fn training_data_dominates() {
    let s = Script::latin();
    let lex = NameLexicon::from_counts(&s, [("rafael", 1)]).unwrap();
    let m = NgramModel::train(&lex, &s, 4).unwrap();
    let w = InterpolationWeights::uniform(4);
    assert!(m.score("rafael", &w).unwrap() > m.score("qqqqqq", &w).unwrap());
}

#[test]
fn mixing_beats_unigrams_on_seen_tokens() {
    let m = abc_model(&[("abca", 2), ("bcab", 1)], 4);
    let uniform = InterpolationWeights::uniform(4);
    let unigram = InterpolationWeights::single(4, 1);
    for t in ["abca", "bcab"] {
        assert!(
            m.score(t, &uniform).unwrap() > m.score(t, &unigram).unwrap(),
            "{t}"
        );
    }
}

#[test]
fn model_fit_is_a_mean_of_normalized_scores() {
    let m = abc_model(&[("abca", 2), ("bcab", 1), ("cc", 1)], 3);
    let w = InterpolationWeights::uniform(3);
    let one = m.model_fit(&["abc"], &w).unwrap();
    assert_eq!(one, m.score("abc", &w).unwrap() / 3.0);
    let set = ["abc", "ba", "ccca"];
    let doubled: Vec<&str> = set.iter().chain(set.iter()).copied().collect();
    assert!((m.model_fit(&set, &w).unwrap() - m.model_fit(&doubled, &w).unwrap()).abs() < 1e-12);

    let left = ["a", "bb", "cab"];
    let right = ["ccc", "abab"];
    let union: Vec<&str> = left.iter().chain(right.iter()).copied().collect();
    let combined =
        (3.0 * m.model_fit(&left, &w).unwrap() + 2.0 * m.model_fit(&right, &w).unwrap()) / 5.0;
    assert!((m.model_fit(&union, &w).unwrap() - combined).abs() < 1e-12);
    assert!(m.model_fit::<&str>(&[], &w).is_err());
}

#[test]
fn invalid_inputs() {
    let s = Script::latin();
    assert!(NgramModel::train(&NameLexicon::new("latin"), &s, 4).is_err());
    let lex = NameLexicon::from_counts(&s, [("ab", 1)]).unwrap();
    assert!(NgramModel::train(&lex, &s, 0).is_err());
    assert!(NgramModel::train(&lex, &s, 7).is_err());
    assert!(NgramModel::train(&lex, &Script::hebrew(), 2).is_err());
    let m = NgramModel::train(&lex, &s, 2).unwrap();
    assert!(m.score("", &InterpolationWeights::uniform(2)).is_err());
    assert!(m.score("ab", &InterpolationWeights::uniform(3)).is_err());
    assert!(InterpolationWeights::new(vec![0.5, 0.6]).is_err());
    assert!(InterpolationWeights::new(vec![-0.5, 1.5]).is_err());
}

proptest! {
    #[test]
    fn appending_a_symbol_lowers_the_score(
        tokens in prop::collection::vec(("[abc]{1,6}", 1u64..5), 1..10),
        probe in "[abc]{1,6}",
        extra in prop::sample::select(vec!['a', 'b', 'c']),
        order in 1usize..5,
    ) {
        let lex = NameLexicon::from_counts(&common::abc(), tokens).unwrap();
        let m = NgramModel::train(&lex, &common::abc(), order).unwrap();
        let w = InterpolationWeights::uniform(order);
        let longer = format!("{probe}{extra}");
        prop_assert!(m.score(&longer, &w).unwrap() < m.score(&probe, &w).unwrap());
    }

    #[test]
    fn save_load_preserves_scores(tokens in prop::collection::vec(("[abc]{1,6}", 1u64..5), 1..10), order in 1usize..5) {
        let lex = NameLexicon::from_counts(&common::abc(), tokens).unwrap();
        let m = NgramModel::train(&lex, &common::abc(), order).unwrap();
        let back = NgramModel::from_tsv(&m.to_tsv()).unwrap();
        prop_assert_eq!(&back, &m);
        let w = InterpolationWeights::uniform(order);
        for probe in ["a", "abc", "ccba", "bbbbbb"] {
            prop_assert_eq!(back.score(probe, &w).unwrap().to_bits(), m.score(probe, &w).unwrap().to_bits());
        }
    }
}
