mod common;

use common::{brute_force_alignment, brute_force_pnls, canonical_strings, exhaustive_pnls_check, relabelings};
use proptest::prelude::*;
use scoresynth::eval::pnls::{partial_alignment, pnls, pnls_raw};

fn all_strings(max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in ['a', 'b', 'c'] {
                let mut t: Vec<char> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn dp_matches_enumeration_on_every_small_pair() {
    let strings = all_strings(6);
    for gt in strings.iter().filter(|s| !s.is_empty() && s.len() <= 4) {
        for pred in &strings {
            assert_eq!(
                partial_alignment(gt, pred),
                brute_force_alignment(gt, pred),
                "gt={gt:?} pred={pred:?}"
            );
        }
    }
}

#[test]
fn relabeling_does_not_change_alignment() {
    let preds = all_strings(5);
    for gt in canonical_strings(4) {
        for perm in relabelings() {
            let map = |c: char| ['a', 'b', 'c'][perm[(c as u8 - b'a') as usize] as usize];
            let gt: Vec<char> = gt.iter().map(|&c| (b'a' + c) as char).collect();
            let gt2: Vec<char> = gt.iter().copied().map(map).collect();
            for pred in &preds {
                let pred2: Vec<char> = pred.iter().copied().map(map).collect();
                assert_eq!(partial_alignment(&gt, pred), partial_alignment(&gt2, &pred2));
            }
        }
    }
}

#[test]
fn canonical_ground_truths_are_counted_by_stirling_numbers() {
    // Strings of length n over 3 letters up to relabeling: sum of S(n, k), k <= 3.
    let expected_by_len = |n: u32| -> usize {
        let s2 = 2usize.pow(n - 1) - 1;
        let s3 = (3usize.pow(n) + 3 - 3 * 2usize.pow(n)) / 6;
        1 + s2 + s3
    };
    let strings = canonical_strings(8);
    for n in 1..=8u32 {
        let got = strings.iter().filter(|s| s.len() == n as usize).count();
        assert_eq!(got, expected_by_len(n), "length {n}");
    }
}

#[test]
fn exhaustive_small_alphabet() {
    let out = exhaustive_pnls_check(5, 8);
    let preds: u64 = (0..=8).map(|l| 3u64.pow(l)).sum();
    assert_eq!(out.pairs, canonical_strings(5).len() as u64 * preds);
    assert_eq!(out.mismatches, 0, "{:?}", out.first_mismatch);
}

#[test]
fn fixed_cases() {
    assert_eq!(pnls("abc", "abc").unwrap(), 1.0);
    assert_eq!(pnls("abc", "zzabczz").unwrap(), 1.0);
    assert_eq!(pnls("  ABC ", "abc").unwrap(), 1.0);
    let s = pnls_raw("abcd", "abxd").unwrap();
    assert!((s - 0.75).abs() < 1e-12);
    assert_eq!(pnls_raw("ab", "").unwrap(), 0.0);
    assert!(pnls("", "x").is_err());
    assert!(pnls("   ", "x").is_err());
}

fn text() -> impl Strategy<Value = String> {
    "[a-e]{0,16}"
}

fn nonempty() -> impl Strategy<Value = String> {
    "[a-e]{1,12}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn identity_scores_one(gt in nonempty()) {
        prop_assert_eq!(pnls(&gt, &gt).unwrap(), 1.0);
    }

    #[test]
    fn containment_scores_one(gt in nonempty(), pre in text(), post in text()) {
        let pred = format!("{pre}{gt}{post}");
        prop_assert_eq!(pnls(&gt, &pred).unwrap(), 1.0);
    }

    #[test]
    fn score_in_unit_interval_and_matches_oracle(gt in nonempty(), pred in text()) {
        let s = pnls_raw(&gt, &pred).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, brute_force_pnls(&gt, &pred));
    }

    #[test]
    fn one_substitution_costs_one_over_len(gt in "[a-e]{2,12}", pos in any::<prop::sample::Index>(), shift in 1u8..5) {
        let mut chars: Vec<char> = gt.chars().collect();
        let i = pos.index(chars.len());
        chars[i] = (b'a' + (chars[i] as u8 - b'a' + shift) % 5) as char;
        let pred: String = chars.iter().collect();
        let expected = 1.0 - 1.0 / gt.len() as f64;
        prop_assert_eq!(brute_force_pnls(&gt, &pred), expected);
        prop_assert_eq!(pnls_raw(&gt, &pred).unwrap(), expected);
    }

    #[test]
    fn only_case_and_outer_whitespace_are_normalized(gt in "[a-eA-E]{1,8}", pad in "[ \t]{0,3}") {
        let padded = format!("{pad}{}{pad}", gt.to_uppercase());
        prop_assert_eq!(pnls(&gt, &padded).unwrap(), 1.0);
    }
}
