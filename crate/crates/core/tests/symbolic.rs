mod common;

use caentropy::symbolic::{
    apply_projection, check_south_deterministic, count_patterns, count_prefixes_1d,
    count_row_prefixes, directional_counts, enumerate_patterns, product_projection, product_spec,
    shear_diagonal, shear_with, stock, trace_patterns, Alphabet, Direction, LetterProjection,
    Pattern, RectWindow, SftSpec,
};
use common::{arb_spec, brute_count, brute_patterns, fib};
use num_bigint::BigUint;
use proptest::prelude::*;

fn small(spec: &SftSpec, cells: usize) -> bool {
    (spec.alphabet().len() as f64).powi(cells as i32) <= 70_000.0
}

fn count1(spec: &SftSpec, len: u32, margin: usize) -> u64 {
    u64::try_from(count_patterns(spec, &RectWindow::line(len), margin).unwrap()).unwrap()
}

fn count2(spec: &SftSpec, w: u32, h: u32, margin: usize) -> u64 {
    u64::try_from(count_patterns(spec, &RectWindow::rect(w, h), margin).unwrap()).unwrap()
}

fn words(spec: &SftSpec, len: u32, margin: usize) -> Vec<String> {
    enumerate_patterns(spec, &RectWindow::line(len), margin)
        .unwrap()
        .iter()
        .map(|p| p.render(spec.alphabet()))
        .collect()
}

#[test]
fn count_examples() {
    assert_eq!(count1(&stock::full_shift(2, 1), 3, 0), 8);
    assert_eq!(count1(&stock::golden_mean(), 3, 0), 5);
    assert_eq!(count2(&stock::only_one_2d(), 2, 2, 0), 1);
}

#[test]
fn golden_mean_matches_brute_force_at_length_three() {
    assert_eq!(
        count1(&stock::golden_mean(), 3, 0) as usize,
        brute_count(&stock::golden_mean(), 3, 1, 0)
    );
}

#[test]
fn enumerate_examples() {
    assert_eq!(words(&stock::single_letter(1), 2, 0), vec!["aa"]);
    assert_eq!(words(&stock::golden_mean(), 2, 0), vec!["00", "01", "10"]);
    assert_eq!(
        words(&stock::golden_mean(), 3, 2),
        words(&stock::golden_mean(), 3, 0)
    );
    assert_eq!(words(&stock::golden_mean(), 3, 0).len(), 5);
}

#[test]
fn margin_removes_non_extendable_words() {
    // Over {0,1} forbid 01 and 11 except at the right end: "x1" needs a
    // successor, and both successors are forbidden.
    let spec = stock::forbid_words("01", &["10", "11"]);
    assert_eq!(words(&spec, 2, 0), vec!["00", "01"]);
    assert_eq!(words(&spec, 2, 1), vec!["00"]);
    assert_eq!(count1(&spec, 2, 1), 1);
}

#[test]
fn product_examples() {
    let p = product_spec(&stock::full_shift(2, 1), &stock::full_shift(3, 1)).unwrap();
    assert_eq!(count1(&p, 1, 0), 6);
    let g = product_spec(&stock::golden_mean(), &stock::full_shift(2, 1)).unwrap();
    assert_eq!(count1(&g, 3, 0), 40);
    let one = product_spec(&stock::golden_mean(), &stock::single_letter(1)).unwrap();
    for len in 1..8 {
        assert_eq!(count1(&one, len, 0), count1(&stock::golden_mean(), len, 0));
    }
}

#[test]
fn projection_examples() {
    let ab = Alphabet::from_chars("ab").unwrap();
    let zero = Alphabet::from_chars("0").unwrap();
    let p = LetterProjection::from_pairs(ab, zero, &[("a", "0"), ("b", "0")]).unwrap();
    assert_eq!(
        apply_projection(&p, &Pattern::word(&[0, 1]))
            .unwrap()
            .as_word(),
        vec![0, 0]
    );
}

#[test]
fn trace_examples() {
    let full = stock::full_shift(2, 2);
    assert_eq!(
        trace_patterns(&full, Direction::E2, 2, 2, 0).unwrap(),
        BigUint::from(16u32)
    );
    assert_eq!(
        trace_patterns(&stock::vertically_constant(2), Direction::E2, 1, 4, 0).unwrap(),
        BigUint::from(2u32)
    );
    assert_eq!(
        trace_patterns(&stock::horizontally_constant(2), Direction::E2, 2, 1, 0).unwrap(),
        BigUint::from(2u32)
    );
    assert_eq!(
        trace_patterns(&stock::horizontally_constant(2), Direction::E1, 1, 4, 0).unwrap(),
        BigUint::from(2u32)
    );
    assert!(trace_patterns(&stock::golden_mean(), Direction::E1, 1, 1, 0).is_err());
}

#[test]
fn directional_examples() {
    assert_eq!(
        directional_counts(&stock::full_shift(2, 2), 2, 3, 0).unwrap(),
        BigUint::from(64u32)
    );
    assert_eq!(
        directional_counts(&stock::vertically_constant(2), 3, 5, 0).unwrap(),
        BigUint::from(8u32)
    );
    let a = stock::vertically_constant(2);
    let b = stock::xor_rule();
    let p = product_spec(&a, &b).unwrap();
    for k in 1..=3 {
        for r in 1..=3 {
            let lhs = directional_counts(&p, k, r, 0).unwrap();
            let rhs =
                directional_counts(&a, k, r, 0).unwrap() * directional_counts(&b, k, r, 0).unwrap();
            assert_eq!(lhs, rhs, "k={k} r={r}");
        }
    }
}

#[test]
fn row_prefix_counts_agree_with_single_counts() {
    let x = stock::xor_rule();
    let prefixes = count_row_prefixes(&x, 3, 4).unwrap();
    for r in 1..=4 {
        assert_eq!(prefixes[r - 1], directional_counts(&x, 3, r, 0).unwrap());
    }
}

#[test]
fn xor_counts_match_brute_force() {
    let x = stock::xor_rule();
    for (w, h) in [(3, 2), (3, 3), (4, 2), (2, 4)] {
        for m in 0..=1 {
            if (w + 2 * m) * (h + 2 * m) <= 20 {
                assert_eq!(
                    count2(&x, w as u32, h as u32, m) as usize,
                    brute_count(&x, w, h, m)
                );
            }
        }
    }
}

#[test]
fn determinism_examples() {
    let xor = check_south_deterministic(&stock::xor_rule(), 2, 1, 100_000).unwrap();
    assert!(xor.deterministic);
    assert_eq!(xor.windows_checked, 32);
    let full = check_south_deterministic(&stock::full_shift(2, 2), 2, 1, 100_000).unwrap();
    assert!(!full.deterministic);
    let ce = full.counterexample.unwrap();
    assert_ne!(ce.first_top[1], ce.second_top[1]);
    assert!(
        check_south_deterministic(&stock::single_letter(2), 2, 1, 10)
            .unwrap()
            .deterministic
    );
    assert!(matches!(
        check_south_deterministic(&stock::full_shift(2, 2), 3, 2, 100),
        Err(caentropy::Error::Budget(_))
    ));
}

#[test]
fn shear_examples() {
    let single = stock::single_letter(2);
    assert_eq!(
        shear_diagonal(&single).unwrap().forbidden(),
        single.forbidden()
    );

    let v = stock::vertically_constant(2);
    let sv = shear_diagonal(&v).unwrap();
    for r in 1..=5 {
        assert_eq!(
            directional_counts(&sv, 1, r, 0).unwrap(),
            directional_counts(&v, 1, r, 0).unwrap()
        );
    }

    let x = stock::xor_rule();
    let back = shear_with(&shear_diagonal(&x).unwrap(), 1).unwrap();
    for (w, h) in [(3, 3), (4, 3), (5, 2)] {
        assert_eq!(count2(&back, w, h, 0), count2(&x, w, h, 0));
    }
}

#[test]
fn shear_transports_patterns() {
    // A horizontal domino becomes a north-west to south-east diagonal.
    let h = stock::horizontally_constant(2);
    let s = shear_diagonal(&h).unwrap();
    let cells: Vec<_> = s.forbidden()[0].cells().iter().map(|c| c.0).collect();
    assert_eq!(cells, vec![(1, 0), (0, 1)]);
}

#[test]
fn golden_mean_is_fibonacci() {
    let counts = count_prefixes_1d(&stock::golden_mean(), 24).unwrap();
    for r in 1..=24 {
        let expected = fib(r + 2);
        assert_eq!(counts[r - 1], BigUint::from(expected), "r={r}");
        if r <= 12 {
            assert_eq!(
                brute_count(&stock::golden_mean(), r, 1, 0) as u128,
                expected
            );
        }
    }
}

#[test]
fn counts_switch_to_big_integers() {
    let c = count_patterns(&stock::full_shift(2, 2), &RectWindow::rect(10, 10), 0).unwrap();
    assert_eq!(c, BigUint::from(1u8) << 100usize);
    let c = count_patterns(&stock::full_shift(3, 1), &RectWindow::line(50), 2).unwrap();
    assert_eq!(c, BigUint::from(3u8).pow(50));
}

#[test]
fn projection_soundness_for_a_letter_factor() {
    // Golden mean times a free bit, projected onto the first layer.
    let g = stock::golden_mean();
    let bit = stock::full_shift(2, 1);
    let p = product_spec(&g, &bit).unwrap();
    let pi = product_projection(&g, &bit, 0).unwrap();
    for len in 1..=6 {
        for pat in enumerate_patterns(&p, &RectWindow::line(len), 0).unwrap() {
            let img = apply_projection(&pi, &pat).unwrap();
            assert!(g.avoids_forbidden(&img));
        }
    }
}

#[test]
fn window_dimension_must_match() {
    assert!(count_patterns(&stock::golden_mean(), &RectWindow::rect(2, 2), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_match_brute_force_1d(spec in arb_spec(1), len in 1usize..=6, margin in 0usize..=2) {
        let fast = count1(&spec, len as u32, margin) as usize;
        prop_assert_eq!(fast, brute_count(&spec, len, 1, margin));
    }

    #[test]
    fn counts_match_brute_force_2d(spec in arb_spec(2), w in 1usize..=3, h in 1usize..=3, margin in 0usize..=1) {
        prop_assume!(small(&spec, (w + 2 * margin) * (h + 2 * margin)));
        let fast = count2(&spec, w as u32, h as u32, margin) as usize;
        prop_assert_eq!(fast, brute_count(&spec, w, h, margin));
    }

    #[test]
    fn enumeration_matches_count_and_oracle(spec in arb_spec(2), w in 1usize..=3, h in 1usize..=2, margin in 0usize..=1) {
        prop_assume!(small(&spec, (w + 2 * margin) * (h + 2 * margin)));
        let pats = enumerate_patterns(&spec, &RectWindow::rect(w as u32, h as u32), margin).unwrap();
        prop_assert_eq!(pats.len() as u64, count2(&spec, w as u32, h as u32, margin));
        let got: std::collections::BTreeSet<_> = pats.iter().map(|p| p.symbols().collect::<Vec<_>>()).collect();
        prop_assert_eq!(got, brute_patterns(&spec, w, h, margin));
    }

    #[test]
    fn larger_margin_never_increases(spec in arb_spec(1), len in 1u32..=8, m in 0usize..=3) {
        prop_assert!(count1(&spec, len, m + 1) <= count1(&spec, len, m));
    }

    #[test]
    fn larger_margin_never_increases_2d(spec in arb_spec(2), w in 1u32..=3, h in 1u32..=3) {
        prop_assert!(count2(&spec, w, h, 1) <= count2(&spec, w, h, 0));
    }

    #[test]
    fn one_dimensional_counts_are_submultiplicative(spec in arb_spec(1), m in 1usize..=6, n in 1usize..=6) {
        let c = count_prefixes_1d(&spec, m + n).unwrap();
        prop_assert!(c[m + n - 1] <= &c[m - 1] * &c[n - 1]);
    }

    #[test]
    fn product_law(a in arb_spec(1), b in arb_spec(1), len in 1u32..=6) {
        let p = product_spec(&a, &b).unwrap();
        prop_assert_eq!(count1(&p, len, 0), count1(&a, len, 0) * count1(&b, len, 0));
    }

    #[test]
    fn product_law_2d(a in arb_spec(2), b in arb_spec(2), w in 1u32..=3, h in 1u32..=2) {
        let p = product_spec(&a, &b).unwrap();
        prop_assert_eq!(count2(&p, w, h, 0), count2(&a, w, h, 0) * count2(&b, w, h, 0));
    }

    #[test]
    fn json_round_trip(spec in arb_spec(2)) {
        prop_assert_eq!(SftSpec::from_json(&spec.to_json().unwrap()).unwrap(), spec);
    }
}
