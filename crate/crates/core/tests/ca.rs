mod common;

use std::collections::BTreeSet;

use caentropy::ca::{
    ca_column_count, ca_from_sft, identity_rule, shift_rule, space_time_pgm, split_construction,
    split_count_identity, split_rule, xor_ca, CaRule, RowMode, UNDEFINED,
};
use caentropy::symbolic::{
    count_patterns, enumerate_patterns, stock, Alphabet, Pattern, RectWindow, SftSpec, Sym,
};
use common::arb_spec;
use num_bigint::BigUint;
use proptest::prelude::*;

const BUDGET: u64 = 1 << 24;

fn bits() -> Alphabet {
    Alphabet::numeric(2).unwrap()
}

#[test]
fn space_time_examples() {
    let id = identity_rule(bits());
    let st = id
        .space_time(&[0, 1, 1, 0, 1], 4, RowMode::Shrinking)
        .unwrap();
    assert!(st.rows.iter().all(|r| r == &st.rows[0]));

    let xor = xor_ca();
    let st = xor
        .space_time(&[0, 0, 0, 0, 1, 0, 0, 0], 4, RowMode::Periodic)
        .unwrap();
    let expected = [
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0, 1, 0],
        [0, 1, 0, 1, 0, 1, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 0],
    ];
    for (row, want) in st.rows.iter().zip(expected) {
        assert_eq!(row.as_slice(), want.as_slice());
    }

    let rule = ca_from_sft(&stock::xor_rule(), 1).unwrap();
    let u = rule.undefined().unwrap();
    let mut init = vec![0; 11];
    init[5] = u;
    let st = rule.space_time(&init, 3, RowMode::Periodic).unwrap();
    for (t, row) in st.rows.iter().enumerate() {
        let cone: Vec<usize> = (0..11).filter(|&x| row[x] == u).collect();
        assert_eq!(cone, (5 - t..=5 + t).collect::<Vec<_>>());
    }
    assert!(xor.space_time(&[0, 1, 0], 2, RowMode::Shrinking).is_err());
    assert!(space_time_pgm(&st, 3).unwrap().starts_with(b"P5"));
}

/// Independent oracle: distinct central columns of the xor automaton.
fn xor_columns(steps: usize) -> usize {
    let width = 1 + 2 * steps;
    let mut seen = BTreeSet::new();
    for code in 0..1u32 << width {
        let mut row: Vec<u8> = (0..width).map(|i| (code >> i & 1) as u8).collect();
        let mut column = vec![row[steps]];
        for t in 1..=steps {
            row = (0..row.len() - 2).map(|i| row[i] ^ row[i + 2]).collect();
            column.push(row[steps - t]);
        }
        seen.insert(column);
    }
    seen.len()
}

#[test]
fn column_count_examples() {
    let count = |rule: &CaRule, k, t| ca_column_count(rule, k, t, BUDGET).unwrap();
    let shift = count(&shift_rule(bits()), 1, 3);
    assert_eq!(shift.count, BigUint::from(16u32));
    assert!(shift.complete);
    assert_eq!(
        count(&identity_rule(bits()), 1, 3).count,
        BigUint::from(2u32)
    );
    assert_eq!(xor_columns(2), 8);
    assert_eq!(count(&xor_ca(), 1, 2).count, BigUint::from(8u32));
    assert_eq!(
        count(&xor_ca(), 1, 4).count,
        BigUint::from(xor_columns(4) as u32)
    );
    let partial = ca_column_count(&shift_rule(bits()), 2, 6, 100).unwrap();
    assert!(!partial.complete);
    assert_eq!(partial.words_examined, 100);
}

#[test]
fn split_examples() {
    let alternating = stock::alternating();
    let w2 = RectWindow::line(2);
    let split = split_construction(&alternating, &[0, 1]).unwrap();
    // Windows 01 and 10 each carry one free bit.
    assert_eq!(
        count_patterns(&split.spec, &w2, 0).unwrap(),
        BigUint::from(4u32)
    );
    let flat = split_construction(&stock::golden_mean(), &[0, 0]).unwrap();
    for n in 1..=6 {
        let w = RectWindow::line(n);
        assert_eq!(
            count_patterns(&flat.spec, &w, 0).unwrap(),
            count_patterns(&stock::golden_mean(), &w, 0).unwrap()
        );
    }
    let full = split_construction(&stock::full_shift(2, 1), &[0, 1]).unwrap();
    for n in 1..=6u32 {
        assert_eq!(
            count_patterns(&full.spec, &RectWindow::line(n), 0).unwrap(),
            BigUint::from(3u32.pow(n))
        );
    }
    assert!(split_construction(&alternating, &[0, 2]).is_err());

    let id = |spec: &SftSpec, n| {
        split_count_identity(spec, &[0, 1], &RectWindow::line(n), 1 << 20).unwrap()
    };
    let full2 = id(&stock::full_shift(2, 1), 2);
    assert_eq!(
        (full2.left.clone(), full2.right.clone()),
        (BigUint::from(9u32), BigUint::from(9u32))
    );
    let zeros = id(&stock::forbid_words("01", &["1"]), 5);
    assert_eq!(zeros.left, BigUint::from(1u32));
    assert!(zeros.holds);
    let golden = id(&stock::golden_mean(), 3);
    assert_eq!(golden.right, BigUint::from(11u32));
    assert!(golden.holds);
}

#[test]
fn split_rule_runs_the_rule_and_the_shift() {
    let rule = split_rule(&xor_ca(), &[0, 1]).unwrap();
    let a = rule.alphabet();
    let row: Vec<Sym> = ["1.1", "0.0", "1.0", "1.1", "0.0"]
        .iter()
        .map(|s| a.sym(s).unwrap())
        .collect();
    let next = rule.step(&row, RowMode::Periodic).unwrap().cells;
    let names: Vec<&str> = next.iter().map(|&s| a.name(s)).collect();
    // Base: xor of the neighbours; bit: the right neighbour's, kept where the base is 1.
    assert_eq!(names, ["0.0", "0.0", "1.1", "1.0", "0.0"]);
    let with_undefined =
        split_rule(&ca_from_sft(&stock::xor_rule(), 1).unwrap(), &[0, 1, 0]).unwrap();
    assert_eq!(
        with_undefined.undefined(),
        with_undefined.alphabet().index(UNDEFINED)
    );
}

fn rule_strategy() -> impl Strategy<Value = CaRule> {
    (2usize..=3, 0usize..=1).prop_flat_map(|(n, r)| {
        let len = n.pow(2 * r as u32 + 1);
        proptest::collection::vec(0..n as Sym, len).prop_map(move |table| {
            CaRule::new("random", Alphabet::numeric(n).unwrap(), r, table).unwrap()
        })
    })
}

/// Space-time spec of `rule`: the cell above the middle of every context
/// must be the image of the context.
fn space_time_spec(rule: &CaRule) -> SftSpec {
    let n = rule.alphabet().len();
    let r = rule.radius();
    let w = 2 * r + 1;
    let mut forbidden = Vec::new();
    for i in 0..n.pow(w as u32) {
        let nb: Vec<Sym> = (0..w)
            .map(|j| ((i / n.pow((w - 1 - j) as u32)) % n) as Sym)
            .collect();
        let image = rule.apply(&nb);
        for top in (0..n as Sym).filter(|&s| s != image) {
            let cells = nb
                .iter()
                .enumerate()
                .map(|(x, &s)| ((x as i32, 0), s))
                .chain([((r as i32, 1), top)]);
            forbidden.push(Pattern::new(2, cells).unwrap());
        }
    }
    SftSpec::new(rule.alphabet().clone(), 2, forbidden).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_commutes_with_the_shift(rule in rule_strategy(), row in proptest::collection::vec(0 as Sym..2, 1..12), by in 0usize..12) {
        let rot = |v: &[Sym]| { let mut v = v.to_vec(); let k = by % v.len(); v.rotate_left(k); v };
        let a = rule.step(&rot(&row), RowMode::Periodic).unwrap().cells;
        let b = rot(&rule.step(&row, RowMode::Periodic).unwrap().cells);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn undefined_is_absorbing(cells in proptest::collection::vec(0 as Sym..3, 5..12), steps in 1usize..5) {
        let rule = ca_from_sft(&stock::xor_rule(), 1).unwrap();
        let st = rule.space_time(&cells, steps, RowMode::Periodic).unwrap();
        for t in 1..st.rows.len() {
            for x in 0..cells.len() {
                if st.rows[t - 1][x] == 2 {
                    prop_assert_eq!(st.rows[t][x], 2);
                }
            }
        }
    }

    #[test]
    fn row_maps_reproduce_every_strip(rule in rule_strategy()) {
        let spec = space_time_spec(&rule);
        let derived = ca_from_sft(&spec, rule.radius()).unwrap();
        let r = rule.radius();
        let width = 2 * r + 3;
        for p in enumerate_patterns(&spec, &RectWindow::rect(width as u32, 2), 0).unwrap() {
            let rows = p.rows();
            let stepped = derived.step(&rows[0], RowMode::Shrinking).unwrap().cells;
            prop_assert_eq!(&stepped[..], &rows[1][r..width - r]);
        }
    }

    #[test]
    fn column_counts_grow_monotonically(rule in rule_strategy()) {
        prop_assume!(rule.radius() == 1 || rule.alphabet().len() == 2);
        let c = |k, t| ca_column_count(&rule, k, t, BUDGET).unwrap().count;
        for t in 0..3 {
            prop_assert!(c(1, t) <= c(1, t + 1));
            prop_assert!(c(1, t) <= c(2, t));
        }
        prop_assert!(c(1, 3) <= c(1, 1) * c(1, 2));
        prop_assert!(c(1, 2) <= c(1, 1) * c(1, 1));
    }

    #[test]
    fn split_identity_holds(spec in arb_spec(1), mask in proptest::collection::vec(0u8..2, 3), n in 1u32..=8) {
        let projection = &mask[..spec.alphabet().len()];
        let id = split_count_identity(&spec, projection, &RectWindow::line(n), 1 << 20).unwrap();
        prop_assert!(id.holds, "{} vs {}", id.left, id.right);
    }
}
