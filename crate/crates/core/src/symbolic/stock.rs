//! Small reference specs used by tests, fixtures and the CLI.

use super::alphabet::{Alphabet, Sym};
use super::pattern::Pattern;
use super::spec::SftSpec;

/// No forbidden patterns over letters `0..n`.
pub fn full_shift(n: usize, dimension: u8) -> SftSpec {
    SftSpec::new(Alphabet::numeric(n).expect("n >= 1"), dimension, Vec::new())
        .expect("valid")
        .with_name(format!("full-shift-{n}-{dimension}d"))
}

/// A single letter `a`: one configuration.
pub fn single_letter(dimension: u8) -> SftSpec {
    full_shift_named(&["a"], dimension).with_name(format!("single-letter-{dimension}d"))
}

fn full_shift_named(names: &[&str], dimension: u8) -> SftSpec {
    SftSpec::new(
        Alphabet::new(names.iter().copied()).expect("valid"),
        dimension,
        Vec::new(),
    )
    .expect("valid")
}

/// 1D words over a compact alphabet with the listed words forbidden.
pub fn forbid_words(alphabet: &str, words: &[&str]) -> SftSpec {
    let a = Alphabet::from_chars(alphabet).expect("valid alphabet");
    let forbidden = words
        .iter()
        .map(|w| Pattern::word(&a.parse_word(w).expect("word over alphabet")))
        .collect();
    SftSpec::new(a, 1, forbidden).expect("valid")
}

/// Binary words without `11`.
pub fn golden_mean() -> SftSpec {
    forbid_words("01", &["11"]).with_name("golden-mean")
}

/// 2D configurations over `0..n` constant along every column.
pub fn vertically_constant(n: usize) -> SftSpec {
    let mut forbidden = Vec::new();
    for a in 0..n as Sym {
        for b in 0..n as Sym {
            if a != b {
                forbidden.push(Pattern::new(2, [((0, 0), a), ((0, 1), b)]).expect("valid"));
            }
        }
    }
    SftSpec::new(Alphabet::numeric(n).expect("n >= 1"), 2, forbidden)
        .expect("valid")
        .with_name(format!("vertically-constant-{n}"))
}

/// 2D configurations over `0..n` constant along every row.
pub fn horizontally_constant(n: usize) -> SftSpec {
    let mut forbidden = Vec::new();
    for a in 0..n as Sym {
        for b in 0..n as Sym {
            if a != b {
                forbidden.push(Pattern::new(2, [((0, 0), a), ((1, 0), b)]).expect("valid"));
            }
        }
    }
    SftSpec::new(Alphabet::numeric(n).expect("n >= 1"), 2, forbidden)
        .expect("valid")
        .with_name(format!("horizontally-constant-{n}"))
}

/// Space-time diagrams of the rule `(a, b, c) -> a xor c`: the cell at
/// `(1, 1)` must equal the xor of the cells at `(0, 0)` and `(2, 0)`.
pub fn xor_rule() -> SftSpec {
    let mut forbidden = Vec::new();
    for a in 0..2 {
        for c in 0..2 {
            let bad = 1 - (a ^ c);
            forbidden
                .push(Pattern::new(2, [((0, 0), a), ((2, 0), c), ((1, 1), bad)]).expect("valid"));
        }
    }
    SftSpec::new(Alphabet::numeric(2).expect("valid"), 2, forbidden)
        .expect("valid")
        .with_name("xor-rule")
}

/// The two-point orbit of `...1010...`.
pub fn alternating() -> SftSpec {
    forbid_words("01", &["00", "11"]).with_name("alternating")
}

/// 2D spec on `{0, 1}` where only the letter `1` survives.
pub fn only_one_2d() -> SftSpec {
    let forbidden = vec![Pattern::new(2, [((0, 0), 0)]).expect("valid")];
    SftSpec::new(Alphabet::numeric(2).expect("valid"), 2, forbidden)
        .expect("valid")
        .with_name("only-one")
}
