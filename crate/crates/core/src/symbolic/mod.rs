//! Alphabets, patterns, SFT specs and exact pattern counting.

pub mod alphabet;
pub mod count;
pub mod determinism;
pub(crate) mod domino;
pub mod pattern;
pub mod spec;
pub mod stock;

pub use alphabet::{Alphabet, Sym};
pub use count::{
    count_patterns, count_prefixes_1d, count_row_prefixes, directional_counts, enumerate_patterns,
    enumerate_patterns_limited, trace_patterns, Direction,
};
pub use determinism::{check_south_deterministic, DeterminismReport};
pub use pattern::{Cell, Pattern, RectWindow};
pub use spec::{
    apply_projection, product_projection, product_spec, shear_diagonal, shear_with,
    LetterProjection, SftSpec, SpecDocument,
};
