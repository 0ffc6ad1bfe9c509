//! Number streams, entropy estimation, the block-simulation counting bound
//! and slice-stack classification.

mod numbers;
mod series;
mod simulation;
mod slices;

pub use numbers::{
    format_rational, parse_rational, rational_text, sigma2_sup, Pi1Stream, Sigma2Stream, Sigma2Sup,
};
pub use series::{
    big_text, count_grid, directional_entropy_series, entropy_series, extrapolate, log2_big,
    series_tsv, CountGrid, DirectionalReport, DirectionalRow, EntropyReport, Extrapolation, Sample,
    SeriesDirection, MAX_SERIES_SIDE,
};
pub use simulation::{
    block_substitution, verify_block_substitution, verify_simulation_bound, BoundCell,
    SimulationReport,
};
pub use slices::{verify_slice_stack, SliceForm};
