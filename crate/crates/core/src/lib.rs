//! Workbench for entropies of subshifts and cellular automata: exact
//! pattern counting for SFTs, Toeplitz density codes, Robinson tilings,
//! cellular automata with an undefined-extension symbol, number streams
//! for right-computable reals, and a desk-scale macrotile simulator.

pub mod ca;
pub mod entropy;
pub mod error;
pub mod macrotile;
pub mod robinson;
pub mod symbolic;
pub mod toeplitz;

pub use error::{Error, Result};
