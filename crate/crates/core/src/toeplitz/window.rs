use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::net::OneNet;
use super::sequence::SymbolSequence;
use crate::error::{Error, Result};
use crate::symbolic::{Pattern, Sym};

/// A window `[0, 2^n)` of a Toeplitz configuration: cells on level
/// `j <= n` carry `alpha_j`, the single uncovered cell carries
/// `uncovered_symbol`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzWindow {
    pub net: OneNet,
    pub alpha: SymbolSequence,
    pub uncovered_symbol: Sym,
    pub letters: Vec<Sym>,
}

impl ToeplitzWindow {
    pub fn render(&self) -> String {
        self.alpha.alphabet().format_word(&self.letters)
    }

    /// Number of levels shown: `log2` of the length.
    pub fn depth(&self) -> usize {
        self.letters.len().trailing_zeros() as usize
    }
}

/// `log2(len)` when `len` is a power of two.
pub fn power_of_two_exponent(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

pub fn generate_toeplitz_window(
    alpha: &SymbolSequence,
    net: &OneNet,
    length: usize,
    uncovered_symbol: Sym,
) -> Result<ToeplitzWindow> {
    let n = power_of_two_exponent(length)?;
    if net.depth() < n {
        return Err(Error::InvalidInput(format!(
            "net depth {} below {n}",
            net.depth()
        )));
    }
    let letters = alpha
        .take(n)
        .ok_or_else(|| Error::InvalidInput(format!("sequence prefix shorter than {n}")))?;
    if !alpha.alphabet().contains(uncovered_symbol) {
        return Err(Error::UnknownSymbol(format!("#{uncovered_symbol}")));
    }
    let word = (0..length as i64)
        .map(|i| match net.level_of(i, n) {
            Some(j) => letters[j - 1],
            None => uncovered_symbol,
        })
        .collect();
    Ok(ToeplitzWindow {
        net: net.clone(),
        alpha: alpha.clone(),
        uncovered_symbol,
        letters: word,
    })
}

/// Occurrences of `symbol` divided by the length.
pub fn letter_frequency(word: &[Sym], symbol: Sym) -> Result<BigRational> {
    if word.is_empty() {
        return Err(Error::InvalidInput("frequency of an empty word".into()));
    }
    let count = word.iter().filter(|&&s| s == symbol).count();
    Ok(BigRational::new(
        BigInt::from(count),
        BigInt::from(word.len()),
    ))
}

/// `sum_{j <= n, alpha_j = symbol} 2^-j`.
pub fn frequency_target(alpha: &[Sym], symbol: Sym) -> BigRational {
    let mut total = BigRational::zero();
    let mut weight = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for &a in alpha {
        weight *= &half;
        if a == symbol {
            total += &weight;
        }
    }
    total
}

/// Vertically constant rectangle whose every row is the Toeplitz window.
pub fn build_d_star_window(
    alpha: &SymbolSequence,
    net: &OneNet,
    width: usize,
    height: usize,
    uncovered_symbol: Sym,
) -> Result<Pattern> {
    if height == 0 {
        return Err(Error::InvalidInput("height must be >= 1".into()));
    }
    let row = generate_toeplitz_window(alpha, net, width, uncovered_symbol)?.letters;
    Pattern::from_rows(&vec![row; height])
}
