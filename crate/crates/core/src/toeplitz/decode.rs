use serde::Serialize;

use super::window::power_of_two_exponent;
use crate::error::Result;
use crate::symbolic::Sym;

/// Result of decoding a window of length `2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoded {
    /// `n` letters, one per peeled level.
    Word(Vec<Sym>),
    /// At the given 1-based level neither parity class was monochromatic.
    NotToeplitz { level: usize },
}

fn monochromatic(word: &[Sym], parity: usize) -> Option<Sym> {
    let mut it = word.iter().skip(parity).step_by(2);
    let first = *it.next()?;
    it.all(|&s| s == first).then_some(first)
}

/// Peels one level at a time: the level is the even or the odd class of
/// the remaining cells, whichever is monochromatic; when both are, the
/// class holding the first remaining cell (the even class) wins.
pub fn decode_density_prefix(u: &[Sym]) -> Result<Decoded> {
    let n = power_of_two_exponent(u.len())?;
    let mut rest: Vec<Sym> = u.to_vec();
    let mut out = Vec::with_capacity(n);
    for level in 1..=n {
        let (letter, keep) = match (monochromatic(&rest, 0), monochromatic(&rest, 1)) {
            (Some(a), _) => (a, 1),
            (None, Some(b)) => (b, 0),
            (None, None) => return Ok(Decoded::NotToeplitz { level }),
        };
        out.push(letter);
        rest = rest.into_iter().skip(keep).step_by(2).collect();
    }
    Ok(Decoded::Word(out))
}
