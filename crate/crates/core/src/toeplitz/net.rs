use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest supported level.
pub const MAX_DEPTH: usize = 62;

/// A 1-net: level `j` (1-based) is the residue class `k_j + 2^j Z`, and the
/// levels are pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct OneNet {
    offsets: Vec<u64>,
}

impl OneNet {
    pub fn new(offsets: Vec<u64>) -> Result<Self> {
        if offsets.len() > MAX_DEPTH {
            return Err(Error::InvalidInput(format!("net depth above {MAX_DEPTH}")));
        }
        let offsets: Vec<u64> = offsets
            .iter()
            .enumerate()
            .map(|(i, &k)| k % (1u64 << (i + 1)))
            .collect();
        for m in 0..offsets.len() {
            for j in 0..m {
                if offsets[m] % (1u64 << (j + 1)) == offsets[j] {
                    return Err(Error::InvalidInput(format!(
                        "levels {} and {} intersect",
                        j + 1,
                        m + 1
                    )));
                }
            }
        }
        Ok(OneNet { offsets })
    }

    pub fn depth(&self) -> usize {
        self.offsets.len()
    }

    /// `k_1, ..., k_n` with `k_j < 2^j`.
    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    /// The level (1-based) containing `cell`, among the first `depth` levels.
    pub fn level_of(&self, cell: i64, depth: usize) -> Option<usize> {
        (0..depth.min(self.depth()))
            .find(|&j| cell.rem_euclid(1i64 << (j + 1)) as u64 == self.offsets[j])
            .map(|j| j + 1)
    }

    /// Residue modulo `2^n` of the cells not covered by levels `1..=n`.
    pub fn hole(&self, n: usize) -> u64 {
        let mut hole = 0u64;
        for j in 0..n.min(self.depth()) {
            let half = 1u64 << j;
            hole = if self.offsets[j] == hole {
                hole + half
            } else {
                hole
            };
        }
        hole
    }

    /// Sub-sampled net: the levels seen by the cells `i * step` for odd `step`.
    pub fn subsample(&self, step: u64) -> Result<OneNet> {
        if step % 2 == 0 {
            return Err(Error::InvalidInput("sub-sampling step must be odd".into()));
        }
        let offsets = self
            .offsets
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let modulus = 1u128 << (j + 1);
                let inv = mod_inverse_pow2(step as u128 % modulus, modulus);
                ((k as u128 * inv) % modulus) as u64
            })
            .collect();
        OneNet::new(offsets)
    }
}

fn mod_inverse_pow2(a: u128, modulus: u128) -> u128 {
    // Newton iteration for the inverse of an odd number modulo 2^j.
    let mut x: u128 = 1;
    for _ in 0..7 {
        x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
    }
    x % modulus
}

impl TryFrom<Vec<u64>> for OneNet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        OneNet::new(v)
    }
}

impl From<OneNet> for Vec<u64> {
    fn from(n: OneNet) -> Self {
        n.offsets
    }
}

/// Deterministic net from binary choices: level `j` takes one of the two
/// residue classes modulo `2^j` inside the cells left uncovered by levels
/// `1..j`; choice `0` keeps the lower residue, `1` the upper one.
pub fn build_one_net(choices: &[u8]) -> Result<OneNet> {
    if choices.is_empty() {
        return Err(Error::InvalidInput(
            "at least one choice is required".into(),
        ));
    }
    let mut hole = 0u64;
    let mut offsets = Vec::with_capacity(choices.len());
    for (j, &c) in choices.iter().enumerate() {
        let half = 1u64 << j;
        let (k, rest) = match c {
            0 => (hole, hole + half),
            1 => (hole + half, hole),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "choice must be 0 or 1, got {c}"
                )))
            }
        };
        offsets.push(k);
        hole = rest;
    }
    OneNet::new(offsets)
}

/// A 2-net: level `n` is `I_n x J_n` for two 1-nets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoNet {
    pub horizontal: OneNet,
    pub vertical: OneNet,
}

impl TwoNet {
    pub fn level_of(&self, (x, y): (i64, i64), depth: usize) -> Option<usize> {
        let a = self.horizontal.level_of(x, depth)?;
        (self.vertical.level_of(y, depth) == Some(a)).then_some(a)
    }
}
