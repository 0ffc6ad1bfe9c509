use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::toeplitz::{
    s_membership_check, s_prime_check, DensityMachine, SPrimeVerdict, SVerdict, SWord,
};

/// Classification of a vertical stack of slice prefixes (bottom first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum SliceForm {
    /// Every slice is all stars.
    A,
    /// Stars, then counters `0, 1, ...` of width `k` starting at index `m`,
    /// then end markers. `m` is known once some counter is fully visible;
    /// `k` once some counter slice is visible at all.
    B { m: Option<i64>, k: Option<usize> },
    /// Every slice is all end markers.
    C,
    /// The pair `(index - 1, index)` (or the single slice `index`) is rejected.
    Violation {
        index: usize,
        position: usize,
        reason: String,
    },
}

/// Checks every adjacent pair of the stack against the pair checker and
/// classifies the stack. Two consecutive end-marker slices are accepted
/// although no pair clause covers them: they make up the all-`#` form and
/// the tail of the counter ramp.
pub fn verify_slice_stack(
    stack: &[SWord],
    family: &[DensityMachine],
    budget: usize,
) -> Result<SliceForm> {
    let first = stack
        .first()
        .ok_or_else(|| Error::InvalidInput("empty slice stack".into()))?;
    if let SVerdict::Rejected { position, reason } = s_membership_check(first, family, budget)? {
        return Ok(SliceForm::Violation {
            index: 0,
            position,
            reason,
        });
    }
    for (i, pair) in stack.windows(2).enumerate() {
        let (z, zp) = (&pair[0], &pair[1]);
        if z.looks_like_sharps() && zp.looks_like_sharps() {
            if let SVerdict::Rejected { position, reason } = s_membership_check(zp, family, budget)?
            {
                return Ok(SliceForm::Violation {
                    index: i + 1,
                    position,
                    reason,
                });
            }
            continue;
        }
        if let SPrimeVerdict::Rejected { position, reason } = s_prime_check(z, zp, family, budget)?
        {
            return Ok(SliceForm::Violation {
                index: i + 1,
                position,
                reason,
            });
        }
    }
    if stack.iter().all(SWord::looks_like_stars) {
        return Ok(SliceForm::A);
    }
    if stack.iter().all(SWord::looks_like_sharps) {
        return Ok(SliceForm::C);
    }
    let mut k = None;
    let mut m = None;
    for (i, z) in stack.iter().enumerate() {
        if let Some((width, value)) = z.counter() {
            k.get_or_insert(width);
            if let Some(w) = value.and_then(|w| w.to_i64()) {
                m.get_or_insert(i as i64 - w);
            }
        }
    }
    Ok(SliceForm::B { m, k })
}
