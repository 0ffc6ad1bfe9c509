//! Counter-indexed sequence sets over `{*, 0', 1', 2', 3', 0, 1, #}` and
//! their prefix checkers.
//!
//! A member is `*^inf`, `#^inf`, or `*^k (w)_4 y` with `k >= 1` stars at
//! positions `1..=k`, the `k` base-4 digits of `w` (most significant first)
//! at `k+1..=2k`, and a binary payload `y` from position `2k+1` that must
//! lie in the density set of the `k`-th family member.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::machine::{density_machine_run, DensityMachine, WrapperOutcome};
use crate::error::{Error, Result};
use crate::symbolic::Alphabet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SLetter {
    Star,
    Digit(u8),
    Bit(u8),
    Sharp,
}

impl fmt::Display for SLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SLetter::Star => write!(f, "*"),
            SLetter::Digit(d) => write!(f, "{d}'"),
            SLetter::Bit(b) => write!(f, "{b}"),
            SLetter::Sharp => write!(f, "#"),
        }
    }
}

/// A prefix over the counter alphabet, optionally continued by a constant tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SWord {
    pub prefix: Vec<SLetter>,
    pub tail: Option<SLetter>,
}

fn parse_letters(text: &str) -> Result<Vec<SLetter>> {
    let mut out = Vec::new();
    let mut chars = text.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(c) = chars.next() {
        let letter = match c {
            '*' => SLetter::Star,
            '#' | '♯' => SLetter::Sharp,
            '0'..='3' if matches!(chars.peek(), Some('\'' | '′')) => {
                chars.next();
                SLetter::Digit(c as u8 - b'0')
            }
            '0' | '1' => SLetter::Bit(c as u8 - b'0'),
            other => return Err(Error::UnknownSymbol(other.to_string())),
        };
        out.push(letter);
    }
    Ok(out)
}

impl SWord {
    /// Parses text such as `**3'0'1011` or `*~*`; `'` or `′` marks a
    /// counter digit, `#` or `♯` the end marker, `~x` a constant tail.
    pub fn parse(text: &str) -> Result<Self> {
        let (head, tail) = match text.split_once('~') {
            Some((h, t)) => {
                let t = parse_letters(t)?;
                if t.len() != 1 {
                    return Err(Error::InvalidInput(format!(
                        "tail `{text}` must be one letter"
                    )));
                }
                (h, Some(t[0]))
            }
            None => (text, None),
        };
        Ok(SWord {
            prefix: parse_letters(head)?,
            tail,
        })
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Letter at the 1-based position `i`, when known.
    pub fn at(&self, i: usize) -> Option<SLetter> {
        self.prefix.get(i - 1).copied().or(self.tail)
    }

    fn truncate(&self, len: usize) -> SWord {
        SWord {
            prefix: self.prefix[..len].to_vec(),
            tail: None,
        }
    }

    fn extended(&self, len: usize) -> SWord {
        let mut prefix = self.prefix.clone();
        if let Some(t) = self.tail {
            prefix.resize(len.max(prefix.len()), t);
        }
        SWord {
            prefix,
            tail: self.tail,
        }
    }
}

impl SWord {
    /// Only stars are visible (and the tail, if any, is a star).
    pub fn looks_like_stars(&self) -> bool {
        matches!(shape(self), Shape::Stars { .. })
    }

    /// Only end markers are visible (and the tail, if any, is one).
    pub fn looks_like_sharps(&self) -> bool {
        matches!(shape(self), Shape::Sharps { .. })
    }

    /// Counter width `k` and, when all `k` digits are visible, the value `w`.
    pub fn counter(&self) -> Option<(usize, Option<BigUint>)> {
        match shape(self) {
            Shape::Counter { k, digits, .. } => {
                let value = (digits.len() == k)
                    .then(|| digit_value(&digits))
                    .flatten()
                    .and_then(|v| v.to_biguint());
                Some((k, value))
            }
            _ => None,
        }
    }
}

impl fmt::Display for SWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.prefix {
            write!(f, "{l}")?;
        }
        if let Some(t) = self.tail {
            write!(f, "~{t}")?;
        }
        Ok(())
    }
}

/// Verdict of a prefix checker; positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SVerdict {
    AcceptedSoFar,
    Rejected { position: usize, reason: String },
}

impl SVerdict {
    pub fn is_rejected(&self) -> bool {
        matches!(self, SVerdict::Rejected { .. })
    }

    pub fn position(&self) -> Option<usize> {
        match self {
            SVerdict::Rejected { position, .. } => Some(*position),
            SVerdict::AcceptedSoFar => None,
        }
    }

    fn reject(position: usize, reason: impl Into<String>) -> Self {
        SVerdict::Rejected {
            position,
            reason: reason.into(),
        }
    }
}

/// Visible structure of a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    /// Only stars so far; `exact` when the tail is also a star.
    Stars {
        exact: bool,
    },
    /// Only end markers so far; `exact` when the tail is also one.
    Sharps {
        exact: bool,
    },
    /// `k` stars then a non-star: visible digits and payload letters.
    Counter {
        k: usize,
        digits: Vec<SLetter>,
        payload: Vec<SLetter>,
    },
    Other,
}

fn shape(z: &SWord) -> Shape {
    let all = |l: SLetter| z.prefix.iter().all(|&x| x == l);
    if all(SLetter::Star) && z.tail.is_none_or(|t| t == SLetter::Star) {
        return Shape::Stars {
            exact: z.tail.is_some(),
        };
    }
    if all(SLetter::Sharp) && z.tail.is_none_or(|t| t == SLetter::Sharp) && !z.is_empty() {
        return Shape::Sharps {
            exact: z.tail.is_some(),
        };
    }
    let k = z.prefix.iter().take_while(|&&l| l == SLetter::Star).count();
    if k == 0 || k == z.len() {
        return Shape::Other;
    }
    let digits = z.prefix[k..(2 * k).min(z.len())].to_vec();
    let payload = z.prefix.get(2 * k..).unwrap_or(&[]).to_vec();
    Shape::Counter { k, digits, payload }
}

/// Longest payload prefix expanded from a tail before checking.
const TAIL_HORIZON_LOOPS: usize = 12;

/// Rejects a prefix as soon as it shows a violation of membership: a non-`#`
/// after a leading `#`, a missing star, a non-digit in a counter slot, a
/// non-binary payload letter, or a payload rejected by the density wrapper
/// around `family[k-1]` within `budget` loops.
pub fn s_membership_check(z: &SWord, family: &[DensityMachine], budget: usize) -> Result<SVerdict> {
    if z.is_empty() {
        return Ok(match z.tail {
            Some(SLetter::Star | SLetter::Sharp) | None => SVerdict::AcceptedSoFar,
            Some(_) => SVerdict::reject(1, "first letter is neither a star nor an end marker"),
        });
    }
    if z.prefix[0] == SLetter::Sharp {
        if let Some(i) = z.prefix.iter().position(|&l| l != SLetter::Sharp) {
            return Ok(SVerdict::reject(i + 1, "letter after a leading end marker"));
        }
        return Ok(match z.tail {
            Some(t) if t != SLetter::Sharp => {
                SVerdict::reject(z.len() + 1, "tail after a leading end marker")
            }
            _ => SVerdict::AcceptedSoFar,
        });
    }
    if z.prefix[0] != SLetter::Star {
        return Ok(SVerdict::reject(
            1,
            "first letter is neither a star nor an end marker",
        ));
    }
    let k = z.prefix.iter().take_while(|&&l| l == SLetter::Star).count();
    if k == z.len() && z.tail.is_none_or(|t| t == SLetter::Star) {
        return Ok(SVerdict::AcceptedSoFar);
    }
    if k > family.len() {
        return Err(Error::Budget(format!(
            "counter width {k} beyond the {} family members",
            family.len()
        )));
    }
    let z = z.extended(2 * k + (1 << budget.clamp(1, TAIL_HORIZON_LOOPS)));
    for pos in k + 1..=(2 * k).min(z.len()) {
        if !matches!(z.prefix[pos - 1], SLetter::Digit(_)) {
            return Ok(SVerdict::reject(pos, "counter slot without a base-4 digit"));
        }
    }
    if z.len() <= 2 * k {
        return Ok(SVerdict::AcceptedSoFar);
    }
    let payload = &z.prefix[2 * k..];
    let binary: Vec<u16> = payload
        .iter()
        .map_while(|l| match l {
            SLetter::Bit(b) => Some(*b as u16),
            _ => None,
        })
        .collect();
    if !binary.is_empty() {
        let bits = Alphabet::from_chars("01")?;
        match density_machine_run(&family[k - 1], &binary, &bits, budget)? {
            WrapperOutcome::Halted { t } => {
                return Ok(SVerdict::reject(
                    2 * k + (1 << t),
                    format!("payload rejected at loop {t}"),
                ))
            }
            WrapperOutcome::RejectedInput { t, level } => {
                return Ok(SVerdict::reject(
                    2 * k + (1 << t),
                    format!("payload is not a density window (level {level})"),
                ))
            }
            WrapperOutcome::StillRunning { .. } => {}
        }
    }
    if binary.len() < payload.len() {
        return Ok(SVerdict::reject(
            2 * k + binary.len() + 1,
            "non-binary payload letter",
        ));
    }
    Ok(SVerdict::AcceptedSoFar)
}

/// The three pair clauses: counter increment, last counter followed by end
/// markers, stars followed by stars or by counter zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SClause {
    S1,
    S2,
    S3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SPrimeVerdict {
    AcceptedSoFar { clauses: Vec<SClause> },
    Rejected { position: usize, reason: String },
}

impl SPrimeVerdict {
    pub fn is_rejected(&self) -> bool {
        matches!(self, SPrimeVerdict::Rejected { .. })
    }

    pub fn position(&self) -> Option<usize> {
        match self {
            SPrimeVerdict::Rejected { position, .. } => Some(*position),
            SPrimeVerdict::AcceptedSoFar { .. } => None,
        }
    }
}

fn digit_value(digits: &[SLetter]) -> Option<BigInt> {
    digits.iter().try_fold(BigInt::zero(), |acc, l| match l {
        SLetter::Digit(d) => Some(acc * 4 + *d as i32),
        _ => None,
    })
}

/// Some `w <= 4^k - 2` has leading digits `lower` and `w + 1` leading digits `upper`.
fn increment_possible(k: usize, lower: &[SLetter], upper: &[SLetter]) -> bool {
    let v = lower.len().min(upper.len());
    let (Some(d), Some(e)) = (digit_value(&lower[..v]), digit_value(&upper[..v])) else {
        return false;
    };
    let scale = BigInt::one() << (2 * (k - v));
    let top: BigInt = (BigInt::one() << (2 * k)) - 2;
    let one = BigInt::one();
    let lo: BigInt = (&d * &scale).max(&e * &scale - &one);
    let hi_lower: BigInt = (&d + &one) * &scale - &one;
    let hi_upper: BigInt = (&e + &one) * &scale - 2;
    let hi = hi_lower.min(hi_upper).min(top);
    lo <= hi
}

fn all_digits(digits: &[SLetter], d: u8) -> bool {
    digits.iter().all(|&l| l == SLetter::Digit(d))
}

fn clauses(z: &SWord, zp: &SWord) -> Vec<SClause> {
    let (a, b) = (shape(z), shape(zp));
    let mut out = Vec::new();
    let s1 = match (&a, &b) {
        (Shape::Stars { exact: false }, Shape::Stars { exact: false }) => true,
        (
            Shape::Counter { k, digits, payload },
            Shape::Counter {
                k: k2,
                digits: d2,
                payload: p2,
            },
        ) => k == k2 && payload == p2 && increment_possible(*k, digits, d2),
        _ => false,
    };
    if s1 {
        out.push(SClause::S1);
    }
    let s2 = matches!(b, Shape::Sharps { .. })
        && match &a {
            Shape::Stars { exact } => !exact,
            Shape::Counter { digits, .. } => all_digits(digits, 3),
            _ => false,
        };
    if s2 {
        out.push(SClause::S2);
    }
    let s3 = matches!(a, Shape::Stars { .. })
        && match &b {
            Shape::Stars { .. } => true,
            Shape::Counter { digits, .. } => all_digits(digits, 0),
            _ => false,
        };
    if s3 {
        out.push(SClause::S3);
    }
    out
}

/// Checks a pair of equal-length prefixes against the union of the three
/// clauses and membership of both components. Reports the first position
/// at which the pair is rejected and, otherwise, the surviving clauses.
pub fn s_prime_check(
    z: &SWord,
    zp: &SWord,
    family: &[DensityMachine],
    budget: usize,
) -> Result<SPrimeVerdict> {
    if z.len() != zp.len() {
        return Err(Error::DimensionMismatch(format!(
            "pair prefixes have lengths {} and {}",
            z.len(),
            zp.len()
        )));
    }
    let mut best: Option<(usize, String)> = None;
    let mut consider = |pos: usize, reason: String| {
        if best.as_ref().is_none_or(|(p, _)| pos < *p) {
            best = Some((pos, reason));
        }
    };
    for (which, w) in [("first", z), ("second", zp)] {
        if let SVerdict::Rejected { position, reason } = s_membership_check(w, family, budget)? {
            consider(position, format!("{which} component: {reason}"));
        }
    }
    let surviving = clauses(z, zp);
    if surviving.is_empty() {
        let first_dead = (1..=z.len())
            .find(|&n| clauses(&z.truncate(n), &zp.truncate(n)).is_empty())
            .unwrap_or(z.len() + 1);
        consider(first_dead, "no pair clause fits".into());
    }
    Ok(match best {
        Some((position, reason)) => SPrimeVerdict::Rejected { position, reason },
        None => SPrimeVerdict::AcceptedSoFar { clauses: surviving },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::never_halts;

    fn family(n: usize) -> Vec<DensityMachine> {
        (0..n).map(|_| never_halts(&["0", "1"]).unwrap()).collect()
    }

    fn check(text: &str) -> SVerdict {
        s_membership_check(&SWord::parse(text).unwrap(), &family(3), 4).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        let w = SWord::parse("**3′0'101~0").unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w.to_string(), "**3'0'101~0");
        assert_eq!(SWord::parse("♯♯").unwrap().to_string(), "##");
        assert!(SWord::parse("*x").is_err());
    }

    #[test]
    fn membership_examples() {
        assert_eq!(check("####"), SVerdict::AcceptedSoFar);
        assert_eq!(check("#01").position(), Some(2));
        assert_eq!(check("**3'1").position(), Some(4));
        assert_eq!(check("**3'0'1011"), SVerdict::AcceptedSoFar);
        assert_eq!(check("0").position(), Some(1));
        assert_eq!(check("*****"), SVerdict::AcceptedSoFar);
        assert_eq!(check("*2'1#").position(), Some(4));
        assert_eq!(check("*2'0110").position(), Some(6));
        assert_eq!(check("##~1").position(), Some(3));
    }

    #[test]
    fn wide_counter_is_a_budget_error() {
        let z = SWord::parse("****0'").unwrap();
        assert!(matches!(
            s_membership_check(&z, &family(3), 4),
            Err(Error::Budget(_))
        ));
    }

    fn pair(a: &str, b: &str) -> SPrimeVerdict {
        s_prime_check(
            &SWord::parse(a).unwrap(),
            &SWord::parse(b).unwrap(),
            &family(3),
            4,
        )
        .unwrap()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair("###~#", "###~#").position(), Some(1));
        assert_eq!(
            pair("***~*", "***~*"),
            SPrimeVerdict::AcceptedSoFar {
                clauses: vec![SClause::S3]
            }
        );
        assert_eq!(pair("*1'1", "*1'1").position(), Some(2));
        assert_eq!(
            pair("*1'1", "*2'1"),
            SPrimeVerdict::AcceptedSoFar {
                clauses: vec![SClause::S1]
            }
        );
        assert_eq!(
            pair("*3'1", "###"),
            SPrimeVerdict::AcceptedSoFar {
                clauses: vec![SClause::S2]
            }
        );
        assert_eq!(
            pair("***~*", "*0'1"),
            SPrimeVerdict::AcceptedSoFar {
                clauses: vec![SClause::S3]
            }
        );
        assert_eq!(
            pair("***", "***"),
            SPrimeVerdict::AcceptedSoFar {
                clauses: vec![SClause::S1, SClause::S3]
            }
        );
        assert_eq!(pair("*1'1", "*2'0").position(), Some(3));
    }

    #[test]
    fn increments_with_hidden_digits() {
        let d = |s: &str| parse_letters(s).unwrap();
        assert!(increment_possible(2, &d("0'"), &d("1'")));
        assert!(increment_possible(2, &d("0'"), &d("0'")));
        assert!(!increment_possible(2, &d("1'"), &d("0'")));
        assert!(!increment_possible(2, &d("3'"), &d("0'")));
        assert!(increment_possible(2, &d("0'3'"), &d("1'0'")));
        assert!(!increment_possible(2, &d("3'3'"), &d("0'0'")));
        assert!(!increment_possible(1, &d("3'"), &d("3'")));
    }
}
