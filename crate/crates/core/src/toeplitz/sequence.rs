use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{Alphabet, Sym};

/// A one-sided sequence known through a finite prefix, optionally
/// eventually constant (`tail`) right after the prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSequence {
    alphabet: Alphabet,
    prefix: Vec<Sym>,
    tail: Option<Sym>,
}

impl SymbolSequence {
    pub fn new(alphabet: Alphabet, prefix: Vec<Sym>, tail: Option<Sym>) -> Result<Self> {
        if let Some(&s) = prefix
            .iter()
            .chain(tail.iter())
            .find(|&&s| !alphabet.contains(s))
        {
            return Err(Error::UnknownSymbol(format!("#{s}")));
        }
        Ok(SymbolSequence {
            alphabet,
            prefix,
            tail,
        })
    }

    /// Parses `prefix` or `prefix(c)^inf`-style text: an optional `~c`
    /// suffix marks the constant tail, e.g. `10~0` for `1 0 0 0 ...`.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let (head, tail) = match text.rsplit_once('~') {
            Some((h, t)) => (h, Some(alphabet.sym(t.trim())?)),
            None => (text, None),
        };
        let prefix = alphabet.parse_word(head)?;
        SymbolSequence::new(alphabet, prefix, tail)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn prefix(&self) -> &[Sym] {
        &self.prefix
    }

    pub fn tail(&self) -> Option<Sym> {
        self.tail
    }

    /// Letter at the 1-based index `i`, when known.
    pub fn at(&self, i: usize) -> Option<Sym> {
        assert!(i >= 1, "sequences are indexed from 1");
        self.prefix.get(i - 1).copied().or(self.tail)
    }

    /// First `n` letters, if known.
    pub fn take(&self, n: usize) -> Option<Vec<Sym>> {
        (1..=n).map(|i| self.at(i)).collect()
    }

    pub fn render(&self) -> String {
        let mut s = self.alphabet.format_word(&self.prefix);
        if let Some(t) = self.tail {
            s.push('~');
            s.push_str(self.alphabet.name(t));
        }
        s
    }
}

/// Outcome of comparing two sequences under the swap equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tilde {
    Equivalent,
    NotEquivalent,
    Undetermined,
}

/// Three-valued conjunction helper.
fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn eq(a: Option<Sym>, b: Option<Sym>) -> Option<bool> {
    Some(a? == b?)
}

/// `alpha ~ beta` holds when they are equal, or for some index `i` they
/// agree below `i`, `beta` is constantly `alpha_i` above `i` and `alpha` is
/// constantly `beta_i` above `i`. Decided exactly when both sequences carry
/// tails; otherwise answered from the prefixes when they suffice.
pub fn tilde_equiv(alpha: &SymbolSequence, beta: &SymbolSequence) -> Result<Tilde> {
    if alpha.alphabet != beta.alphabet {
        return Err(Error::InvalidInput(
            "sequences over different alphabets".into(),
        ));
    }
    let both_tails = alpha.tail.is_some() && beta.tail.is_some();
    let known = alpha.prefix.len().max(beta.prefix.len());
    // Positions 1..=horizon cover everything distinguishable; beyond it
    // both sequences are constant when tails are known.
    let horizon = known + 2;
    let val = |s: &SymbolSequence, j: usize| s.at(j);

    let equal = (1..=horizon).fold(Some(true), |acc, j| {
        and(acc, eq(val(alpha, j), val(beta, j)))
    });
    let mut verdict = equal;
    for i in 1..=horizon {
        let mut cond = Some(true);
        for j in 1..i {
            cond = and(cond, eq(val(alpha, j), val(beta, j)));
        }
        for j in i + 1..=horizon {
            cond = and(cond, eq(val(beta, j), val(alpha, i)));
            cond = and(cond, eq(val(alpha, j), val(beta, i)));
        }
        verdict = match (verdict, cond) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        };
    }
    if !both_tails {
        // Witness indices beyond the known prefixes can never be refuted.
        let prefixes_agree = (1..=known).all(|j| match (val(alpha, j), val(beta, j)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        });
        if prefixes_agree || verdict.is_none() {
            return Ok(Tilde::Undetermined);
        }
    }
    Ok(match verdict {
        Some(true) if both_tails => Tilde::Equivalent,
        Some(true) | None => Tilde::Undetermined,
        Some(false) => Tilde::NotEquivalent,
    })
}
