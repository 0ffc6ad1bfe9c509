use num_bigint::BigUint;
use serde::Serialize;

use super::rule::{CaRule, UNDEFINED};
use crate::entropy::big_text;
use crate::error::{Error, Result};
use crate::symbolic::{
    count_patterns, enumerate_patterns_limited, Alphabet, Pattern, RectWindow, SftSpec, Sym,
};

/// Spec whose letters pair a base letter with a bit that may be 1 only
/// above base letters projecting to 1.
#[derive(Clone, Debug)]
pub struct SplitSpec {
    pub spec: SftSpec,
    /// Base letter of each split letter.
    pub base: Vec<Sym>,
    /// Bit of each split letter.
    pub bit: Vec<u8>,
}

fn check_projection(letters: usize, projection: &[u8]) -> Result<()> {
    if projection.len() != letters {
        return Err(Error::InvalidInput(format!(
            "projection has {} entries for {letters} letters",
            projection.len()
        )));
    }
    if let Some(v) = projection.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidInput(format!(
            "projection value {v} outside {{0, 1}}"
        )));
    }
    Ok(())
}

/// Letters `a.0` for every base letter and `a.1` for those with `projection[a] = 1`.
fn split_letters(alphabet: &Alphabet, projection: &[u8]) -> (Vec<String>, Vec<Sym>, Vec<u8>) {
    let mut names = Vec::new();
    let (mut base, mut bit) = (Vec::new(), Vec::new());
    for (a, name) in alphabet.symbols().iter().enumerate() {
        for b in 0..=projection[a] {
            names.push(format!("{name}.{b}"));
            base.push(a as Sym);
            bit.push(b);
        }
    }
    (names, base, bit)
}

/// Doubles every letter projecting to 1. Forbidden patterns of `spec` are
/// inherited for every choice of bits.
pub fn split_construction(spec: &SftSpec, projection: &[u8]) -> Result<SplitSpec> {
    check_projection(spec.alphabet().len(), projection)?;
    let (names, base, bit) = split_letters(spec.alphabet(), projection);
    let preimages: Vec<Vec<Sym>> = (0..spec.alphabet().len())
        .map(|a| {
            (0..base.len())
                .filter(|&s| base[s] as usize == a)
                .map(|s| s as Sym)
                .collect()
        })
        .collect();
    let mut forbidden = Vec::new();
    for p in spec.forbidden() {
        let cells = p.cells();
        let mut choice = vec![0usize; cells.len()];
        loop {
            let lifted = cells
                .iter()
                .zip(&choice)
                .map(|(&(c, s), &i)| (c, preimages[s as usize][i]));
            forbidden.push(Pattern::new(spec.dimension(), lifted)?);
            let mut i = 0;
            loop {
                if i == cells.len() {
                    break;
                }
                choice[i] += 1;
                if choice[i] < preimages[cells[i].1 as usize].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == cells.len() {
                break;
            }
        }
    }
    let label = spec.name().unwrap_or("spec");
    let spec = SftSpec::new(Alphabet::new(names)?, spec.dimension(), forbidden)?
        .with_name(format!("{label}-split"));
    Ok(SplitSpec { spec, base, bit })
}

/// Both sides of the split counting identity on one window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitIdentity {
    /// Margin-free count of the split spec.
    #[serde(with = "big_text")]
    pub left: BigUint,
    /// Sum over the base patterns of `2^(number of cells projecting to 1)`.
    #[serde(with = "big_text")]
    pub right: BigUint,
    pub holds: bool,
}

/// Evaluates the identity on `window`, enumerating at most `limit` base patterns.
pub fn split_count_identity(
    spec: &SftSpec,
    projection: &[u8],
    window: &RectWindow,
    limit: usize,
) -> Result<SplitIdentity> {
    let split = split_construction(spec, projection)?;
    let left = count_patterns(&split.spec, window, 0)?;
    let mut right = BigUint::from(0u32);
    for p in enumerate_patterns_limited(spec, window, 0, limit)? {
        let ones = p.symbols().filter(|&s| projection[s as usize] == 1).count();
        right += BigUint::from(1u32) << ones;
    }
    let holds = left == right;
    Ok(SplitIdentity { left, right, holds })
}

/// Split automaton: the base letter follows `rule` and the bit follows the
/// left shift, reset to 0 wherever the new base letter projects to 0.
pub fn split_rule(rule: &CaRule, projection: &[u8]) -> Result<CaRule> {
    check_projection(rule.alphabet().len(), projection)?;
    if let Some(u) = rule.undefined() {
        if projection[u as usize] != 0 {
            return Err(Error::InvalidInput(format!(
                "{UNDEFINED} must project to 0"
            )));
        }
    }
    let (names, base, bit) = split_letters(rule.alphabet(), projection);
    let names: Vec<String> = names
        .into_iter()
        .zip(&base)
        .map(|(name, &b)| {
            if Some(b) == rule.undefined() {
                UNDEFINED.to_string()
            } else {
                name
            }
        })
        .collect();
    let alphabet = Alphabet::new(names)?;
    let letter = |a: Sym, b: u8| -> Sym {
        let b = if projection[a as usize] == 1 { b } else { 0 };
        (0..base.len())
            .find(|&s| base[s] == a && bit[s] == b)
            .expect("letter exists") as Sym
    };
    let r = rule.radius().max(1);
    let pad = r - rule.radius();
    CaRule::from_fn(format!("{}-split", rule.name()), alphabet, r, |nb| {
        let inner: Vec<Sym> = nb[pad..nb.len() - pad]
            .iter()
            .map(|&s| base[s as usize])
            .collect();
        let a = rule.apply(&inner);
        letter(a, bit[nb[r + 1] as usize])
    })
}
