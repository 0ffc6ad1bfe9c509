use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Sym};
use super::pattern::{Cell, Pattern};
use crate::error::{Error, Result};

/// Upper bound on the number of forbidden patterns produced by lifting
/// constructions (products, splits, layer compositions).
pub const MAX_FORBIDDEN: usize = 4_000_000;

/// A subshift of finite type: alphabet, dimension and forbidden patterns.
/// Patterns are stored translated so their smallest coordinates are zero,
/// and are forbidden at every translate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpec {
    name: Option<String>,
    alphabet: Alphabet,
    dimension: u8,
    forbidden: Vec<Pattern>,
}

impl SftSpec {
    pub fn new(alphabet: Alphabet, dimension: u8, forbidden: Vec<Pattern>) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidSpec(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(forbidden.len());
        for p in forbidden {
            if p.is_empty() {
                return Err(Error::InvalidSpec("empty forbidden pattern".into()));
            }
            if p.dimension() != dimension {
                return Err(Error::InvalidSpec(format!(
                    "forbidden pattern of dimension {} in a {dimension}D spec",
                    p.dimension()
                )));
            }
            if let Some(s) = p.symbols().find(|&s| !alphabet.contains(s)) {
                return Err(Error::InvalidSpec(format!(
                    "symbol index {s} outside alphabet"
                )));
            }
            let n = p.normalized();
            if seen.insert(n.clone()) {
                out.push(n);
            }
        }
        Ok(SftSpec {
            name: None,
            alphabet,
            dimension,
            forbidden: out,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// The same constraints restricted to the letters in `keep`
    /// (the other letters are forbidden as single cells).
    pub fn restrict_letters(&self, keep: &[Sym]) -> Result<SftSpec> {
        let mut forbidden = self.forbidden.clone();
        for s in 0..self.alphabet.len() as Sym {
            if !keep.contains(&s) {
                forbidden.push(Pattern::new(self.dimension, [((0, 0), s)])?);
            }
        }
        SftSpec::new(self.alphabet.clone(), self.dimension, forbidden)
    }

    /// True when `pattern` contains no forbidden pattern at any translate.
    pub fn avoids_forbidden(&self, pattern: &Pattern) -> bool {
        let Some((x0, y0, x1, y1)) = pattern.bounds() else {
            return true;
        };
        for f in &self.forbidden {
            let (_, _, fw, fh) = f.bounds().expect("nonempty");
            for dy in y0..=y1 - fh {
                for dx in x0..=x1 - fw {
                    if f.cells()
                        .iter()
                        .all(|&((x, y), s)| pattern.get((x + dx, y + dy)) == Some(s))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SpecDocument::from_spec(
            self,
        ))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text)?;
        doc.into_spec()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// JSON form of an [`SftSpec`]: each forbidden pattern is a list of
/// `[[x] or [x, y], symbol]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub alphabet: Vec<String>,
    pub dimension: u8,
    pub forbidden: Vec<Vec<(Vec<i32>, String)>>,
}

impl SpecDocument {
    pub fn from_spec(spec: &SftSpec) -> Self {
        let a = spec.alphabet();
        SpecDocument {
            name: spec.name.clone(),
            alphabet: a.symbols().to_vec(),
            dimension: spec.dimension,
            forbidden: spec
                .forbidden
                .iter()
                .map(|p| {
                    p.cells()
                        .iter()
                        .map(|&((x, y), s)| {
                            let at = if spec.dimension == 1 {
                                vec![x]
                            } else {
                                vec![x, y]
                            };
                            (at, a.name(s).to_string())
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_spec(self) -> Result<SftSpec> {
        let alphabet = Alphabet::new(self.alphabet)?;
        let dim = self.dimension;
        let mut forbidden = Vec::with_capacity(self.forbidden.len());
        for entries in self.forbidden {
            let mut cells = Vec::with_capacity(entries.len());
            for (at, name) in entries {
                let cell: Cell = match (dim, at.as_slice()) {
                    (1, [x]) => (*x, 0),
                    (2, [x, y]) => (*x, *y),
                    _ => {
                        return Err(Error::InvalidSpec(format!(
                            "cell {at:?} does not match dimension {dim}"
                        )))
                    }
                };
                let s = alphabet
                    .index(&name)
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown symbol `{name}`")))?;
                cells.push((cell, s));
            }
            forbidden
                .push(Pattern::new(dim, cells).map_err(|e| Error::InvalidSpec(e.to_string()))?);
        }
        let spec = SftSpec::new(alphabet, dim, forbidden)?;
        Ok(match self.name {
            Some(n) => spec.with_name(n),
            None => spec,
        })
    }
}

/// A total letter-to-letter map between alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterProjection {
    source: Alphabet,
    target: Alphabet,
    map: Vec<Sym>,
}

impl LetterProjection {
    pub fn new(source: Alphabet, target: Alphabet, map: Vec<Sym>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidInput(format!(
                "projection covers {} of {} source letters",
                map.len(),
                source.len()
            )));
        }
        if let Some(&s) = map.iter().find(|&&s| !target.contains(s)) {
            return Err(Error::InvalidInput(format!(
                "image index {s} outside target alphabet"
            )));
        }
        Ok(LetterProjection {
            source,
            target,
            map,
        })
    }

    /// Builds the map from `(source name, target name)` pairs; every
    /// source letter must appear exactly once.
    pub fn from_pairs(source: Alphabet, target: Alphabet, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut map = vec![None; source.len()];
        for &(a, b) in pairs {
            let i = source.sym(a)? as usize;
            if map[i].replace(target.sym(b)?).is_some() {
                return Err(Error::InvalidInput(format!("letter `{a}` mapped twice")));
            }
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::InvalidInput(format!("letter `{}` unmapped", source.name(i as Sym)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LetterProjection::new(source, target, map)
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let map = (0..alphabet.len() as Sym).collect();
        LetterProjection {
            source: alphabet.clone(),
            target: alphabet,
            map,
        }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn image(&self, s: Sym) -> Sym {
        self.map[s as usize]
    }

    pub fn apply_word(&self, word: &[Sym]) -> Result<Vec<Sym>> {
        word.iter()
            .map(|&s| {
                self.map
                    .get(s as usize)
                    .copied()
                    .ok_or_else(|| Error::UnknownSymbol(format!("#{s}")))
            })
            .collect()
    }
}

/// Symbol-wise image of a pattern.
pub fn apply_projection(p: &LetterProjection, pattern: &Pattern) -> Result<Pattern> {
    if let Some(s) = pattern.symbols().find(|&s| !p.source.contains(s)) {
        return Err(Error::UnknownSymbol(format!(
            "#{s} outside projection source"
        )));
    }
    Ok(pattern.map_symbols(|s| p.map[s as usize]))
}

/// Lifts `pattern` (over one layer) to every pattern over `width`-fold
/// product letters whose `layer` coordinate matches, where a product
/// letter is encoded as `outer * inner_len + inner`.
pub(crate) fn lift_pattern(
    pattern: &Pattern,
    encode: impl Fn(Sym, usize) -> Sym,
    other_len: usize,
    out: &mut Vec<Pattern>,
) -> Result<()> {
    let n = pattern.len();
    let total = other_len.checked_pow(n as u32).unwrap_or(usize::MAX);
    if out.len().saturating_add(total) > MAX_FORBIDDEN {
        return Err(Error::Budget(format!(
            "lifting would exceed {MAX_FORBIDDEN} forbidden patterns"
        )));
    }
    let mut digits = vec![0usize; n];
    loop {
        let cells = pattern
            .cells()
            .iter()
            .zip(&digits)
            .map(|(&(c, s), &d)| (c, encode(s, d)));
        out.push(Pattern::new(pattern.dimension(), cells)?);
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            digits[i] += 1;
            if digits[i] < other_len {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Cartesian product of two SFTs on the same lattice. Product letters are
/// named `(a,b)` and indexed `ia * |B| + ib`.
pub fn product_spec(a: &SftSpec, b: &SftSpec) -> Result<SftSpec> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch(format!(
            "product of {}D and {}D specs",
            a.dimension, b.dimension
        )));
    }
    let nb = b.alphabet.len();
    let names = a.alphabet.symbols().iter().flat_map(|x| {
        b.alphabet
            .symbols()
            .iter()
            .map(move |y| format!("({x},{y})"))
    });
    let alphabet = Alphabet::new(names)?;
    let mut forbidden = Vec::new();
    for p in &a.forbidden {
        lift_pattern(p, |s, d| s * nb as Sym + d as Sym, nb, &mut forbidden)?;
    }
    for p in &b.forbidden {
        lift_pattern(
            p,
            |s, d| (d * nb) as Sym + s,
            a.alphabet.len(),
            &mut forbidden,
        )?;
    }
    SftSpec::new(alphabet, a.dimension, forbidden)
}

/// Projection of a product letter onto its first (`layer = 0`) or
/// second (`layer = 1`) coordinate.
pub fn product_projection(a: &SftSpec, b: &SftSpec, layer: usize) -> Result<LetterProjection> {
    let product = product_spec(a, b)?;
    let nb = b.alphabet.len();
    let (target, map): (Alphabet, Vec<Sym>) = if layer == 0 {
        (
            a.alphabet.clone(),
            (0..product.alphabet.len())
                .map(|i| (i / nb) as Sym)
                .collect(),
        )
    } else {
        (
            b.alphabet.clone(),
            (0..product.alphabet.len())
                .map(|i| (i % nb) as Sym)
                .collect(),
        )
    };
    LetterProjection::new(product.alphabet, target, map)
}

/// Transports every forbidden pattern through `(i, j) -> (i, j + sign * i)`.
pub fn shear_with(spec: &SftSpec, sign: i32) -> Result<SftSpec> {
    if spec.dimension != 2 {
        return Err(Error::DimensionMismatch("shear needs a 2D spec".into()));
    }
    let forbidden = spec
        .forbidden
        .iter()
        .map(|p| p.map_cells(|(i, j)| (i, j + sign * i)))
        .collect::<Result<Vec<_>>>()?;
    let sheared = SftSpec::new(spec.alphabet.clone(), 2, forbidden)?;
    Ok(match &spec.name {
        Some(n) => sheared.with_name(format!("{n}-sheared")),
        None => sheared,
    })
}

/// Diagonal shear `(i, j) -> (i, j - i)`: columns are preserved and rows
/// become north-west to south-east diagonals.
pub fn shear_diagonal(spec: &SftSpec) -> Result<SftSpec> {
    shear_with(spec, -1)
}
