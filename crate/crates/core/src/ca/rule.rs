use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Alphabet, Pattern, SftSpec, Sym};

/// Name of the absorbing letter marking an undefined extension.
pub const UNDEFINED: &str = "⊥";

/// Largest local-rule table accepted.
pub const MAX_TABLE: usize = 1 << 22;

/// How a finite row is stepped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMode {
    /// Only cells whose whole neighbourhood is known: the row loses `2r` cells.
    Shrinking,
    /// The row wraps around and keeps its length.
    Periodic,
}

/// A stepped row stamped with its boundary mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub mode: RowMode,
    pub cells: Vec<Sym>,
}

/// One-dimensional cellular automaton with a dense local-rule table indexed
/// by the neighbourhood read left to right as base-`|A|` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaRule {
    name: String,
    alphabet: Alphabet,
    radius: usize,
    undefined: Option<Sym>,
    table: Vec<Sym>,
}

fn table_len(letters: usize, radius: usize) -> Result<usize> {
    letters
        .checked_pow((2 * radius + 1) as u32)
        .filter(|&n| n <= MAX_TABLE)
        .ok_or_else(|| Error::Budget(format!("rule table above {MAX_TABLE} entries")))
}

impl CaRule {
    /// Validates totality and, when the alphabet holds [`UNDEFINED`], that
    /// every neighbourhood containing it maps to it.
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        radius: usize,
        table: Vec<Sym>,
    ) -> Result<Self> {
        let n = alphabet.len();
        if table.len() != table_len(n, radius)? {
            return Err(Error::InvalidInput(format!(
                "rule table has {} entries, expected {}",
                table.len(),
                n.pow((2 * radius + 1) as u32)
            )));
        }
        if let Some(&s) = table.iter().find(|&&s| s as usize >= n) {
            return Err(Error::UnknownSymbol(format!("#{s} in rule table")));
        }
        let rule = CaRule {
            name: name.into(),
            undefined: alphabet.index(UNDEFINED),
            alphabet,
            radius,
            table,
        };
        if let Some(u) = rule.undefined {
            let width = 2 * radius + 1;
            for (i, &out) in rule.table.iter().enumerate() {
                if out != u && rule.digits(i, width).contains(&u) {
                    return Err(Error::InvalidInput(format!(
                        "{UNDEFINED} is not absorbing in the rule table"
                    )));
                }
            }
        }
        Ok(rule)
    }

    /// Builds the table from `f`, forcing [`UNDEFINED`] to be absorbing.
    pub fn from_fn(
        name: impl Into<String>,
        alphabet: Alphabet,
        radius: usize,
        f: impl Fn(&[Sym]) -> Sym,
    ) -> Result<Self> {
        let n = alphabet.len();
        let len = table_len(n, radius)?;
        let undefined = alphabet.index(UNDEFINED);
        let width = 2 * radius + 1;
        let mut nb = vec![0 as Sym; width];
        let mut table = Vec::with_capacity(len);
        for i in 0..len {
            let mut rest = i;
            for slot in nb.iter_mut().rev() {
                *slot = (rest % n) as Sym;
                rest /= n;
            }
            table.push(match undefined {
                Some(u) if nb.contains(&u) => u,
                _ => f(&nb),
            });
        }
        CaRule::new(name, alphabet, radius, table)
    }

    fn digits(&self, mut i: usize, width: usize) -> Vec<Sym> {
        let n = self.alphabet.len();
        let mut out = vec![0; width];
        for slot in out.iter_mut().rev() {
            *slot = (i % n) as Sym;
            i /= n;
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn undefined(&self) -> Option<Sym> {
        self.undefined
    }

    pub fn table(&self) -> &[Sym] {
        &self.table
    }

    /// Local rule on a neighbourhood of `2r + 1` letters.
    pub fn apply(&self, neighbourhood: &[Sym]) -> Sym {
        let n = self.alphabet.len();
        self.table[neighbourhood.iter().fold(0, |acc, &s| acc * n + s as usize)]
    }

    fn check_row(&self, row: &[Sym]) -> Result<()> {
        match row.iter().find(|&&s| !self.alphabet.contains(s)) {
            Some(s) => Err(Error::UnknownSymbol(format!(
                "#{s} outside the rule alphabet"
            ))),
            None => Ok(()),
        }
    }

    /// One step of the automaton on a finite row.
    pub fn step(&self, row: &[Sym], mode: RowMode) -> Result<Row> {
        self.check_row(row)?;
        let w = 2 * self.radius + 1;
        let cells = match mode {
            RowMode::Shrinking => {
                if row.len() < w {
                    return Err(Error::InvalidInput(format!(
                        "a shrinking step needs at least {w} cells, got {}",
                        row.len()
                    )));
                }
                row.windows(w).map(|nb| self.apply(nb)).collect()
            }
            RowMode::Periodic => {
                if row.is_empty() {
                    return Err(Error::InvalidInput("empty periodic row".into()));
                }
                let len = row.len();
                let mut nb = vec![0; w];
                (0..len)
                    .map(|i| {
                        for (j, slot) in nb.iter_mut().enumerate() {
                            *slot = row[(i + len * w + j - self.radius) % len];
                        }
                        self.apply(&nb)
                    })
                    .collect()
            }
        };
        Ok(Row { mode, cells })
    }

    /// `steps` rows after `init`, `init` included.
    pub fn space_time(&self, init: &[Sym], steps: usize, mode: RowMode) -> Result<SpaceTimeBlock> {
        if mode == RowMode::Shrinking && init.len() < 2 * self.radius * steps + 1 {
            return Err(Error::InvalidInput(format!(
                "{steps} shrinking steps need a row of at least {} cells",
                2 * self.radius * steps + 1
            )));
        }
        self.check_row(init)?;
        let mut rows = vec![init.to_vec()];
        for _ in 0..steps {
            let next = self.step(rows.last().expect("nonempty"), mode)?.cells;
            rows.push(next);
        }
        Ok(SpaceTimeBlock {
            rule: self.name.clone(),
            mode,
            radius: self.radius,
            rows,
        })
    }

    pub fn to_document(&self) -> RuleDocument {
        RuleDocument {
            name: self.name.clone(),
            alphabet: self.alphabet.symbols().to_vec(),
            radius: self.radius,
            table: self
                .table
                .iter()
                .map(|&s| self.alphabet.name(s).to_string())
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<RuleDocument>(text)?.into_rule()
    }
}

/// JSON form of a rule; `table[i]` is the image of the neighbourhood whose
/// base-`|A|` digits, most significant first, spell `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub name: String,
    pub alphabet: Vec<String>,
    pub radius: usize,
    pub table: Vec<String>,
}

impl RuleDocument {
    pub fn into_rule(self) -> Result<CaRule> {
        let alphabet = Alphabet::new(self.alphabet)?;
        let table = self
            .table
            .iter()
            .map(|s| alphabet.sym(s))
            .collect::<Result<_>>()?;
        CaRule::new(self.name, alphabet, self.radius, table)
    }
}

/// Rows of a space-time diagram, oldest first. In shrinking mode row `t`
/// is `2 r t` cells shorter than the first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceTimeBlock {
    pub rule: String,
    pub mode: RowMode,
    pub radius: usize,
    pub rows: Vec<Vec<Sym>>,
}

impl SpaceTimeBlock {
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Number of steps.
    pub fn height(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Cell `x` of row `t` in the coordinates of the first row.
    pub fn get(&self, x: usize, t: usize) -> Option<Sym> {
        let shift = match self.mode {
            RowMode::Shrinking => self.radius * t,
            RowMode::Periodic => 0,
        };
        self.rows.get(t)?.get(x.checked_sub(shift)?).copied()
    }
}

/// `x -> x`.
pub fn identity_rule(alphabet: Alphabet) -> CaRule {
    CaRule::from_fn("identity", alphabet, 0, |nb| nb[0]).expect("small table")
}

/// Left shift `F(x)_i = x_{i+1}`.
pub fn shift_rule(alphabet: Alphabet) -> CaRule {
    CaRule::from_fn("shift", alphabet, 1, |nb| nb[2]).expect("small table")
}

/// Binary rule `(a, b, c) -> a xor c`.
pub fn xor_ca() -> CaRule {
    CaRule::from_fn("xor", Alphabet::numeric(2).expect("valid"), 1, |nb| {
        nb[0] ^ nb[2]
    })
    .expect("small table")
}

/// Row map of a 2D spec: the letter above the middle of each admissible
/// context of `2 radius + 1` cells, or [`UNDEFINED`] when no letter fits.
/// Fails with the first context admitting two letters.
pub fn ca_from_sft(spec: &SftSpec, radius: usize) -> Result<CaRule> {
    if spec.dimension() != 2 {
        return Err(Error::DimensionMismatch("a row map needs a 2D spec".into()));
    }
    if spec.alphabet().index(UNDEFINED).is_some() {
        return Err(Error::InvalidSpec(format!("{UNDEFINED} is reserved")));
    }
    let n = spec.alphabet().len();
    let names = spec
        .alphabet()
        .symbols()
        .iter()
        .cloned()
        .chain([UNDEFINED.to_string()]);
    let alphabet = Alphabet::new(names)?;
    let undefined = n as Sym;
    let width = 2 * radius + 1;
    let len = table_len(n + 1, radius)?;
    let mut table = Vec::with_capacity(len);
    let mut context = vec![0 as Sym; width];
    for i in 0..len {
        let mut rest = i;
        for slot in context.iter_mut().rev() {
            *slot = (rest % (n + 1)) as Sym;
            rest /= n + 1;
        }
        if context.contains(&undefined) {
            table.push(undefined);
            continue;
        }
        let row = context.iter().enumerate().map(|(x, &s)| ((x as i32, 0), s));
        let fits: Vec<Sym> = (0..n as Sym)
            .filter(|&s| {
                let p = Pattern::new(2, row.clone().chain([((radius as i32, 1), s)]))
                    .expect("distinct cells");
                spec.avoids_forbidden(&p)
            })
            .collect();
        match fits.as_slice() {
            [] => table.push(undefined),
            [s] => table.push(*s),
            [a, b, ..] => {
                let word = spec.alphabet().format_word(&context);
                let (a, b) = (spec.alphabet().name(*a), spec.alphabet().name(*b));
                return Err(Error::Nondeterministic(format!(
                    "context {word} admits both {a} and {b} above it"
                )));
            }
        }
    }
    let name = format!("{}-row-map", spec.name().unwrap_or("spec"));
    CaRule::new(name, alphabet, radius, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::stock;

    #[test]
    fn step_examples() {
        let xor = xor_ca();
        assert_eq!(
            xor.step(&[0, 1, 1, 0], RowMode::Shrinking).unwrap().cells,
            vec![1, 1]
        );
        let abc = Alphabet::from_chars("abc").unwrap();
        let shift = shift_rule(abc.clone());
        let row = abc.parse_word("abc").unwrap();
        let out = shift.step(&row, RowMode::Periodic).unwrap();
        assert_eq!(abc.format_word(&out.cells), "bca");
        assert_eq!(out.mode, RowMode::Periodic);
        assert!(xor.step(&[0, 2], RowMode::Periodic).is_err());
        assert!(xor.step(&[0, 1], RowMode::Shrinking).is_err());
    }

    #[test]
    fn rules_from_specs() {
        let xor = ca_from_sft(&stock::xor_rule(), 1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    assert_eq!(xor.apply(&[a, b, c]), a ^ c);
                }
            }
        }
        assert_eq!(xor.apply(&[0, 2, 1]), 2);
        let single = ca_from_sft(&stock::single_letter(2), 0).unwrap();
        assert_eq!(single.apply(&[0]), 0);
        assert!(matches!(
            ca_from_sft(&stock::full_shift(2, 2), 1),
            Err(Error::Nondeterministic(_))
        ));
    }

    #[test]
    fn json_round_trip_and_absorption() {
        let r = ca_from_sft(&stock::xor_rule(), 1).unwrap();
        assert_eq!(CaRule::from_json(&r.to_json().unwrap()).unwrap(), r);
        let mut doc = r.to_document();
        let last = doc.table.len() - 1;
        doc.table[last] = "0".into();
        assert!(doc.into_rule().is_err());
    }
}
