use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol inside its [`Alphabet`].
pub type Sym = u16;

/// An ordered list of distinct symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidSpec("empty alphabet".into()));
        }
        if symbols.len() > (Sym::MAX as usize) - 1 {
            return Err(Error::InvalidSpec(format!(
                "alphabet too large: {}",
                symbols.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidSpec("empty symbol name".into()));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidSpec(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// One symbol per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(|c| c.to_string()))
    }

    /// Symbols `0`, `1`, ..., `n-1`.
    pub fn numeric(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s as usize]
    }

    pub fn index(&self, name: &str) -> Option<Sym> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| i as Sym)
    }

    pub fn sym(&self, name: &str) -> Result<Sym> {
        self.index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, s: Sym) -> bool {
        (s as usize) < self.symbols.len()
    }

    /// True when every symbol is a single character, so words can be
    /// written without separators.
    pub fn is_compact(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Compact alphabets read one character per symbol;
    /// otherwise symbols are separated by whitespace.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        if self.is_compact() && !text.contains(char::is_whitespace) {
            text.chars().map(|c| self.sym(&c.to_string())).collect()
        } else {
            text.split_whitespace().map(|t| self.sym(t)).collect()
        }
    }

    pub fn format_word(&self, word: &[Sym]) -> String {
        let names = word.iter().map(|&s| self.name(s));
        if self.is_compact() {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}
