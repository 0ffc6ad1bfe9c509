use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Letter of the description alphabet `{0, 1, /, ♯}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Glyph {
    Zero,
    One,
    Slash,
    Sharp,
}

impl Glyph {
    pub const ALL: [Glyph; 4] = [Glyph::Zero, Glyph::One, Glyph::Slash, Glyph::Sharp];

    pub fn to_char(self) -> char {
        match self {
            Glyph::Zero => '0',
            Glyph::One => '1',
            Glyph::Slash => '/',
            Glyph::Sharp => '♯',
        }
    }

    /// `#` is accepted as an ASCII spelling of `♯`.
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Glyph::Zero),
            '1' => Ok(Glyph::One),
            '/' => Ok(Glyph::Slash),
            '♯' | '#' => Ok(Glyph::Sharp),
            _ => Err(Error::UnknownSymbol(c.to_string())),
        }
    }

    pub fn bit(b: bool) -> Self {
        if b {
            Glyph::One
        } else {
            Glyph::Zero
        }
    }

    pub fn as_bit(self) -> Option<u8> {
        match self {
            Glyph::Zero => Some(0),
            Glyph::One => Some(1),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Glyph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Glyph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.to_char())
    }
}

impl<'de> Deserialize<'de> for Glyph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = char::deserialize(d)?;
        Glyph::from_char(c).map_err(serde::de::Error::custom)
    }
}

pub fn parse_glyphs(text: &str) -> Result<Vec<Glyph>> {
    text.chars().map(Glyph::from_char).collect()
}

pub fn render_glyphs(glyphs: &[Glyph]) -> String {
    glyphs.iter().map(|g| g.to_char()).collect()
}

/// Decoded description of the next-level tile:
/// `Level′/Addr′/Age′/Prog′/Check′` followed by `♯` padding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextTile {
    pub level: u32,
    pub addr: u64,
    pub age: u64,
    /// Program text: rule entries of four bits `(left, centre, right) -> out`.
    pub prog: Vec<u8>,
    pub check: u8,
}

/// Field order on the description row.
pub const SUBFIELDS: [&str; 5] = ["level", "addr", "age", "prog", "check"];

/// Start offset and length of each subfield in an encoded description.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub fields: [(usize, usize); 5],
    /// Index of the first `♯`, or the row length when there is none.
    pub end: usize,
}

impl Layout {
    pub fn start(&self, field: usize) -> usize {
        self.fields[field].0
    }

    pub fn field_end(&self, field: usize) -> usize {
        self.fields[field].0 + self.fields[field].1
    }
}

pub fn binary(v: u64) -> String {
    format!("{v:b}")
}

impl NextTile {
    pub fn encode(&self) -> Vec<Glyph> {
        let prog: String = self
            .prog
            .iter()
            .map(|b| if *b == 1 { '1' } else { '0' })
            .collect();
        let text = format!(
            "{}/{}/{}/{}/{}",
            "1".repeat(self.level as usize),
            binary(self.addr),
            binary(self.age),
            prog,
            self.check
        );
        parse_glyphs(&text).expect("layout letters")
    }

    /// Parses a description row; the error names the offending cell.
    pub fn parse(row: &[Glyph]) -> std::result::Result<(NextTile, Layout), (usize, String)> {
        let end = row
            .iter()
            .position(|&g| g == Glyph::Sharp)
            .unwrap_or(row.len());
        if let Some(i) = row[end..].iter().position(|&g| g != Glyph::Sharp) {
            return Err((end + i, "letter after the end marker".into()));
        }
        let mut fields = [(0usize, 0usize); 5];
        let mut start = 0;
        let mut k = 0;
        for i in 0..=end {
            if i == end || row[i] == Glyph::Slash {
                if k == 5 {
                    return Err((i, "too many subfields".into()));
                }
                fields[k] = (start, i - start);
                k += 1;
                start = i + 1;
            }
        }
        if k < 5 {
            return Err((end, format!("{k} subfields instead of 5")));
        }
        let cells = |f: usize| &row[fields[f].0..fields[f].0 + fields[f].1];
        let level_cells = cells(0);
        if level_cells.is_empty() {
            return Err((0, "empty level".into()));
        }
        if let Some(i) = level_cells.iter().position(|&g| g != Glyph::One) {
            return Err((i, "level is not unary".into()));
        }
        let number = |f: usize| -> std::result::Result<u64, (usize, String)> {
            let c = cells(f);
            if c.is_empty() || c.len() > 63 {
                return Err((
                    fields[f].0,
                    format!("{} has {} digits", SUBFIELDS[f], c.len()),
                ));
            }
            Ok(c.iter()
                .fold(0u64, |acc, g| acc << 1 | u64::from(g.as_bit().unwrap_or(0))))
        };
        let addr = number(1)?;
        let age = number(2)?;
        let prog: Vec<u8> = cells(3).iter().map(|g| g.as_bit().unwrap_or(0)).collect();
        if prog.len() % 4 != 0 {
            return Err((fields[3].0, "program length is not a multiple of 4".into()));
        }
        let check = cells(4);
        if check.len() != 1 {
            return Err((fields[4].0, "check must be one bit".into()));
        }
        let tile = NextTile {
            level: level_cells.len() as u32,
            addr,
            age,
            prog,
            check: check[0].as_bit().unwrap_or(0),
        };
        Ok((tile, Layout { fields, end }))
    }

    /// Result of the first program entry matching the triple.
    pub fn lookup(prog: &[u8], triple: [u8; 3]) -> Option<(usize, u8)> {
        prog.chunks(4)
            .enumerate()
            .find(|(_, e)| e[..3] == triple)
            .map(|(i, e)| (i, e[3]))
    }
}

/// Pads a description with `♯` to `width` cells.
pub fn pad_row(word: &[Glyph], width: usize) -> Result<Vec<Glyph>> {
    if word.len() > width {
        return Err(Error::InvalidInput(format!(
            "description of {} letters exceeds {width} cells",
            word.len()
        )));
    }
    let mut row = word.to_vec();
    row.resize(width, Glyph::Sharp);
    Ok(row)
}
