use std::io::Cursor;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use serde::{Deserialize, Serialize};

use super::schedule::ScheduleParams;
use super::tile::{pad_row, parse_glyphs, Glyph};
use crate::error::{Error, Result};

/// Fields of one tile of the macrotile row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecord {
    /// Unary level word `1^n`.
    pub level: String,
    pub addr: u64,
    pub age: u64,
    pub info: Glyph,
    pub lmail: Option<Glyph>,
    pub rmail: Option<Glyph>,
    /// One letter of the program text, `♯` past its end.
    pub prog: Glyph,
    pub work: Option<String>,
    pub check: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentState {
    Ready,
    Working(u8),
    Done,
    Rejected(u8),
}

/// The head organizing the worktime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub position: usize,
    pub state: AgentState,
}

/// One macrotile row evolving over its worktime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacrotileGrid {
    pub level: u32,
    pub params: ScheduleParams,
    /// Steps elapsed since the start of the worktime.
    pub time: u64,
    /// Phases completed so far.
    pub phase: u8,
    pub agent: Agent,
    pub cells: Vec<FieldRecord>,
}

/// Builds the row at the start of a worktime.
pub fn init_grid(
    n: u32,
    params: &ScheduleParams,
    info_word: &str,
    check_row: &[u8],
    prog_text: &str,
) -> Result<MacrotileGrid> {
    if n == 0 {
        return Err(Error::InvalidInput("level must be >= 1".into()));
    }
    let (b, t) = params.dims(n)?;
    if b > 1 << 20 {
        return Err(Error::Budget(format!(
            "row of {b} cells is beyond desk scale"
        )));
    }
    if t <= 1 {
        return Err(Error::InvalidInput("worktime must exceed one step".into()));
    }
    let b = b as usize;
    let info = pad_row(&parse_glyphs(info_word)?, b)?;
    if check_row.len() != b {
        return Err(Error::DimensionMismatch(format!(
            "check row has {} cells, expected {b}",
            check_row.len()
        )));
    }
    if let Some(v) = check_row.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidInput(format!(
            "check letter {v} is not a bit"
        )));
    }
    let prog_glyphs = parse_glyphs(prog_text)?;
    if prog_glyphs.iter().any(|g| g.as_bit().is_none()) {
        return Err(Error::InvalidInput(
            "program text must be over {0, 1}".into(),
        ));
    }
    let prog = pad_row(&prog_glyphs, b)?;
    let cells = (0..b)
        .map(|x| FieldRecord {
            level: "1".repeat(n as usize),
            addr: x as u64,
            age: 0,
            info: info[x],
            lmail: None,
            rmail: None,
            prog: prog[x],
            work: None,
            check: check_row[x],
        })
        .collect();
    Ok(MacrotileGrid {
        level: n,
        params: params.clone(),
        time: 0,
        phase: 0,
        agent: Agent {
            position: 0,
            state: AgentState::Ready,
        },
        cells,
    })
}

impl MacrotileGrid {
    pub fn width(&self) -> usize {
        self.cells.len()
    }

    pub fn info_row(&self) -> Vec<Glyph> {
        self.cells.iter().map(|c| c.info).collect()
    }

    pub fn info_text(&self) -> String {
        self.cells.iter().map(|c| c.info.to_char()).collect()
    }

    pub fn lmail_text(&self) -> String {
        self.cells
            .iter()
            .map(|c| c.lmail.map_or('.', Glyph::to_char))
            .collect()
    }

    pub fn rmail_text(&self) -> String {
        self.cells
            .iter()
            .map(|c| c.rmail.map_or('.', Glyph::to_char))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Grey-level PGM with one row per field, a last row marking the agent,
    /// and one column per tile.
    pub fn heatmap_pgm(&self) -> Result<Vec<u8>> {
        let glyph = |g: Option<Glyph>| g.map_or(0u8, |g| 64 + 60 * g.index());
        let b = self.width();
        let mut pixels = Vec::with_capacity(10 * b);
        let max_addr = b.max(2) as u64 - 1;
        for field in 0..9 {
            for c in &self.cells {
                let v = match field {
                    0 => (c.level.len() as u64 * 255 / u64::from(self.level + 1).max(1)).min(255)
                        as u8,
                    1 => (c.addr.min(max_addr) * 255 / max_addr) as u8,
                    2 => (c.age * 255 / self.params.dims(self.level)?.1.max(1)).min(255) as u8,
                    3 => glyph(Some(c.info)),
                    4 => glyph(c.lmail),
                    5 => glyph(c.rmail),
                    6 => glyph(Some(c.prog)),
                    7 => c.work.as_ref().map_or(0, |_| 255),
                    _ => c.check * 255,
                };
                pixels.push(v);
            }
        }
        pixels.extend((0..b).map(|x| if x == self.agent.position { 255 } else { 0 }));
        let mut out = Cursor::new(Vec::new());
        PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(&pixels, b as u32, 10, ExtendedColorType::L8)?;
        Ok(out.into_inner())
    }
}
