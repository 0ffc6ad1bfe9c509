use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Sym};
use crate::error::{Error, Result};

/// Integer lattice cell `(x, y)`; one-dimensional patterns use `y = 0`.
/// The second axis points north.
pub type Cell = (i32, i32);

fn check_dimension(dimension: u8) -> Result<()> {
    if dimension == 1 || dimension == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "dimension must be 1 or 2, got {dimension}"
        )))
    }
}

/// A finite assignment of symbols to cells, kept sorted row-major
/// (by `y`, then `x`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    dimension: u8,
    cells: Vec<(Cell, Sym)>,
}

impl Pattern {
    pub fn new(dimension: u8, cells: impl IntoIterator<Item = (Cell, Sym)>) -> Result<Self> {
        check_dimension(dimension)?;
        let mut cells: Vec<(Cell, Sym)> = cells.into_iter().collect();
        if dimension == 1 && cells.iter().any(|&((_, y), _)| y != 0) {
            return Err(Error::InvalidInput("1D pattern with nonzero y".into()));
        }
        cells.sort_by_key(|&((x, y), _)| (y, x));
        if cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("pattern assigns a cell twice".into()));
        }
        Ok(Pattern { dimension, cells })
    }

    /// 1D word placed at cells `0..len`.
    pub fn word(word: &[Sym]) -> Self {
        Pattern {
            dimension: 1,
            cells: word
                .iter()
                .enumerate()
                .map(|(i, &s)| ((i as i32, 0), s))
                .collect(),
        }
    }

    /// 2D rectangle from rows listed bottom (`y = 0`) first.
    pub fn from_rows(rows: &[Vec<Sym>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        let cells = rows.iter().enumerate().flat_map(|(y, row)| {
            row.iter()
                .enumerate()
                .map(move |(x, &s)| ((x as i32, y as i32), s))
        });
        Pattern::new(2, cells)
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn cells(&self) -> &[(Cell, Sym)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, cell: Cell) -> Option<Sym> {
        self.cells
            .binary_search_by_key(&(cell.1, cell.0), |&((x, y), _)| (y, x))
            .ok()
            .map(|i| self.cells[i].1)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        self.cells.iter().map(|&(_, s)| s)
    }

    /// `(min_x, min_y, max_x, max_y)`, or `None` for the empty pattern.
    pub fn bounds(&self) -> Option<(i32, i32, i32, i32)> {
        let mut it = self.cells.iter().map(|&(c, _)| c);
        let first = it.next()?;
        Some(it.fold(
            (first.0, first.1, first.0, first.1),
            |(a, b, c, d), (x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
        ))
    }

    pub fn translate(&self, dx: i32, dy: i32) -> Pattern {
        Pattern {
            dimension: self.dimension,
            cells: self
                .cells
                .iter()
                .map(|&((x, y), s)| ((x + dx, y + dy), s))
                .collect(),
        }
    }

    /// Translate so the smallest `x` and `y` are both zero.
    pub fn normalized(&self) -> Pattern {
        match self.bounds() {
            Some((x0, y0, _, _)) => self.translate(-x0, -y0),
            None => self.clone(),
        }
    }

    pub fn map_symbols(&self, f: impl Fn(Sym) -> Sym) -> Pattern {
        Pattern {
            dimension: self.dimension,
            cells: self.cells.iter().map(|&(c, s)| (c, f(s))).collect(),
        }
    }

    pub fn map_cells(&self, f: impl Fn(Cell) -> Cell) -> Result<Pattern> {
        Pattern::new(self.dimension, self.cells.iter().map(|&(c, s)| (f(c), s)))
    }

    /// Symbols of a 1D pattern in order of `x`.
    pub fn as_word(&self) -> Vec<Sym> {
        self.symbols().collect()
    }

    /// Rows of a rectangular pattern, bottom first.
    pub fn rows(&self) -> Vec<Vec<Sym>> {
        let Some((_, y0, _, y1)) = self.bounds() else {
            return Vec::new();
        };
        (y0..=y1)
            .map(|y| {
                self.cells
                    .iter()
                    .filter(|c| c.0 .1 == y)
                    .map(|c| c.1)
                    .collect()
            })
            .collect()
    }

    /// Text rendering: the word for 1D, rows top-first separated by `/` for 2D.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.dimension == 1 {
            alphabet.format_word(&self.as_word())
        } else {
            let mut rows = self.rows();
            rows.reverse();
            rows.iter()
                .map(|r| alphabet.format_word(r))
                .collect::<Vec<_>>()
                .join("/")
        }
    }
}

/// Axis-aligned window; `extent.1` is 1 for 1D windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectWindow {
    pub dimension: u8,
    pub origin: Cell,
    pub extent: (u32, u32),
}

impl RectWindow {
    pub fn new(dimension: u8, origin: Cell, extent: (u32, u32)) -> Result<Self> {
        check_dimension(dimension)?;
        if extent.0 == 0 || extent.1 == 0 {
            return Err(Error::InvalidInput("window extents must be >= 1".into()));
        }
        if dimension == 1 && (extent.1 != 1 || origin.1 != 0) {
            return Err(Error::InvalidInput(
                "1D window must have height 1 at y = 0".into(),
            ));
        }
        if extent.0 > 1 << 20 || extent.1 > 1 << 20 {
            return Err(Error::InvalidInput(
                "window outside addressable range".into(),
            ));
        }
        Ok(RectWindow {
            dimension,
            origin,
            extent,
        })
    }

    pub fn line(len: u32) -> Self {
        RectWindow::new(1, (0, 0), (len, 1)).expect("length must be >= 1")
    }

    pub fn rect(width: u32, height: u32) -> Self {
        RectWindow::new(2, (0, 0), (width, height)).expect("extents must be >= 1")
    }

    pub fn width(&self) -> usize {
        self.extent.0 as usize
    }

    pub fn height(&self) -> usize {
        self.extent.1 as usize
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, (x, y): Cell) -> bool {
        x >= self.origin.0
            && y >= self.origin.1
            && ((x - self.origin.0) as u32) < self.extent.0
            && ((y - self.origin.1) as u32) < self.extent.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_anchors_at_origin() {
        let p = Pattern::new(2, [((3, 5), 1), ((4, 7), 0)]).unwrap();
        let n = p.normalized();
        assert_eq!(n.cells(), &[((0, 0), 1), ((1, 2), 0)]);
        assert_eq!(n.get((1, 2)), Some(0));
        assert_eq!(n.get((1, 1)), None);
    }

    #[test]
    fn rejects_double_assignment() {
        assert!(Pattern::new(2, [((0, 0), 1), ((0, 0), 0)]).is_err());
    }

    #[test]
    fn render_2d_top_row_first() {
        let a = Alphabet::from_chars("ab").unwrap();
        let p = Pattern::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(p.render(&a), "ba/aa");
    }

    #[test]
    fn window_validation() {
        assert!(RectWindow::new(1, (0, 0), (0, 1)).is_err());
        assert!(RectWindow::new(1, (0, 0), (3, 2)).is_err());
        assert!(RectWindow::rect(2, 3).contains((1, 2)));
        assert!(!RectWindow::rect(2, 3).contains((2, 0)));
    }
}
