use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::domino::DominoRules;
use crate::symbolic::{Pattern, SftSpec, Sym};

/// Border condition of a tiling search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Free,
    /// Cells `(x, y)` pinned to given letters.
    Seeded(Vec<((usize, usize), Sym)>),
}

/// A rectangular tiling, `rows[y][x]` with `y = 0` the bottom row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobinsonTiling {
    pub version: String,
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<Sym>>,
}

impl RobinsonTiling {
    pub fn get(&self, x: usize, y: usize) -> Sym {
        self.rows[y][x]
    }

    pub fn set(&mut self, x: usize, y: usize, s: Sym) {
        self.rows[y][x] = s;
    }

    pub fn to_pattern(&self) -> Pattern {
        let cells = (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .map(|(x, y)| ((x as i32, y as i32), self.get(x, y)));
        Pattern::new(2, cells).expect("rectangular tiling is a valid pattern")
    }

    /// Adjacent cell pairs `(lower/left, upper/right)` breaking the spec.
    pub fn violations(&self, spec: &SftSpec) -> Result<Vec<((usize, usize), (usize, usize))>> {
        let rules = DominoRules::from_spec(spec, "tiling validation")?;
        let mut bad = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let a = self.get(x, y);
                if !spec.alphabet().contains(a) {
                    return Err(Error::UnknownSymbol(format!("#{a}")));
                }
                if !rules.letters[a as usize] {
                    bad.push(((x, y), (x, y)));
                }
                if x + 1 < self.width && !rules.h(a, self.get(x + 1, y)) {
                    bad.push(((x, y), (x + 1, y)));
                }
                if y + 1 < self.height && !rules.v(a, self.get(x, y + 1)) {
                    bad.push(((x, y), (x, y + 1)));
                }
            }
        }
        Ok(bad)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: RobinsonTiling = serde_json::from_str(text)?;
        if t.rows.len() != t.height || t.rows.iter().any(|r| r.len() != t.width) {
            return Err(Error::InvalidInput(
                "tiling rows do not match its size".into(),
            ));
        }
        Ok(t)
    }
}

/// Result of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TilingOutcome {
    Tiled(RobinsonTiling),
    /// Exhaustive search found no admissible filling.
    Untileable,
}

struct Domains {
    words: usize,
    bits: Vec<u64>,
}

impl Domains {
    fn cell(&self, c: usize) -> &[u64] {
        &self.bits[c * self.words..(c + 1) * self.words]
    }

    fn cell_mut(&mut self, c: usize) -> &mut [u64] {
        &mut self.bits[c * self.words..(c + 1) * self.words]
    }

    fn single(&self, c: usize) -> Option<Sym> {
        let d = self.cell(c);
        let ones: u32 = d.iter().map(|w| w.count_ones()).sum();
        (ones == 1).then(|| letters(d).next().expect("one bit"))
    }
}

fn letters(set: &[u64]) -> impl Iterator<Item = Sym> + '_ {
    set.iter().enumerate().flat_map(|(w, &bits)| {
        (0..64)
            .filter(move |b| bits >> b & 1 == 1)
            .map(move |b| (w * 64 + b) as Sym)
    })
}

/// Compatibility tables as bitsets: `toward[dir][a]` is the set of letters
/// allowed in the neighbour of a cell holding `a`, for dir = E, W, N, S.
struct Supports {
    words: usize,
    toward: [Vec<Vec<u64>>; 4],
}

impl Supports {
    fn new(rules: &DominoRules) -> Self {
        let n = rules.len();
        let words = n.div_ceil(64);
        let table = |ok: &dyn Fn(usize, usize) -> bool| {
            (0..n)
                .map(|a| {
                    let mut set = vec![0u64; words];
                    for b in (0..n).filter(|&b| ok(a, b)) {
                        set[b / 64] |= 1 << (b % 64);
                    }
                    set
                })
                .collect::<Vec<_>>()
        };
        let toward = [
            table(&|a, b| rules.horizontal[a][b]),
            table(&|a, b| rules.horizontal[b][a]),
            table(&|a, b| rules.vertical[a][b]),
            table(&|a, b| rules.vertical[b][a]),
        ];
        Supports { words, toward }
    }
}

struct Grid {
    width: usize,
    height: usize,
}

impl Grid {
    /// Neighbours of `c` with the direction index from `c` to them.
    fn neighbours(&self, c: usize) -> impl Iterator<Item = (usize, usize)> {
        let (x, y, w, h) = (c % self.width, c / self.width, self.width, self.height);
        [
            (x + 1 < w).then(|| (0, c + 1)),
            (x > 0).then(|| (1, c - 1)),
            (y + 1 < h).then(|| (2, c + w)),
            (y > 0).then(|| (3, c - w)),
        ]
        .into_iter()
        .flatten()
    }
}

/// Arc-consistency propagation from the cells in `queue`; false on a wipeout.
fn propagate(grid: &Grid, sup: &Supports, dom: &mut Domains, mut queue: VecDeque<usize>) -> bool {
    let mut allowed = vec![0u64; sup.words];
    let mut queued = vec![false; grid.width * grid.height];
    queue.iter().for_each(|&c| queued[c] = true);
    while let Some(c) = queue.pop_front() {
        queued[c] = false;
        for (dir, nb) in grid.neighbours(c) {
            allowed.iter_mut().for_each(|w| *w = 0);
            for a in letters(dom.cell(c)) {
                for (w, s) in allowed.iter_mut().zip(&sup.toward[dir][a as usize]) {
                    *w |= s;
                }
            }
            let target = dom.cell_mut(nb);
            let mut changed = false;
            let mut empty = true;
            for (t, a) in target.iter_mut().zip(&allowed) {
                let next = *t & a;
                changed |= next != *t;
                empty &= next == 0;
                *t = next;
            }
            if empty {
                return false;
            }
            if changed && !queued[nb] {
                queued[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    true
}

/// Backtracking search with arc consistency on a domino spec. Branching is
/// deterministic: the first undecided cell in row-major order (bottom row
/// first), letters in ascending order. `node_limit` caps the number of
/// branching decisions.
pub fn tile_rectangle(
    spec: &SftSpec,
    width: usize,
    height: usize,
    boundary: &Boundary,
    node_limit: u64,
) -> Result<TilingOutcome> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput("tiling sides must be >= 1".into()));
    }
    let rules = DominoRules::from_spec(spec, "the tiler")?;
    let n = rules.len();
    let sup = Supports::new(&rules);
    let grid = Grid { width, height };
    let cells = width * height;
    let mut full = vec![0u64; sup.words];
    for a in (0..n).filter(|&a| rules.letters[a]) {
        full[a / 64] |= 1 << (a % 64);
    }
    let mut dom = Domains {
        words: sup.words,
        bits: full.repeat(cells),
    };
    if let Boundary::Seeded(pins) = boundary {
        for &((x, y), s) in pins {
            if x >= width || y >= height {
                return Err(Error::InvalidInput(format!(
                    "seed ({x}, {y}) outside the window"
                )));
            }
            if !spec.alphabet().contains(s) {
                return Err(Error::UnknownSymbol(format!("#{s}")));
            }
            let d = dom.cell_mut(y * width + x);
            let keep = d[s as usize / 64] & (1 << (s % 64));
            d.iter_mut().for_each(|w| *w = 0);
            d[s as usize / 64] = keep;
        }
    }
    if dom
        .bits
        .chunks(sup.words)
        .any(|d| d.iter().all(|&w| w == 0))
        || !propagate(&grid, &sup, &mut dom, (0..cells).collect())
    {
        return Ok(TilingOutcome::Untileable);
    }
    // Each frame: cell, domains before the branch, letters still to try.
    let mut stack: Vec<(usize, Vec<u64>, Vec<Sym>)> = Vec::new();
    let mut nodes = 0u64;
    loop {
        match (0..cells).find(|&c| dom.single(c).is_none()) {
            None => {
                let rows = (0..height)
                    .map(|y| {
                        (0..width)
                            .map(|x| dom.single(y * width + x).expect("decided"))
                            .collect()
                    })
                    .collect();
                let version = spec.name().unwrap_or("unnamed").to_string();
                return Ok(TilingOutcome::Tiled(RobinsonTiling {
                    version,
                    width,
                    height,
                    rows,
                }));
            }
            Some(c) => {
                let mut todo: Vec<Sym> = letters(dom.cell(c)).collect();
                todo.reverse();
                stack.push((c, dom.bits.clone(), todo));
            }
        }
        // Try letters until one propagates; backtrack when frames run dry.
        loop {
            let Some((c, saved, todo)) = stack.last_mut() else {
                return Ok(TilingOutcome::Untileable);
            };
            let Some(a) = todo.pop() else {
                stack.pop();
                continue;
            };
            nodes += 1;
            if nodes > node_limit {
                return Err(Error::Budget(format!("tiler exceeded {node_limit} nodes")));
            }
            let c = *c;
            dom.bits.copy_from_slice(saved);
            let d = dom.cell_mut(c);
            d.iter_mut().for_each(|w| *w = 0);
            d[a as usize / 64] = 1 << (a % 64);
            if propagate(&grid, &sup, &mut dom, VecDeque::from([c])) {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::stock;

    #[test]
    fn full_shift_tiles_with_zeros() {
        let spec = stock::full_shift(2, 2);
        match tile_rectangle(&spec, 3, 2, &Boundary::Free, 100).unwrap() {
            TilingOutcome::Tiled(t) => assert!(t.rows.iter().flatten().all(|&s| s == 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seeds_are_respected() {
        let spec = stock::full_shift(2, 2);
        let seeds = Boundary::Seeded(vec![((1, 1), 1)]);
        let TilingOutcome::Tiled(t) = tile_rectangle(&spec, 2, 2, &seeds, 100).unwrap() else {
            panic!()
        };
        assert_eq!(t.get(1, 1), 1);
        assert!(tile_rectangle(&spec, 0, 2, &Boundary::Free, 100).is_err());
    }
}
