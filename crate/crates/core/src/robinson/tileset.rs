use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Alphabet, Pattern, SftSpec, Sym};

/// Version tag of the frozen tile family.
pub const TILESET_VERSION: &str = "robinson-56-v1";

const FIXTURE: &str = include_str!("../../fixtures/robinson-56-v1.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TileKind {
    Cross,
    HorizontalArm,
    VerticalArm,
}

impl TileKind {
    fn letter(self) -> char {
        match self {
            TileKind::Cross => 'C',
            TileKind::HorizontalArm => 'H',
            TileKind::VerticalArm => 'V',
        }
    }
}

/// One edge label: the arrow crossing the edge and, when the edge lies on
/// the side of a square, the offset and run direction of that side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub arm: char,
    pub side: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edges {
    #[serde(rename = "N")]
    pub north: Edge,
    #[serde(rename = "E")]
    pub east: Edge,
    #[serde(rename = "S")]
    pub south: Edge,
    #[serde(rename = "W")]
    pub west: Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobinsonTile {
    pub id: usize,
    pub kind: TileKind,
    pub parity: [u8; 2],
    pub edges: Edges,
}

impl RobinsonTile {
    /// Letter name used in the spec alphabet, e.g. `C00` or `V41`.
    pub fn name(&self) -> String {
        format!("{}{:02}", self.kind.letter(), self.id)
    }

    /// `other` may sit immediately east of `self`.
    pub fn matches_east(&self, other: &RobinsonTile) -> bool {
        self.edges.east == other.edges.west
            && self.parity[0] != other.parity[0]
            && self.parity[1] == other.parity[1]
    }

    /// `other` may sit immediately north of `self`.
    pub fn matches_north(&self, other: &RobinsonTile) -> bool {
        self.edges.north == other.edges.south
            && self.parity[1] != other.parity[1]
            && self.parity[0] == other.parity[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilesetDocument {
    pub version: String,
    pub horizontal_pairs: usize,
    pub vertical_pairs: usize,
    pub tiles: Vec<RobinsonTile>,
}

/// The tile family together with its domino spec and cross letters.
#[derive(Clone, Debug)]
pub struct RobinsonSet {
    pub tiles: Vec<RobinsonTile>,
    pub spec: SftSpec,
    pub crosses: Vec<Sym>,
}

impl RobinsonSet {
    pub fn is_cross(&self, s: Sym) -> bool {
        self.tiles
            .get(s as usize)
            .is_some_and(|t| t.kind == TileKind::Cross)
    }
}

/// The frozen 56-tile family.
pub fn robinson_tiles() -> Vec<RobinsonTile> {
    let doc: TilesetDocument =
        serde_json::from_str(FIXTURE).expect("embedded tileset fixture parses");
    doc.tiles
}

/// Domino spec of the frozen tile family plus its cross letters.
pub fn robinson_set() -> RobinsonSet {
    tileset_from_tiles(robinson_tiles()).expect("embedded tileset is consistent")
}

/// Domino spec of the frozen tile family.
pub fn robinson_tileset() -> SftSpec {
    robinson_set().spec
}

/// Builds the domino spec of an arbitrary tile list (ids must be `0..n`).
pub fn tileset_from_tiles(tiles: Vec<RobinsonTile>) -> Result<RobinsonSet> {
    if tiles.is_empty() {
        return Err(Error::InvalidSpec("empty tileset".into()));
    }
    if tiles.iter().enumerate().any(|(i, t)| t.id != i) {
        return Err(Error::InvalidSpec("tile ids must be 0..n in order".into()));
    }
    let alphabet = Alphabet::new(tiles.iter().map(RobinsonTile::name))?;
    let mut forbidden = Vec::new();
    for (i, a) in tiles.iter().enumerate() {
        for (j, b) in tiles.iter().enumerate() {
            let (i, j) = (i as Sym, j as Sym);
            if !a.matches_east(b) {
                forbidden.push(Pattern::new(2, [((0, 0), i), ((1, 0), j)])?);
            }
            if !a.matches_north(b) {
                forbidden.push(Pattern::new(2, [((0, 0), i), ((0, 1), j)])?);
            }
        }
    }
    let crosses = tiles
        .iter()
        .filter(|t| t.kind == TileKind::Cross)
        .map(|t| t.id as Sym)
        .collect();
    let spec = SftSpec::new(alphabet, 2, forbidden)?.with_name(TILESET_VERSION);
    Ok(RobinsonSet {
        tiles,
        spec,
        crosses,
    })
}

/// Tileset document with pair counts, as stored in the fixture.
pub fn tileset_document(tiles: &[RobinsonTile]) -> TilesetDocument {
    let count = |f: fn(&RobinsonTile, &RobinsonTile) -> bool| {
        tiles
            .iter()
            .map(|a| tiles.iter().filter(|b| f(a, b)).count())
            .sum()
    };
    TilesetDocument {
        version: TILESET_VERSION.into(),
        horizontal_pairs: count(RobinsonTile::matches_east),
        vertical_pairs: count(RobinsonTile::matches_north),
        tiles: tiles.to_vec(),
    }
}

/// 1 + 2-adic valuation of a nonzero coordinate.
fn rank(v: i64) -> u32 {
    v.trailing_zeros() + 1
}

/// Kind and arrow per edge (N, E, S, W) of the cell `(x, y)` in the
/// reference tiling, whose crosses sit where both coordinates share a rank.
fn arrows(x: i64, y: i64) -> (TileKind, [char; 4]) {
    let (a, b) = (rank(x), rank(y));
    if a == b {
        return (TileKind::Cross, ['N', 'E', 'S', 'W']);
    }
    if a < b {
        let period = 1i64 << b;
        let d = (x - period / 2).rem_euclid(period);
        let run = if d < period / 2 { 'E' } else { 'W' };
        (TileKind::HorizontalArm, ['S', run, 'N', run])
    } else {
        let period = 1i64 << a;
        let d = (y - period / 2).rem_euclid(period);
        let run = if d < period / 2 { 'N' } else { 'S' };
        (TileKind::VerticalArm, [run, 'W', run, 'E'])
    }
}

type SideMap = HashMap<(i64, i64, char), (char, char)>;

/// Side labels of every square of rank `1..=max_rank` meeting the region
/// `[x0, x0 + w) x [y0, y0 + h)`.
fn square_sides(x0: i64, y0: i64, w: i64, h: i64, max_rank: u32) -> SideMap {
    let mut sides = SideMap::new();
    for n in 1..=max_rank {
        let half = 1i64 << (n - 1);
        let period = 1i64 << (n + 1);
        let first =
            |origin: i64| (1i64 << n) - period * ((origin + period).div_euclid(period)) - period;
        let mut cx = first(x0);
        while cx < x0 + w + period {
            let mut cy = first(y0);
            while cy < y0 + h + period {
                let (left, bottom, right, top) = (cx - half, cy - half, cx + half, cy + half);
                for x in left..right {
                    let run = if x < cx { 'E' } else { 'W' };
                    sides.insert((x, bottom, 'E'), ('N', run));
                    sides.insert((x + 1, bottom, 'W'), ('N', run));
                    sides.insert((x, top, 'E'), ('S', run));
                    sides.insert((x + 1, top, 'W'), ('S', run));
                }
                for y in bottom..top {
                    let run = if y < cy { 'N' } else { 'S' };
                    sides.insert((left, y, 'N'), ('E', run));
                    sides.insert((left, y + 1, 'S'), ('E', run));
                    sides.insert((right, y, 'N'), ('W', run));
                    sides.insert((right, y + 1, 'S'), ('W', run));
                }
                cy += period;
            }
            cx += period;
        }
    }
    sides
}

fn python_side(side: Option<(char, char)>) -> String {
    match side {
        Some((a, b)) => format!("('{a}', '{b}')"),
        None => "None".into(),
    }
}

/// Regenerates the tile family by reading every distinct tile from a large
/// window of the reference tiling. Ids follow the fixture order: kind,
/// then parity, then a canonical text form of the edges.
pub fn generate_robinson_tiles() -> Vec<RobinsonTile> {
    let (x0, y0, w, h) = (1i64, 1i64, 300i64, 300i64);
    let sides = square_sides(x0, y0, w, h, 10);
    type Raw = (TileKind, [u8; 2], [(char, Option<(char, char)>); 4]);
    let mut seen: BTreeSet<(TileKind, [u8; 2], String, [(char, Option<(char, char)>); 4])> =
        BTreeSet::new();
    for x in x0 + 5..x0 + w - 5 {
        for y in y0 + 5..y0 + h - 5 {
            let (kind, arm) = arrows(x, y);
            let parity = [x.rem_euclid(2) as u8, y.rem_euclid(2) as u8];
            let edges: [(char, Option<(char, char)>); 4] = std::array::from_fn(|i| {
                let d = ['N', 'E', 'S', 'W'][i];
                (arm[i], sides.get(&(x, y, d)).copied())
            });
            let raw: Raw = (kind, parity, edges);
            // Sort key: edges listed alphabetically by direction (E, N, S, W).
            let key = [1usize, 0, 2, 3]
                .iter()
                .map(|&i| {
                    let d = ['N', 'E', 'S', 'W'][i];
                    format!("('{d}', ('{}', {}))", raw.2[i].0, python_side(raw.2[i].1))
                })
                .collect::<Vec<_>>()
                .join(", ");
            seen.insert((raw.0, raw.1, format!("({key})"), raw.2));
        }
    }
    let edge = |(arm, side): (char, Option<(char, char)>)| Edge {
        arm,
        side: side.map(|(a, b)| format!("{a}{b}")),
    };
    seen.into_iter()
        .enumerate()
        .map(|(id, (kind, parity, _, e))| RobinsonTile {
            id,
            kind,
            parity,
            edges: Edges {
                north: edge(e[0]),
                east: edge(e[1]),
                south: edge(e[2]),
                west: edge(e[3]),
            },
        })
        .collect()
}
