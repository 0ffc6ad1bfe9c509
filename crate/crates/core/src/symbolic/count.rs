//! Exact counting and enumeration of locally admissible patterns.
//!
//! A window is inflated by the margin into a rectangle `R` that is scanned
//! cell by cell in row-major order. The scan state is the profile of the
//! last `L` scanned cells, where `L` is the largest look-back any
//! forbidden pattern needs when its row-major last cell is the current
//! one. Without margin each window pattern corresponds to one path of
//! profiles; with a margin the hidden cells are projected away by tracking
//! sets of profiles (subset construction), which keeps the count exact.

use std::collections::BTreeMap;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};

use super::alphabet::Sym;
use super::pattern::{Pattern, RectWindow};
use super::spec::SftSpec;
use crate::error::{Error, Result};

const PAD: Sym = Sym::MAX;

/// Counter arithmetic with overflow detection on the native path.
trait Tally: Clone {
    fn one() -> Self;
    /// Adds `other`; returns false on overflow.
    fn add(&mut self, other: &Self) -> bool;
    fn zero() -> Self;
    fn into_big(self) -> BigUint;
}

impl Tally for u64 {
    fn one() -> Self {
        1
    }
    fn zero() -> Self {
        0
    }
    fn add(&mut self, other: &Self) -> bool {
        match self.checked_add(*other) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Tally for BigUint {
    fn one() -> Self {
        One::one()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&mut self, other: &Self) -> bool {
        *self += other;
        true
    }
    fn into_big(self) -> BigUint {
        self
    }
}

/// Profile encodings: packed into a `u128` when it fits, boxed otherwise.
trait Codec {
    type Key: Clone + Eq + Hash + Ord;
    fn initial(&self) -> Self::Key;
    /// Symbol scanned `back` cells before the current one (`back >= 1`).
    fn get(&self, key: &Self::Key, back: usize) -> Sym;
    fn push(&self, key: &Self::Key, s: Sym) -> Self::Key;
}

struct Packed {
    bits: u32,
    sym_mask: u128,
    full_mask: u128,
}

impl Packed {
    fn new(alphabet: usize, len: usize) -> Option<Self> {
        let bits = usize::BITS - alphabet.leading_zeros();
        let total = bits as usize * len;
        if total > 128 {
            return None;
        }
        let full_mask = if total == 128 {
            u128::MAX
        } else {
            (1u128 << total) - 1
        };
        Some(Packed {
            bits,
            sym_mask: (1u128 << bits) - 1,
            full_mask,
        })
    }
}

impl Codec for Packed {
    type Key = u128;
    fn initial(&self) -> u128 {
        self.full_mask
    }
    fn get(&self, key: &u128, back: usize) -> Sym {
        let v = (key >> (self.bits as usize * (back - 1))) & self.sym_mask;
        if v == self.sym_mask {
            PAD
        } else {
            v as Sym
        }
    }
    fn push(&self, key: &u128, s: Sym) -> u128 {
        if self.full_mask == 0 {
            return 0;
        }
        ((key << self.bits) | s as u128) & self.full_mask
    }
}

struct Boxed {
    len: usize,
}

impl Codec for Boxed {
    type Key = Box<[Sym]>;
    fn initial(&self) -> Box<[Sym]> {
        vec![PAD; self.len].into_boxed_slice()
    }
    fn get(&self, key: &Box<[Sym]>, back: usize) -> Sym {
        key[self.len - back]
    }
    fn push(&self, key: &Box<[Sym]>, s: Sym) -> Box<[Sym]> {
        let mut v = Vec::with_capacity(self.len);
        if self.len > 0 {
            v.extend_from_slice(&key[1..]);
            v.push(s);
        }
        v.into_boxed_slice()
    }
}

enum Table {
    Pair { n: usize, forbidden: Vec<bool> },
    Set(FxHashSet<Vec<Sym>>),
}

struct Check {
    table: usize,
    /// Look-backs of the pattern cells except the last (which is the
    /// current cell), in row-major order.
    backs: Vec<usize>,
}

/// Precomputed scan of the inflated rectangle.
pub(crate) struct Layout {
    width: usize,
    height: usize,
    margin: usize,
    profile_len: usize,
    observed: Vec<bool>,
    allowed: Vec<Sym>,
    checks: Vec<Vec<Check>>,
    tables: Vec<Table>,
    alphabet: usize,
}

impl Layout {
    pub(crate) fn new(spec: &SftSpec, window: &RectWindow, margin: usize) -> Result<Layout> {
        if window.dimension != spec.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "{}D window for a {}D spec",
                window.dimension,
                spec.dimension()
            )));
        }
        let width = window.width() + 2 * margin;
        let height = if spec.dimension() == 1 {
            1
        } else {
            window.height() + 2 * margin
        };
        if width.saturating_mul(height) > 1 << 22 {
            return Err(Error::Budget(format!(
                "rectangle {width}x{height} too large"
            )));
        }
        let n_cells = width * height;
        let alphabet = spec.alphabet().len();

        let mut single = vec![false; alphabet];
        let mut shapes: BTreeMap<Vec<(i32, i32)>, Vec<Vec<Sym>>> = BTreeMap::new();
        for p in spec.forbidden() {
            if p.len() == 1 {
                single[p.cells()[0].1 as usize] = true;
                continue;
            }
            let support = p.cells().iter().map(|&(c, _)| c).collect();
            shapes
                .entry(support)
                .or_default()
                .push(p.symbols().collect());
        }
        let allowed: Vec<Sym> = (0..alphabet as Sym)
            .filter(|&s| !single[s as usize])
            .collect();

        let mut tables = Vec::new();
        let mut checks: Vec<Vec<Check>> = (0..n_cells).map(|_| Vec::new()).collect();
        let mut profile_len = 0;
        for (support, words) in shapes {
            let table = if support.len() == 2 {
                let mut forbidden = vec![false; alphabet * alphabet];
                for w in &words {
                    forbidden[w[0] as usize * alphabet + w[1] as usize] = true;
                }
                Table::Pair {
                    n: alphabet,
                    forbidden,
                }
            } else {
                Table::Set(words.into_iter().collect())
            };
            let id = tables.len();
            tables.push(table);
            let &(lx, ly) = support.last().expect("nonempty");
            let max_x = support.iter().map(|c| c.0).max().expect("nonempty");
            let max_y = ly;
            if max_x as usize >= width || max_y as usize >= height {
                continue;
            }
            let backs: Vec<usize> = support[..support.len() - 1]
                .iter()
                .map(|&(dx, dy)| ((ly - dy) as usize) * width + lx as usize - dx as usize)
                .collect();
            profile_len = profile_len.max(backs.iter().copied().max().unwrap_or(0));
            for cy in ly as usize..height {
                for cx in lx as usize..=(width - 1 - (max_x - lx) as usize) {
                    checks[cy * width + cx].push(Check {
                        table: id,
                        backs: backs.clone(),
                    });
                }
            }
        }

        let mut observed = vec![false; n_cells];
        let (wx, wy) = (
            window.width(),
            if spec.dimension() == 1 {
                1
            } else {
                window.height()
            },
        );
        let oy = if spec.dimension() == 1 { 0 } else { margin };
        for y in 0..wy {
            for x in 0..wx {
                observed[(y + oy) * width + x + margin] = true;
            }
        }
        Ok(Layout {
            width,
            height,
            margin,
            profile_len,
            observed,
            allowed,
            checks,
            tables,
            alphabet,
        })
    }

    fn n_cells(&self) -> usize {
        self.width * self.height
    }

    fn admissible<C: Codec>(&self, codec: &C, key: &C::Key, cell: usize, s: Sym) -> bool {
        for check in &self.checks[cell] {
            match &self.tables[check.table] {
                Table::Pair { n, forbidden } => {
                    let a = codec.get(key, check.backs[0]);
                    if forbidden[a as usize * n + s as usize] {
                        return false;
                    }
                }
                Table::Set(set) => {
                    let mut buf = [0 as Sym; 16];
                    let k = check.backs.len() + 1;
                    let hit = if k <= 16 {
                        for (i, &b) in check.backs.iter().enumerate() {
                            buf[i] = codec.get(key, b);
                        }
                        buf[k - 1] = s;
                        set.contains(&buf[..k])
                    } else {
                        let mut v: Vec<Sym> =
                            check.backs.iter().map(|&b| codec.get(key, b)).collect();
                        v.push(s);
                        set.contains(&v)
                    };
                    if hit {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn successors<'a, C: Codec>(
        &'a self,
        codec: &'a C,
        key: &'a C::Key,
        cell: usize,
    ) -> impl Iterator<Item = (Sym, C::Key)> + 'a {
        self.allowed
            .iter()
            .filter(move |&&s| self.admissible(codec, key, cell, s))
            .map(move |&s| (s, codec.push(key, s)))
    }
}

macro_rules! dispatch {
    ($layout:expr, |$codec:ident| $body:expr) => {{
        let layout: &Layout = $layout;
        match Packed::new(layout.alphabet, layout.profile_len) {
            Some(p) => {
                let $codec = &p;
                $body
            }
            None => {
                let b = Boxed {
                    len: layout.profile_len,
                };
                let $codec = &b;
                $body
            }
        }
    }};
}

/// Margin-free scan; returns the running total after every cell index in
/// `checkpoints` (sorted), or `None` on overflow.
fn scan_plain<C: Codec, N: Tally>(
    layout: &Layout,
    codec: &C,
    checkpoints: &[usize],
) -> Option<Vec<N>> {
    let mut cur: FxHashMap<C::Key, N> = FxHashMap::default();
    cur.insert(codec.initial(), N::one());
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_cp = checkpoints.iter().peekable();
    for cell in 0..layout.n_cells() {
        let mut next: FxHashMap<C::Key, N> = FxHashMap::default();
        for (key, c) in &cur {
            for (_, nk) in layout.successors(codec, key, cell) {
                if !next.entry(nk).or_insert_with(N::zero).add(c) {
                    return None;
                }
            }
        }
        cur = next;
        while next_cp.peek() == Some(&&cell) {
            next_cp.next();
            let mut total = N::zero();
            for c in cur.values() {
                if !total.add(c) {
                    return None;
                }
            }
            out.push(total);
        }
    }
    Some(out)
}

/// Subset-construction scan for windows with a margin.
fn scan_margin<C: Codec, N: Tally>(layout: &Layout, codec: &C) -> Option<N> {
    let mut cur: FxHashMap<Vec<C::Key>, N> = FxHashMap::default();
    cur.insert(vec![codec.initial()], N::one());
    for cell in 0..layout.n_cells() {
        let mut next: FxHashMap<Vec<C::Key>, N> = FxHashMap::default();
        if layout.observed[cell] {
            for (set, c) in &cur {
                let mut by_sym: BTreeMap<Sym, FxHashSet<C::Key>> = BTreeMap::new();
                for key in set {
                    for (s, nk) in layout.successors(codec, key, cell) {
                        by_sym.entry(s).or_default().insert(nk);
                    }
                }
                for (_, keys) in by_sym {
                    let mut v: Vec<C::Key> = keys.into_iter().collect();
                    v.sort_unstable();
                    if !next.entry(v).or_insert_with(N::zero).add(c) {
                        return None;
                    }
                }
            }
        } else {
            for (set, c) in &cur {
                let mut keys: FxHashSet<C::Key> = FxHashSet::default();
                for key in set {
                    for (_, nk) in layout.successors(codec, key, cell) {
                        keys.insert(nk);
                    }
                }
                if keys.is_empty() {
                    continue;
                }
                let mut v: Vec<C::Key> = keys.into_iter().collect();
                v.sort_unstable();
                if !next.entry(v).or_insert_with(N::zero).add(c) {
                    return None;
                }
            }
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    let mut total = N::zero();
    for c in cur.values() {
        if !total.add(c) {
            return None;
        }
    }
    Some(total)
}

fn run_plain(layout: &Layout, checkpoints: &[usize]) -> Vec<BigUint> {
    dispatch!(layout, |codec| {
        match scan_plain::<_, u64>(layout, codec, checkpoints) {
            Some(v) => v.into_iter().map(Tally::into_big).collect(),
            None => scan_plain::<_, BigUint>(layout, codec, checkpoints).expect("no overflow"),
        }
    })
}

fn run_margin(layout: &Layout) -> BigUint {
    dispatch!(layout, |codec| {
        match scan_margin::<_, u64>(layout, codec) {
            Some(v) => v.into_big(),
            None => scan_margin::<_, BigUint>(layout, codec).expect("no overflow"),
        }
    })
}

/// Number of patterns on `window` that extend to a pattern on the window
/// inflated by `margin` cells on every side (1D: left and right) avoiding
/// every forbidden pattern. Exact; switches to big integers on overflow.
pub fn count_patterns(spec: &SftSpec, window: &RectWindow, margin: usize) -> Result<BigUint> {
    let layout = Layout::new(spec, window, margin)?;
    if margin == 0 {
        let last = layout.n_cells() - 1;
        Ok(run_plain(&layout, &[last]).pop().expect("one checkpoint"))
    } else {
        Ok(run_margin(&layout))
    }
}

/// Margin-free counts of 1D words of every length `1..=max_len`.
pub fn count_prefixes_1d(spec: &SftSpec, max_len: usize) -> Result<Vec<BigUint>> {
    let window = RectWindow::new(1, (0, 0), (max_len as u32, 1))?;
    let layout = Layout::new(spec, &window, 0)?;
    let cps: Vec<usize> = (0..max_len).collect();
    Ok(run_plain(&layout, &cps))
}

/// Margin-free counts `N_{k,r}` of `k x r` rectangles for every
/// `r = 1..=max_rows` with the width `k` fixed.
pub fn count_row_prefixes(spec: &SftSpec, k: usize, max_rows: usize) -> Result<Vec<BigUint>> {
    let window = RectWindow::new(2, (0, 0), (k as u32, max_rows as u32))?;
    let layout = Layout::new(spec, &window, 0)?;
    let cps: Vec<usize> = (1..=max_rows).map(|r| r * k - 1).collect();
    Ok(run_plain(&layout, &cps))
}

/// Exact count on the `k x r` rectangle `[0,k) x [0,r)`.
pub fn directional_counts(spec: &SftSpec, k: usize, r: usize, margin: usize) -> Result<BigUint> {
    if spec.dimension() != 2 {
        return Err(Error::DimensionMismatch(
            "directional counts need a 2D spec".into(),
        ));
    }
    count_patterns(
        spec,
        &RectWindow::new(2, (0, 0), (k as u32, r as u32))?,
        margin,
    )
}

/// Lattice direction for traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    E1,
    E2,
}

/// Number of trace words of length `n` over width-`k` strips: along `e2`
/// the strip is `k` wide and `n` tall, along `e1` it is `n` wide and `k` tall.
pub fn trace_patterns(
    spec: &SftSpec,
    direction: Direction,
    k: usize,
    n: usize,
    margin: usize,
) -> Result<BigUint> {
    if spec.dimension() != 2 {
        return Err(Error::DimensionMismatch("traces need a 2D spec".into()));
    }
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput(
            "trace width and length must be >= 1".into(),
        ));
    }
    let (w, h) = match direction {
        Direction::E2 => (k, n),
        Direction::E1 => (n, k),
    };
    count_patterns(
        spec,
        &RectWindow::new(2, (0, 0), (w as u32, h as u32))?,
        margin,
    )
}

fn to_pattern(layout: &Layout, window: &RectWindow, dim: u8, syms: &[Sym]) -> Pattern {
    let mut cells = Vec::with_capacity(window.area());
    let oy = if dim == 1 { 0 } else { layout.margin };
    let mut i = 0;
    for cell in 0..layout.n_cells() {
        if layout.observed[cell] {
            let x = (cell % layout.width - layout.margin) as i32 + window.origin.0;
            let y = (cell / layout.width - oy) as i32 + window.origin.1;
            cells.push(((x, y), syms[i]));
            i += 1;
        }
    }
    Pattern::new(dim, cells).expect("distinct cells")
}

fn enumerate_plain<C: Codec>(layout: &Layout, codec: &C, limit: usize) -> Result<Vec<Vec<Sym>>> {
    let n = layout.n_cells();
    let mut layers: Vec<FxHashSet<C::Key>> = Vec::with_capacity(n + 1);
    layers.push(std::iter::once(codec.initial()).collect());
    for cell in 0..n {
        let mut next = FxHashSet::default();
        for key in &layers[cell] {
            for (_, nk) in layout.successors(codec, key, cell) {
                next.insert(nk);
            }
        }
        layers.push(next);
    }
    for cell in (0..n).rev() {
        let alive = std::mem::take(&mut layers[cell + 1]);
        layers[cell].retain(|key| {
            layout
                .successors(codec, key, cell)
                .any(|(_, nk)| alive.contains(&nk))
        });
        layers[cell + 1] = alive;
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    let start = codec.initial();
    if layers[0].contains(&start) {
        dfs_plain(
            layout, codec, &layers, 0, &start, &mut word, &mut out, limit,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_plain<C: Codec>(
    layout: &Layout,
    codec: &C,
    alive: &[FxHashSet<C::Key>],
    cell: usize,
    key: &C::Key,
    word: &mut Vec<Sym>,
    out: &mut Vec<Vec<Sym>>,
    limit: usize,
) -> Result<()> {
    if cell == layout.n_cells() {
        if out.len() >= limit {
            return Err(Error::Budget(format!("more than {limit} patterns")));
        }
        out.push(word.clone());
        return Ok(());
    }
    for (s, nk) in layout.successors(codec, key, cell) {
        if alive[cell + 1].contains(&nk) {
            word.push(s);
            dfs_plain(layout, codec, alive, cell + 1, &nk, word, out, limit)?;
            word.pop();
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dfs_margin<C: Codec>(
    layout: &Layout,
    codec: &C,
    cell: usize,
    set: Vec<C::Key>,
    word: &mut Vec<Sym>,
    out: &mut Vec<Vec<Sym>>,
    limit: usize,
) -> Result<()> {
    if cell == layout.n_cells() {
        if out.len() >= limit {
            return Err(Error::Budget(format!("more than {limit} patterns")));
        }
        out.push(word.clone());
        return Ok(());
    }
    if layout.observed[cell] {
        let mut by_sym: BTreeMap<Sym, FxHashSet<C::Key>> = BTreeMap::new();
        for key in &set {
            for (s, nk) in layout.successors(codec, key, cell) {
                by_sym.entry(s).or_default().insert(nk);
            }
        }
        for (s, keys) in by_sym {
            word.push(s);
            dfs_margin(
                layout,
                codec,
                cell + 1,
                keys.into_iter().collect(),
                word,
                out,
                limit,
            )?;
            word.pop();
        }
    } else {
        let mut keys: FxHashSet<C::Key> = FxHashSet::default();
        for key in &set {
            for (_, nk) in layout.successors(codec, key, cell) {
                keys.insert(nk);
            }
        }
        if !keys.is_empty() {
            dfs_margin(
                layout,
                codec,
                cell + 1,
                keys.into_iter().collect(),
                word,
                out,
                limit,
            )?;
        }
    }
    Ok(())
}

/// All patterns counted by [`count_patterns`], in lexicographic order of
/// their row-major symbol sequence. Fails with a budget error past `limit`.
pub fn enumerate_patterns_limited(
    spec: &SftSpec,
    window: &RectWindow,
    margin: usize,
    limit: usize,
) -> Result<Vec<Pattern>> {
    let layout = Layout::new(spec, window, margin)?;
    let words = if margin == 0 {
        dispatch!(&layout, |codec| enumerate_plain(&layout, codec, limit))?
    } else {
        dispatch!(&layout, |codec| {
            let mut out = Vec::new();
            let mut word = Vec::new();
            dfs_margin(
                &layout,
                codec,
                0,
                vec![codec.initial()],
                &mut word,
                &mut out,
                limit,
            )
            .map(|_| out)
        })?
    };
    Ok(words
        .iter()
        .map(|w| to_pattern(&layout, window, spec.dimension(), w))
        .collect())
}

/// Default enumeration cap.
pub const ENUMERATION_LIMIT: usize = 2_000_000;

pub fn enumerate_patterns(
    spec: &SftSpec,
    window: &RectWindow,
    margin: usize,
) -> Result<Vec<Pattern>> {
    enumerate_patterns_limited(spec, window, margin, ENUMERATION_LIMIT)
}
