use num_bigint::BigUint;
use serde::Serialize;

use super::series::{big_text, count_grid, CountGrid};
use crate::error::{Error, Result};
use crate::symbolic::domino::DominoRules;
use crate::symbolic::{directional_counts, Alphabet, Pattern, SftSpec, Sym};

/// One tabulated cell of the block-simulation bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCell {
    pub k: usize,
    pub r: usize,
    #[serde(with = "big_text")]
    pub simulating: BigUint,
    #[serde(with = "big_text")]
    pub bound: BigUint,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub block_width: usize,
    pub block_height: usize,
    pub radius: usize,
    pub cells: Vec<BoundCell>,
    pub pass: bool,
    pub first_violation: Option<(usize, usize)>,
}

/// Checks `N_{kB, rT}(X) <= B T N_{k+1+2l, r+1}(Y)` for `1 <= k <= k_max`,
/// `1 <= r <= r_max`, reading `X` counts from `x` and `Y` counts from `y`.
pub fn verify_simulation_bound(
    x: &CountGrid,
    y: &CountGrid,
    block_width: usize,
    block_height: usize,
    radius: usize,
    k_max: usize,
    r_max: usize,
) -> Result<SimulationReport> {
    let x_count = |k: usize, r: usize| {
        x.get(k, r)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("simulating grid lacks cell ({k}, {r})")))
    };
    bound_report(x_count, y, block_width, block_height, radius, k_max, r_max)
}

/// Builds the block substitution of `y` and checks the bound, counting
/// `X` only on the `kB x rT` rectangles it reads, with margin `max(B, T)`.
pub fn verify_block_substitution(
    y: &SftSpec,
    block_width: usize,
    block_height: usize,
    radius: usize,
    k_max: usize,
    r_max: usize,
) -> Result<SimulationReport> {
    let x = block_substitution(y, block_width, block_height, radius)?;
    let margin = block_width.max(block_height);
    let y_grid = count_grid(y, k_max + 1 + 2 * radius, r_max + 1, 0)?;
    let x_count = |k: usize, r: usize| directional_counts(&x, k, r, margin);
    bound_report(
        x_count,
        &y_grid,
        block_width,
        block_height,
        radius,
        k_max,
        r_max,
    )
}

fn bound_report(
    x_count: impl Fn(usize, usize) -> Result<BigUint>,
    y: &CountGrid,
    block_width: usize,
    block_height: usize,
    radius: usize,
    k_max: usize,
    r_max: usize,
) -> Result<SimulationReport> {
    if block_width == 0 || block_height == 0 {
        return Err(Error::InvalidInput("block sizes must be >= 1".into()));
    }
    let factor = BigUint::from(block_width * block_height);
    let mut cells = Vec::with_capacity(k_max * r_max);
    for k in 1..=k_max {
        for r in 1..=r_max {
            let simulating = x_count(k * block_width, r * block_height)?;
            let (yk, yr) = (k + 1 + 2 * radius, r + 1);
            let simulated = y.get(yk, yr).ok_or_else(|| {
                Error::InvalidInput(format!("simulated grid lacks cell ({yk}, {yr})"))
            })?;
            let bound = &factor * simulated;
            let pass = simulating <= bound;
            cells.push(BoundCell {
                k,
                r,
                simulating,
                bound,
                pass,
            });
        }
    }
    let first_violation = cells.iter().find(|c| !c.pass).map(|c| (c.k, c.r));
    Ok(SimulationReport {
        block_width,
        block_height,
        radius,
        pass: first_violation.is_none(),
        first_violation,
        cells,
    })
}

/// Exact `B x T` block substitution of a 2D domino spec `Y`. With radius 0
/// the letter `(y, i, j)` marks cell `(i, j)` of a block coding `y`; with
/// radius 1 each letter also carries the letter of the right neighbour block.
pub fn block_substitution(
    y: &SftSpec,
    block_width: usize,
    block_height: usize,
    radius: usize,
) -> Result<SftSpec> {
    if block_width == 0 || block_height == 0 || radius > 1 {
        return Err(Error::InvalidInput(
            "blocks must be nonempty and the radius 0 or 1".into(),
        ));
    }
    let dom = DominoRules::from_spec(y, "block substitution")?;
    let n = y.alphabet().len();
    let rights: Vec<Option<usize>> = if radius == 0 {
        vec![None]
    } else {
        (0..n).map(Some).collect()
    };
    let mut letters = Vec::new();
    let mut names = Vec::new();
    for a in 0..n {
        for &right in &rights {
            for j in 0..block_height {
                for i in 0..block_width {
                    let tag = match right {
                        Some(b) => format!(
                            "{}>{}",
                            y.alphabet().name(a as Sym),
                            y.alphabet().name(b as Sym)
                        ),
                        None => y.alphabet().name(a as Sym).to_string(),
                    };
                    names.push(format!("{tag}@{i},{j}"));
                    letters.push((a, right, i, j));
                }
            }
        }
    }
    if letters.len() > Sym::MAX as usize {
        return Err(Error::Budget("block alphabet too large".into()));
    }
    let alphabet = Alphabet::new(names)?;
    let good_letter = |&(a, right, _, _): &(usize, Option<usize>, usize, usize)| {
        dom.letters[a] && right.is_none_or(|b| dom.letters[b] && dom.horizontal[a][b])
    };
    let h_ok = |p: &(usize, Option<usize>, usize, usize),
                q: &(usize, Option<usize>, usize, usize)| {
        if p.3 != q.3 {
            return false;
        }
        if p.2 + 1 < block_width {
            q.2 == p.2 + 1 && q.0 == p.0 && q.1 == p.1
        } else {
            q.2 == 0 && dom.horizontal[p.0][q.0] && p.1.is_none_or(|b| b == q.0)
        }
    };
    let v_ok = |p: &(usize, Option<usize>, usize, usize),
                q: &(usize, Option<usize>, usize, usize)| {
        if p.2 != q.2 {
            return false;
        }
        if p.3 + 1 < block_height {
            q.3 == p.3 + 1 && q.0 == p.0 && q.1 == p.1
        } else {
            q.3 == 0
                && dom.vertical[p.0][q.0]
                && match (p.1, q.1) {
                    (Some(b), Some(c)) => dom.vertical[b][c],
                    _ => true,
                }
        }
    };
    let mut forbidden = Vec::new();
    for (s, p) in letters.iter().enumerate() {
        if !good_letter(p) {
            forbidden.push(Pattern::new(2, [((0, 0), s as Sym)])?);
            continue;
        }
        for (t, q) in letters.iter().enumerate() {
            if !good_letter(q) {
                continue;
            }
            if !h_ok(p, q) {
                forbidden.push(Pattern::new(2, [((0, 0), s as Sym), ((1, 0), t as Sym)])?);
            }
            if !v_ok(p, q) {
                forbidden.push(Pattern::new(2, [((0, 0), s as Sym), ((0, 1), t as Sym)])?);
            }
        }
    }
    let label = y.name().unwrap_or("spec");
    Ok(SftSpec::new(alphabet, 2, forbidden)?.with_name(format!(
        "{label}-blocks-{block_width}x{block_height}-r{radius}"
    )))
}
