use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{big_text, count_grid, log2_big};
use crate::error::{Error, Result};
use crate::symbolic::spec::{lift_pattern, MAX_FORBIDDEN};
use crate::symbolic::{enumerate_patterns_limited, Alphabet, Pattern, RectWindow, SftSpec, Sym};

/// Three-layer product of `base` with two copies of `payload`. The letter
/// `(b, p, q)` has index `b * P^2 + p * P + q` and name `(b,p,q)`. Layer 2
/// is constant along columns, layer 3 along rows, and on a cross letter of
/// the base the two payload layers agree.
pub fn compose_homogeneity_layers(
    base: &SftSpec,
    crosses: &[Sym],
    payload: &Alphabet,
) -> Result<SftSpec> {
    if payload.is_empty() {
        return Err(Error::InvalidInput("empty payload alphabet".into()));
    }
    if base.dimension() != 2 {
        return Err(Error::DimensionMismatch(
            "homogeneity layers need a 2D base".into(),
        ));
    }
    if let Some(&c) = crosses.iter().find(|&&c| !base.alphabet().contains(c)) {
        return Err(Error::UnknownSymbol(format!("cross #{c}")));
    }
    let p = payload.len();
    let nb = base.alphabet().len();
    let total = nb * p * p;
    if total > Sym::MAX as usize + 1 {
        return Err(Error::Budget("composed alphabet too large".into()));
    }
    let names = base.alphabet().symbols().iter().flat_map(|b| {
        payload.symbols().iter().flat_map(move |x| {
            payload
                .symbols()
                .iter()
                .map(move |y| format!("({b},{x},{y})"))
        })
    });
    let alphabet = Alphabet::new(names)?;
    let letter = |b: usize, x: usize, y: usize| (b * p * p + x * p + y) as Sym;
    let mut forbidden = Vec::new();
    for pat in base.forbidden() {
        lift_pattern(
            pat,
            |s, d| s * (p * p) as Sym + d as Sym,
            p * p,
            &mut forbidden,
        )?;
    }
    if forbidden.len().saturating_add(2 * total * total) > MAX_FORBIDDEN {
        return Err(Error::Budget(
            "composed spec has too many forbidden patterns".into(),
        ));
    }
    for s in 0..total {
        for t in 0..total {
            let ((x1, y1), (x2, y2)) = (((s / p) % p, s % p), ((t / p) % p, t % p));
            let cells = |other| [((0, 0), s as Sym), (other, t as Sym)];
            if x1 != x2 {
                forbidden.push(Pattern::new(2, cells((0, 1)))?);
            }
            if y1 != y2 {
                forbidden.push(Pattern::new(2, cells((1, 0)))?);
            }
        }
    }
    for &c in crosses {
        for x in 0..p {
            for y in (0..p).filter(|&y| y != x) {
                forbidden.push(Pattern::new(2, [((0, 0), letter(c as usize, x, y))])?);
            }
        }
    }
    let label = base.name().unwrap_or("base");
    Ok(SftSpec::new(alphabet, 2, forbidden)?.with_name(format!("{label}-homogeneous-{p}")))
}

/// Counts the composed spec on a `k x r` window by summing, over the base
/// patterns, `P` to the number of classes of columns and rows joined by
/// crosses.
pub fn composed_count_by_components(
    base: &SftSpec,
    crosses: &[Sym],
    payload_len: usize,
    k: usize,
    r: usize,
    limit: usize,
) -> Result<BigUint> {
    let window = RectWindow::new(2, (0, 0), (k as u32, r as u32))?;
    let patterns = enumerate_patterns_limited(base, &window, 0, limit)?;
    let mut total = BigUint::from(0u32);
    let p = BigUint::from(payload_len);
    for pat in &patterns {
        // Nodes 0..k are columns, k..k+r rows.
        let mut parent: Vec<usize> = (0..k + r).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for &((x, y), s) in pat.cells() {
            if crosses.contains(&s) {
                let (a, b) = (
                    find(&mut parent, x as usize),
                    find(&mut parent, k + y as usize),
                );
                parent[a] = b;
            }
        }
        let classes = (0..k + r).filter(|&i| find(&mut parent, i) == i).count();
        total += p.pow(classes as u32);
    }
    Ok(total)
}

/// Enumeration cap per window in [`homogeneity_growth`].
pub const GROWTH_LIMIT: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCell {
    pub k: usize,
    pub r: usize,
    #[serde(with = "big_text")]
    pub base: BigUint,
    #[serde(with = "big_text")]
    pub composed: BigUint,
    /// `log2(composed) / r`.
    pub bits_per_row: f64,
    /// `composed <= 4 k r * base`.
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub payload: usize,
    pub cells: Vec<GrowthCell>,
    /// For every `k`, `bits_per_row` never increases with `r`.
    pub nonincreasing: bool,
    pub bound_holds: bool,
}

/// Directional growth of the composed spec against its base for
/// `1 <= k <= k_max`, `1 <= r <= r_max` (margin-free counts). Composed
/// counts come from [`composed_count_by_components`], which avoids the
/// much larger product alphabet.
pub fn homogeneity_growth(
    spec: &SftSpec,
    crosses: &[Sym],
    payload: &Alphabet,
    k_max: usize,
    r_max: usize,
) -> Result<GrowthReport> {
    if payload.is_empty() {
        return Err(Error::InvalidInput("empty payload alphabet".into()));
    }
    let gb = count_grid(spec, k_max, r_max, 0)?;
    let windows: Vec<(usize, usize)> = (1..=k_max)
        .flat_map(|k| (1..=r_max).map(move |r| (k, r)))
        .collect();
    let cells = windows
        .into_par_iter()
        .map(|(k, r)| {
            let base = gb.get(k, r).expect("in range").clone();
            let composed =
                composed_count_by_components(spec, crosses, payload.len(), k, r, GROWTH_LIMIT)?;
            let within_bound = composed <= BigUint::from(4 * k * r) * &base;
            let bits_per_row = log2_big(&composed) / r as f64;
            Ok(GrowthCell {
                k,
                r,
                base,
                composed,
                bits_per_row,
                within_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nonincreasing = cells
        .windows(2)
        .all(|w| w[0].k != w[1].k || w[1].bits_per_row <= w[0].bits_per_row + 1e-12);
    let bound_holds = cells.iter().all(|c| c.within_bound);
    Ok(GrowthReport {
        payload: payload.len(),
        cells,
        nonincreasing,
        bound_holds,
    })
}
