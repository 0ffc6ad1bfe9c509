use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::rule::CaRule;
use crate::entropy::{big_text, log2_big};
use crate::error::{Error, Result};
use crate::symbolic::Sym;

/// Exact number of distinct `k x (T + 1)` space-time blocks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnCount {
    pub k: usize,
    pub t: usize,
    #[serde(with = "big_text")]
    pub count: BigUint,
    /// `log2(count) / T`, absent for `T = 0`.
    pub bits_per_step: Option<f64>,
    /// False when the budget stopped the enumeration early; `count` is
    /// then a lower bound.
    pub complete: bool,
    pub words_examined: u64,
}

/// Central `k`-cell block of every row over `T` shrinking steps.
fn block_of(rule: &CaRule, word: &[Sym], k: usize, steps: usize, out: &mut Vec<Sym>) {
    out.clear();
    let r = rule.radius();
    let w = 2 * r + 1;
    let mut row = word.to_vec();
    let mut next = Vec::with_capacity(row.len());
    for t in 0..=steps {
        let offset = r * (steps - t);
        out.extend_from_slice(&row[offset..offset + k]);
        if t < steps {
            next.clear();
            next.extend(row.windows(w).map(|nb| rule.apply(nb)));
            std::mem::swap(&mut row, &mut next);
        }
    }
}

/// Counts distinct central blocks over all initial words of width
/// `k + 2 r T`, examining at most `budget` words in lexicographic order.
pub fn ca_column_count(rule: &CaRule, k: usize, steps: usize, budget: u64) -> Result<ColumnCount> {
    if k == 0 {
        return Err(Error::InvalidInput("column width must be >= 1".into()));
    }
    let n = rule.alphabet().len() as u64;
    let width = k + 2 * rule.radius() * steps;
    let total = (0..width).try_fold(1u64, |acc, _| acc.checked_mul(n));
    let (limit, complete) = match total {
        Some(t) if t <= budget => (t, true),
        _ => (budget, false),
    };
    // Split the word range into contiguous chunks and merge their sets.
    let chunk = (limit / 64).max(1024);
    let starts: Vec<u64> = (0..limit).step_by(chunk as usize).collect();
    let blocks: HashSet<Vec<Sym>> = starts
        .into_par_iter()
        .map(|start| {
            let mut seen = HashSet::new();
            let mut word = vec![0 as Sym; width];
            let mut block = Vec::with_capacity(k * (steps + 1));
            for index in start..(start + chunk).min(limit) {
                let mut rest = index;
                for slot in word.iter_mut().rev() {
                    *slot = (rest % n) as Sym;
                    rest /= n;
                }
                block_of(rule, &word, k, steps, &mut block);
                if !seen.contains(&block) {
                    seen.insert(block.clone());
                }
            }
            seen
        })
        .reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return b.into_iter().chain(a).collect();
            }
            a.extend(b);
            a
        });
    let count = BigUint::from(blocks.len());
    let bits_per_step = (steps > 0).then(|| log2_big(&count) / steps as f64);
    Ok(ColumnCount {
        k,
        t: steps,
        count,
        bits_per_step,
        complete,
        words_examined: limit,
    })
}
