#![allow(dead_code)]

use std::collections::BTreeSet;

use caentropy::symbolic::{Alphabet, Pattern, SftSpec, Sym};
use proptest::prelude::*;

/// Brute force: every assignment of the inflated rectangle that avoids the
/// forbidden patterns, restricted to the window and deduplicated.
pub fn brute_patterns(spec: &SftSpec, w: usize, h: usize, margin: usize) -> BTreeSet<Vec<Sym>> {
    let a = spec.alphabet().len();
    let (rw, rh, oy) = if spec.dimension() == 1 {
        (w + 2 * margin, 1, 0)
    } else {
        (w + 2 * margin, h + 2 * margin, margin)
    };
    let n = rw * rh;
    let total = a.pow(n as u32);
    let mut out = BTreeSet::new();
    for code in 0..total {
        let mut c = code;
        let mut syms = vec![0 as Sym; n];
        for s in syms.iter_mut() {
            *s = (c % a) as Sym;
            c /= a;
        }
        let cells = (0..n).map(|i| (((i % rw) as i32, (i / rw) as i32), syms[i]));
        let p = Pattern::new(spec.dimension(), cells).unwrap();
        if !spec.avoids_forbidden(&p) {
            continue;
        }
        let hh = if spec.dimension() == 1 { 1 } else { h };
        let mut word = Vec::with_capacity(w * hh);
        for y in 0..hh {
            for x in 0..w {
                word.push(syms[(y + oy) * rw + x + margin]);
            }
        }
        out.insert(word);
    }
    out
}

pub fn brute_count(spec: &SftSpec, w: usize, h: usize, margin: usize) -> usize {
    brute_patterns(spec, w, h, margin).len()
}

/// Random small spec: 2..=3 letters, 1..=3 forbidden patterns supported in
/// a box of side 2 (2D) or length 3 (1D).
pub fn arb_spec(dimension: u8) -> impl Strategy<Value = SftSpec> {
    (2usize..=3, 1usize..=3).prop_flat_map(move |(a, k)| {
        let cell = if dimension == 1 {
            (0i32..3, Just(0i32)).boxed()
        } else {
            (0i32..2, 0i32..2).boxed()
        };
        let pat = proptest::collection::vec((cell, 0..a as Sym), 1..=3);
        proptest::collection::vec(pat, k).prop_map(move |pats| {
            let forbidden = pats
                .into_iter()
                .filter_map(|cells| {
                    let mut seen = BTreeSet::new();
                    let cells: Vec<_> =
                        cells.into_iter().filter(|(c, _)| seen.insert(*c)).collect();
                    Pattern::new(dimension, cells).ok()
                })
                .collect();
            SftSpec::new(Alphabet::numeric(a).unwrap(), dimension, forbidden).unwrap()
        })
    })
}

pub fn fib(n: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        let t = a + b;
        a = b;
        b = t;
    }
    a
}

/// `v` is the length-`n` prefix of some sequence swap-equivalent to a
/// sequence starting with `alpha`: equal, or equal below some `i` after
/// which `v` repeats `alpha_i` and `alpha` repeats `v_i`.
pub fn allowed_by_swap(v: &[Sym], alpha: &[Sym]) -> bool {
    if v.len() != alpha.len() {
        return false;
    }
    if v == alpha {
        return true;
    }
    (0..v.len()).any(|i| {
        v[..i] == alpha[..i]
            && v[i + 1..].iter().all(|&s| s == alpha[i])
            && alpha[i + 1..].iter().all(|&s| s == v[i])
    })
}

/// Every sequence prefix that generates `u` under some net of depth
/// `log2 |u|` (each level read off the window, which must be constant on it).
pub fn consistent_alphas(u: &[Sym]) -> BTreeSet<Vec<Sym>> {
    let n = u.len().trailing_zeros() as usize;
    assert_eq!(1 << n, u.len());
    let mut out = BTreeSet::new();
    for code in 0u64..(1 << n) {
        // Level j takes one of the two halves of the current hole class.
        let mut hole = 0usize;
        let mut alpha = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let half = 1usize << j;
            let (k, rest) = if code >> j & 1 == 0 {
                (hole, hole + half)
            } else {
                (hole + half, hole)
            };
            let step = 2 * half;
            let letters: BTreeSet<Sym> = (k..u.len()).step_by(step).map(|c| u[c]).collect();
            if letters.len() != 1 {
                ok = false;
                break;
            }
            alpha.push(*letters.iter().next().unwrap());
            hole = rest;
        }
        if ok {
            out.insert(alpha);
        }
    }
    out
}

pub mod macrotile {
    use caentropy::macrotile::{
        feasibility, init_grid, run_schedule, Glyph, MacrotileGrid, Neighbors, NextTile,
        ScheduleOutcome, ScheduleParams,
    };
    use caentropy::symbolic::Alphabet;
    use caentropy::toeplitz::{
        build_one_net, generate_toeplitz_window, never_halts, DensityMachine, SymbolSequence,
    };

    pub const C1: u64 = 5;

    pub fn bit_machine() -> DensityMachine {
        never_halts(&["0", "1"]).unwrap()
    }

    /// First `width` letters of a Toeplitz window over `{0, 1}`.
    pub fn toeplitz_row(width: usize) -> Vec<u8> {
        let len = width.next_power_of_two();
        let depth = len.trailing_zeros() as usize;
        let alphabet = Alphabet::from_chars("01").unwrap();
        let alpha = SymbolSequence::parse(alphabet, "1011001011").unwrap();
        let net = build_one_net(&vec![0; depth.max(1)]).unwrap();
        let w = generate_toeplitz_window(&alpha, &net, len, 0).unwrap();
        w.letters[..width].iter().map(|&s| s as u8).collect()
    }

    pub fn description(n: u32, addr: u64, age: u64, prog: &str, check: u8) -> String {
        let prog = prog.chars().map(|c| if c == '1' { 1 } else { 0 }).collect();
        let tile = NextTile {
            level: n + 1,
            addr,
            age,
            prog,
            check,
        };
        tile.encode().iter().map(|g| g.to_char()).collect()
    }

    /// Program `(l, c, r) -> c` over the listed triples.
    pub fn keep_centre(triples: &[[u8; 3]]) -> String {
        triples
            .iter()
            .map(|t| format!("{}{}{}{}", t[0], t[1], t[2], t[1]))
            .collect()
    }

    /// A consistent row at level `n` with address `addr` between its neighbours.
    pub fn fixture_with(n: u32, c2: u64, addr: u64, check: Vec<u8>) -> (MacrotileGrid, Neighbors) {
        let params = ScheduleParams::new(C1, c2).unwrap();
        let own = check[0];
        let prog = keep_centre(&[[0, own, 0]]);
        let info = description(n, addr, 0, &prog, own);
        let neighbors = Neighbors {
            left: description(n, addr - 1, 0, &prog, 0),
            right: description(n, addr + 1, 0, &prog, 0),
        };
        (
            init_grid(n, &params, &info, &check, &prog).unwrap(),
            neighbors,
        )
    }

    /// The fixture at the smallest feasible `c2`.
    pub fn fixture(n: u32) -> (MacrotileGrid, Neighbors) {
        let width = (C1 * 3u64.pow(n)) as usize;
        let (probe, neighbors) = fixture_with(n, 1, 1, toeplitz_row(width));
        let c2 = feasibility(&probe, &neighbors, &bit_machine()).unwrap().c2;
        fixture_with(n, c2, 1, toeplitz_row(width))
    }

    pub fn rejected_phase(
        mut grid: MacrotileGrid,
        neighbors: &Neighbors,
        machine: &DensityMachine,
    ) -> Option<u8> {
        match run_schedule(&mut grid, neighbors, machine, u64::MAX)
            .unwrap()
            .outcome
        {
            ScheduleOutcome::Rejected { phase, .. } => Some(phase),
            _ => None,
        }
    }

    /// One mutation per field, with the phase that must reject it.
    pub fn mutations(g: &MacrotileGrid) -> Vec<(&'static str, MacrotileGrid, u8)> {
        let b = g.width();
        let mutate = |f: &dyn Fn(&mut MacrotileGrid)| {
            let mut m = g.clone();
            f(&mut m);
            m
        };
        vec![
            ("Level", mutate(&|m| m.cells[4].level = "11".into()), 2),
            ("Addr", mutate(&|m| m.cells[6].addr = 7), 3),
            ("Age", mutate(&|m| m.cells[6].age = 1), 3),
            ("Info", mutate(&|m| m.cells[0].info = Glyph::Zero), 2),
            ("Lmail", mutate(&|m| m.cells[2].lmail = Some(Glyph::One)), 1),
            (
                "Rmail",
                mutate(&|m| m.cells[9].rmail = Some(Glyph::Sharp)),
                1,
            ),
            ("Prog", mutate(&|m| m.cells[0].prog = Glyph::One), 6),
            (
                "Work",
                mutate(&|m| m.cells[b - 1].work = Some("1".into())),
                5,
            ),
            ("Check", mutate(&|m| m.cells[0].check ^= 1), 4),
        ]
    }
}
