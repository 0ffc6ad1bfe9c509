use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::entropy::{big_text, log2_big};
use crate::error::{Error, Result};

/// Growth constants of the level schedule `B(n) = c1 * 3^n`,
/// `T(n) = c2 * B(n)`, with an optional table of alphabet sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    pub c1: u64,
    pub c2: u64,
    /// `|A(n)|` by level; missing levels use [`ScheduleParams::default_alphabet_size`].
    #[serde(default, with = "big_map")]
    pub alphabet_sizes: BTreeMap<u32, BigUint>,
}

impl ScheduleParams {
    pub fn new(c1: u64, c2: u64) -> Result<Self> {
        if c1 == 0 || c2 == 0 {
            return Err(Error::InvalidInput("c1 and c2 must be positive".into()));
        }
        Ok(ScheduleParams {
            c1,
            c2,
            alphabet_sizes: BTreeMap::new(),
        })
    }

    pub fn with_alphabet_size(mut self, n: u32, size: BigUint) -> Self {
        self.alphabet_sizes.insert(n, size);
        self
    }

    pub fn width(&self, n: u32) -> BigUint {
        BigUint::from(self.c1) * BigUint::from(3u32).pow(n)
    }

    pub fn height(&self, n: u32) -> BigUint {
        self.width(n) * self.c2
    }

    /// Width and height as machine integers, for levels small enough to simulate.
    pub fn dims(&self, n: u32) -> Result<(u64, u64)> {
        let too_big = || Error::Budget(format!("level {n} dimensions exceed 64 bits"));
        Ok((
            self.width(n).to_u64().ok_or_else(too_big)?,
            self.height(n).to_u64().ok_or_else(too_big)?,
        ))
    }

    /// `n * B(n) * T(n)`: the order of the alphabet when every field is
    /// bounded by the coordinates.
    pub fn default_alphabet_size(&self, n: u32) -> BigUint {
        self.width(n) * self.height(n) * n
    }

    pub fn alphabet_size(&self, n: u32) -> BigUint {
        self.alphabet_sizes
            .get(&n)
            .cloned()
            .unwrap_or_else(|| self.default_alphabet_size(n))
    }
}

mod big_map {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u32, BigUint>, s: S) -> Result<S::Ok, S::Error> {
        let text: BTreeMap<u32, String> = m.iter().map(|(&k, v)| (k, v.to_string())).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<u32, BigUint>, D::Error> {
        let text = BTreeMap::<u32, String>::deserialize(d)?;
        text.into_iter()
            .map(|(k, v)| v.parse().map(|v| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// The four restrictions evaluated at one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub n: u32,
    #[serde(with = "big_text")]
    pub width: BigUint,
    #[serde(with = "big_text")]
    pub height: BigUint,
    pub log2_alphabet: f64,
    /// `log2 |A(n)| <= B(n)`.
    pub representable: bool,
    /// Tripling `c1` n times reproduces `B(n)` within the quadratic step bound.
    pub computable: bool,
    pub computation_steps: u64,
    pub odd: bool,
    /// `B(n) >= n^2`.
    pub dominates: bool,
}

impl LevelCheck {
    pub fn passes(&self) -> bool {
        self.representable && self.computable && self.odd && self.dominates
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub passes: bool,
    pub failing_levels: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub c1: u64,
    pub c2: u64,
    pub n_max: u32,
    pub levels: Vec<LevelCheck>,
    pub checks: Vec<CheckSummary>,
    pub increasing: bool,
    pub all_pass: bool,
}

impl ScheduleReport {
    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Steps of a tape machine writing `B(n)` and `T(n)` in binary from `1^n`:
/// one sweep per tripling and one for the final product.
pub fn binary_write_steps(params: &ScheduleParams, n: u32) -> u64 {
    let mut steps = BigUint::from(params.c1).bits();
    let mut b = BigUint::from(params.c1);
    for _ in 0..n {
        b *= 3u32;
        steps += 2 * b.bits();
    }
    steps + 2 * (b * params.c2).bits()
}

fn computable(params: &ScheduleParams, n: u32) -> (bool, u64) {
    let mut b = BigUint::from(params.c1);
    for _ in 0..n {
        b *= 3u32;
    }
    let steps = binary_write_steps(params, n);
    let base = u64::from(n) + BigUint::from(params.c1).bits() + BigUint::from(params.c2).bits();
    (b == params.width(n) && steps <= 4 * base * base, steps)
}

/// Evaluates every restriction for `1 <= n <= n_max`.
pub fn validate_schedule(params: &ScheduleParams, n_max: u32) -> Result<ScheduleReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    if params.c1 == 0 || params.c2 == 0 {
        return Err(Error::InvalidInput("c1 and c2 must be positive".into()));
    }
    let levels: Vec<LevelCheck> = (1..=n_max)
        .map(|n| {
            let width = params.width(n);
            let height = params.height(n);
            let log2_alphabet = log2_big(&params.alphabet_size(n));
            let (computable, computation_steps) = computable(params, n);
            LevelCheck {
                n,
                representable: log2_alphabet <= width_f64(&width),
                computable,
                computation_steps,
                odd: width.bit(0),
                dominates: width >= BigUint::from(n) * n,
                log2_alphabet,
                width,
                height,
            }
        })
        .collect();
    let summary = |name: &str, f: fn(&LevelCheck) -> bool| {
        let failing_levels: Vec<u32> = levels.iter().filter(|l| !f(l)).map(|l| l.n).collect();
        CheckSummary {
            name: name.into(),
            passes: failing_levels.is_empty(),
            failing_levels,
        }
    };
    let checks = vec![
        summary("representable", |l| l.representable),
        summary("computable", |l| l.computable),
        summary("odd", |l| l.odd),
        summary("dominates", |l| l.dominates),
    ];
    let increasing = levels.windows(2).all(|w| w[0].width < w[1].width)
        && levels.iter().all(|l| l.height > BigUint::one());
    let all_pass = checks.iter().all(|c| c.passes) && increasing;
    Ok(ScheduleReport {
        c1: params.c1,
        c2: params.c2,
        n_max,
        levels,
        checks,
        increasing,
        all_pass,
    })
}

fn width_f64(width: &BigUint) -> f64 {
    width.to_f64().unwrap_or(f64::INFINITY)
}
