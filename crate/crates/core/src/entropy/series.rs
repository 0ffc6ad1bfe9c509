use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{
    count_patterns, count_prefixes_1d, count_row_prefixes, directional_counts, RectWindow, SftSpec,
};

/// Largest window side accepted by the series builders.
pub const MAX_SERIES_SIDE: usize = 4096;

/// `log2(n)` for `n >= 1`; exact when `n` is a power of two.
pub fn log2_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if n.count_ones() == 1 {
        return (bits - 1) as f64;
    }
    if bits <= 64 {
        return n.to_u64().expect("fits").to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("fits") as f64;
    top.log2() + shift as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesDirection {
    Isotropic,
    E1,
    E2,
}

/// One window size: exact count and `log2(count) / normalizer`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub size: usize,
    #[serde(with = "big_text")]
    pub count: BigUint,
    pub normalizer: usize,
    pub bits: f64,
}

impl Sample {
    pub fn new(size: usize, count: BigUint, normalizer: usize) -> Self {
        let bits = log2_big(&count) / normalizer as f64;
        Sample {
            size,
            count,
            normalizer,
            bits,
        }
    }
}

/// Limit estimate from a finite series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// The last sample, unchanged.
    pub raw_last: f64,
    /// Intercept of a least-squares fit `bits ~ h + c / size`, when at least
    /// two samples exist.
    pub fit: Option<f64>,
    pub method: String,
}

pub fn extrapolate(samples: &[Sample]) -> Result<Extrapolation> {
    let last = samples
        .last()
        .ok_or_else(|| Error::InvalidInput("empty series".into()))?;
    let fit = (samples.len() >= 2).then(|| {
        let n = samples.len() as f64;
        let xs: Vec<f64> = samples.iter().map(|s| 1.0 / s.size as f64).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = samples.iter().map(|s| s.bits).sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs
            .iter()
            .zip(samples)
            .map(|(x, s)| (x - mx) * (s.bits - my))
            .sum();
        if sxx == 0.0 {
            my
        } else {
            my - sxy / sxx * mx
        }
    });
    Ok(Extrapolation {
        raw_last: last.bits,
        fit,
        method: "raw-last+inverse-size-least-squares".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub spec: String,
    pub direction: SeriesDirection,
    pub margin: usize,
    pub samples: Vec<Sample>,
    pub extrapolation: Extrapolation,
}

fn check_side(r: usize) -> Result<()> {
    if r == 0 || r > MAX_SERIES_SIDE {
        return Err(Error::Budget(format!(
            "window side must be in 1..={MAX_SERIES_SIDE}"
        )));
    }
    Ok(())
}

fn spec_label(spec: &SftSpec) -> String {
    spec.name().unwrap_or("unnamed").to_string()
}

/// `log2 K_r / r^d` for the side-`r` window, `r = 1..=r_max`.
pub fn entropy_series(spec: &SftSpec, r_max: usize, margin: usize) -> Result<EntropyReport> {
    check_side(r_max)?;
    let counts: Vec<BigUint> = if spec.dimension() == 1 && margin == 0 {
        count_prefixes_1d(spec, r_max)?
    } else {
        (1..=r_max)
            .map(|r| {
                let window = if spec.dimension() == 1 {
                    RectWindow::line(r as u32)
                } else {
                    RectWindow::rect(r as u32, r as u32)
                };
                count_patterns(spec, &window, margin)
            })
            .collect::<Result<_>>()?
    };
    let d = spec.dimension() as u32;
    let samples: Vec<Sample> = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| Sample::new(i + 1, c, (i + 1).pow(d)))
        .collect();
    let extrapolation = extrapolate(&samples)?;
    Ok(EntropyReport {
        spec: spec_label(spec),
        direction: SeriesDirection::Isotropic,
        margin,
        samples,
        extrapolation,
    })
}

/// Per-width series `log2 N_{k,r} / r` along the vertical direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalRow {
    pub k: usize,
    pub samples: Vec<Sample>,
    pub extrapolation: Extrapolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalReport {
    pub spec: String,
    pub direction: SeriesDirection,
    pub margin: usize,
    pub rows: Vec<DirectionalRow>,
}

/// Exact counts `N_{k,r}` on `k x r` rectangles, indexed `[k-1][r-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountGrid {
    pub margin: usize,
    #[serde(with = "big_text::grid")]
    pub counts: Vec<Vec<BigUint>>,
}

impl CountGrid {
    pub fn get(&self, k: usize, r: usize) -> Option<&BigUint> {
        self.counts.get(k.checked_sub(1)?)?.get(r.checked_sub(1)?)
    }

    pub fn k_max(&self) -> usize {
        self.counts.len()
    }

    pub fn r_max(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }
}

pub fn count_grid(spec: &SftSpec, k_max: usize, r_max: usize, margin: usize) -> Result<CountGrid> {
    check_side(k_max)?;
    check_side(r_max)?;
    if spec.dimension() != 2 {
        return Err(Error::DimensionMismatch(
            "count grids need a 2D spec".into(),
        ));
    }
    let counts = (1..=k_max)
        .map(|k| {
            if margin == 0 {
                count_row_prefixes(spec, k, r_max)
            } else {
                (1..=r_max)
                    .map(|r| directional_counts(spec, k, r, margin))
                    .collect()
            }
        })
        .collect::<Result<_>>()?;
    Ok(CountGrid { margin, counts })
}

pub fn directional_entropy_series(
    spec: &SftSpec,
    k_max: usize,
    r_max: usize,
    margin: usize,
) -> Result<DirectionalReport> {
    let grid = count_grid(spec, k_max, r_max, margin)?;
    let rows = grid
        .counts
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let samples: Vec<Sample> = row
                .into_iter()
                .enumerate()
                .map(|(j, c)| Sample::new(j + 1, c, j + 1))
                .collect();
            let extrapolation = extrapolate(&samples)?;
            Ok(DirectionalRow {
                k: i + 1,
                samples,
                extrapolation,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DirectionalReport {
        spec: spec_label(spec),
        direction: SeriesDirection::E2,
        margin,
        rows,
    })
}

/// Tab-separated `(size, bits)` lines.
pub fn series_tsv(samples: &[Sample]) -> String {
    samples
        .iter()
        .map(|s| format!("{}\t{}\n", s.size, s.bits))
        .collect()
}

/// Serde adapters writing big integers as decimal strings.
pub mod big_text {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }

    pub mod grid {
        use super::*;

        pub fn serialize<S: Serializer>(
            g: &[Vec<BigUint>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let text: Vec<Vec<String>> = g
                .iter()
                .map(|row| row.iter().map(|n| n.to_string()).collect())
                .collect();
            serde::Serialize::serialize(&text, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<BigUint>>, D::Error> {
            let text = Vec::<Vec<String>>::deserialize(d)?;
            text.iter()
                .map(|row| {
                    row.iter()
                        .map(|t| t.parse().map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::stock;

    #[test]
    fn exact_powers_of_two() {
        assert_eq!(log2_big(&BigUint::from(1u32)), 0.0);
        assert_eq!(log2_big(&(BigUint::from(1u32) << 400)), 400.0);
        assert!((log2_big(&BigUint::from(377u32)) - 377f64.log2()).abs() < 1e-12);
        let big = (BigUint::from(3u32) << 200) + 1u32;
        assert!((log2_big(&big) - (200.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn golden_mean_sample() {
        let r = entropy_series(&stock::golden_mean(), 12, 0).unwrap();
        assert_eq!(r.samples[11].count, BigUint::from(377u32));
        assert_eq!(r.samples[11].bits, 377f64.log2() / 12.0);
        assert!((r.samples[11].bits - 0.7135).abs() < 5e-4);
    }

    #[test]
    fn fit_recovers_inverse_law() {
        let samples: Vec<Sample> = (1..=6)
            .map(|r| Sample {
                size: r,
                count: BigUint::from(1u32),
                normalizer: 1,
                bits: 0.5 + 2.0 / r as f64,
            })
            .collect();
        let e = extrapolate(&samples).unwrap();
        assert!((e.fit.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(e.raw_last, samples[5].bits);
    }
}
