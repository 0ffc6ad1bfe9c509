use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parses `p/q`, an integer, or a finite decimal such as `0.625`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: `{text}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(digits, scale));
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapters writing rationals as `p/q` strings.
pub mod rational_text {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let t = String::deserialize(d)?;
        parse_rational(&t).map_err(serde::de::Error::custom)
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &[BigRational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<BigRational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// A finite nonincreasing table of nonnegative rationals standing in for
/// a right-computable real (its limit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Pi1Document", into = "Pi1Document")]
pub struct Pi1Stream {
    approximants: Vec<BigRational>,
    provenance: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Pi1Document {
    #[serde(with = "rational_text::list")]
    approximants: Vec<BigRational>,
    #[serde(default)]
    provenance: String,
}

impl TryFrom<Pi1Document> for Pi1Stream {
    type Error = Error;
    fn try_from(d: Pi1Document) -> Result<Self> {
        Pi1Stream::new(d.approximants, d.provenance)
    }
}

impl From<Pi1Stream> for Pi1Document {
    fn from(s: Pi1Stream) -> Self {
        Pi1Document {
            approximants: s.approximants,
            provenance: s.provenance,
        }
    }
}

impl Pi1Stream {
    pub fn new(approximants: Vec<BigRational>, provenance: impl Into<String>) -> Result<Self> {
        if approximants.is_empty() {
            return Err(Error::InvalidInput("empty approximant table".into()));
        }
        if approximants.iter().any(|q| q.is_negative()) {
            return Err(Error::InvalidInput("negative approximant".into()));
        }
        if approximants.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput(
                "approximants must be nonincreasing".into(),
            ));
        }
        Ok(Pi1Stream {
            approximants,
            provenance: provenance.into(),
        })
    }

    /// Parses a list such as `["1", "5/8", "1/2"]`.
    pub fn from_texts(texts: &[&str], provenance: impl Into<String>) -> Result<Self> {
        Pi1Stream::new(
            texts
                .iter()
                .map(|t| parse_rational(t))
                .collect::<Result<_>>()?,
            provenance,
        )
    }

    pub fn approximants(&self) -> &[BigRational] {
        &self.approximants
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn last(&self) -> &BigRational {
        self.approximants.last().expect("nonempty")
    }

    /// `[last, previous]`: the last approximant and the one before it
    /// (equal for a single-entry table).
    pub fn bracket(&self) -> (BigRational, BigRational) {
        let n = self.approximants.len();
        let prev = if n >= 2 {
            &self.approximants[n - 2]
        } else {
            &self.approximants[n - 1]
        };
        (self.last().clone(), prev.clone())
    }
}

/// A table of right-computable approximations whose limits increase (up
/// to the declared slack).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Sigma2Document", into = "Sigma2Document")]
pub struct Sigma2Stream {
    streams: Vec<Pi1Stream>,
    slack: BigRational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sigma2Document {
    streams: Vec<Pi1Stream>,
    #[serde(with = "rational_text", default = "zero")]
    slack: BigRational,
}

fn zero() -> BigRational {
    BigRational::zero()
}

impl TryFrom<Sigma2Document> for Sigma2Stream {
    type Error = Error;
    fn try_from(d: Sigma2Document) -> Result<Self> {
        Sigma2Stream::new(d.streams, d.slack)
    }
}

impl From<Sigma2Stream> for Sigma2Document {
    fn from(s: Sigma2Stream) -> Self {
        Sigma2Document {
            streams: s.streams,
            slack: s.slack,
        }
    }
}

impl Sigma2Stream {
    pub fn new(streams: Vec<Pi1Stream>, slack: BigRational) -> Result<Self> {
        if slack.is_negative() {
            return Err(Error::InvalidInput("negative slack".into()));
        }
        for (k, w) in streams.windows(2).enumerate() {
            if w[1].last() < &(w[0].last() - &slack) {
                return Err(Error::InvalidInput(format!(
                    "stream {} ends below stream {} by more than the slack",
                    k + 2,
                    k + 1
                )));
            }
        }
        Ok(Sigma2Stream { streams, slack })
    }

    pub fn streams(&self) -> &[Pi1Stream] {
        &self.streams
    }

    pub fn slack(&self) -> &BigRational {
        &self.slack
    }

    pub fn push(&mut self, stream: Pi1Stream) -> Result<()> {
        let mut all = self.streams.clone();
        all.push(stream);
        *self = Sigma2Stream::new(all, self.slack.clone())?;
        Ok(())
    }
}

/// Supremum of the bracketed limits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sigma2Sup {
    #[serde(with = "rational_text")]
    pub sup: BigRational,
    #[serde(with = "rational_text")]
    pub error_bar: BigRational,
    /// 1-based index of the stream attaining the supremum.
    pub attained_at: usize,
}

/// Running supremum of the last approximants; the error bar is the widest
/// bracket `previous - last` among the streams.
pub fn sigma2_sup(stream: &Sigma2Stream) -> Result<Sigma2Sup> {
    let mut best: Option<(BigRational, usize)> = None;
    let mut widest = BigRational::zero();
    for (i, s) in stream.streams.iter().enumerate() {
        let (lo, hi) = s.bracket();
        if best.as_ref().is_none_or(|(b, _)| &lo > b) {
            best = Some((lo.clone(), i + 1));
        }
        widest = widest.max(hi - lo);
    }
    let (sup, attained_at) =
        best.ok_or_else(|| Error::InvalidInput("empty stream table".into()))?;
    Ok(Sigma2Sup {
        sup,
        error_bar: widest,
        attained_at,
    })
}
