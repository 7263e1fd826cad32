//! Exact fractions and their report formatting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Fraction = BigRational;

pub fn ratio(num: usize, den: usize) -> Fraction {
    Fraction::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Fraction) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Unweighted mean; zero for an empty input.
pub fn mean<'a, I>(values: I) -> Fraction
where
    I: IntoIterator<Item = &'a Fraction>,
{
    let (sum, n) = values
        .into_iter()
        .fold((Fraction::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        sum
    } else {
        sum / Fraction::from_integer(BigInt::from(n))
    }
}

/// A nonnegative `q` as a percentage with two decimals, rounded half up.
pub fn percent_2dp(q: &Fraction) -> String {
    debug_assert!(!q.is_negative());
    let scaled = q * Fraction::from_integer(BigInt::from(10_000));
    let (whole, rem) = scaled.numer().div_rem(scaled.denom());
    let hundredths = if rem * 2 >= *scaled.denom() { whole + 1 } else { whole };
    let (int, frac) = hundredths.div_rem(&BigInt::from(100));
    format!("{int}.{frac:0>2}")
}

/// Serde adapter writing fractions as `"p/q"` (or `"p"` when integral).
pub mod serde_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::Fraction;

    pub fn serialize<S: Serializer>(q: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
