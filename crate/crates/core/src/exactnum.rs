//! Exact integers, rationals and odds.
//!
//! Everything that must not round (factorials of deck sizes, binomial masses
//! with `2^n` denominators, odds) goes through the types here.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type ExactInt = BigInt;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator (`num_rational` normalizes on construction).
pub type ExactRational = BigRational;

/// `n!` exactly.
pub fn factorial(n: u64) -> ExactInt {
    (2..=n).fold(ExactInt::one(), |acc, k| acc * k)
}

/// `C(n, k)` exactly; zero outside `0 <= k <= n`.
pub fn binomial_coefficient(n: u64, k: i64) -> ExactInt {
    if k < 0 || k as u64 > n {
        return ExactInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    // Each partial product C(n, j) is an integer, so the division is exact.
    let mut acc = ExactInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Builds `num/den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> ExactRational {
    ExactRational::new(num.into(), den.into())
}

/// Converts a finite `f64` into the rational it denotes exactly.
pub fn rational_from_f64(x: f64) -> Result<ExactRational> {
    ExactRational::from_float(x).ok_or_else(|| Error::domain(format!("{x} is not a finite number")))
}

pub fn rational_to_f64(r: &ExactRational) -> f64 {
    // BigRational::to_f64 is correctly rounded for huge numerators/denominators.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3/7"`, `"-12"`, `"0.05"` or `"1.5e-3"` into an exact rational.
/// Decimal strings are read as the decimal fraction they spell, not as the
/// nearest binary float.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = || Error::usage(format!("cannot parse {s:?} as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::usage(format!("zero denominator in {s:?}")));
        }
        return Ok(ExactRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = ExactRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = ExactRational::from_integer(10.into());
    value *= num_traits::pow::Pow::pow(&ten, scale);
    Ok(if negative { -value } else { value })
}

/// Formats a non-negative integer as `"DDDDDDDD × 10^k"`, keeping the leading
/// `leading` digits (truncated, not rounded).
pub fn times_power_of_ten(value: &ExactInt, leading: usize) -> String {
    let digits = value.abs().to_str_radix(10);
    let sign = if value.is_negative() { "-" } else { "" };
    if digits.len() <= leading {
        return format!("{sign}{digits}");
    }
    let exp = digits.len() - leading;
    format!("{sign}{} × 10^{exp}", &digits[..leading])
}

/// A reduced `for : against` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Odds {
    favour: ExactInt,
    against: ExactInt,
}

impl Odds {
    /// Reduces the pair by its gcd. Both parts must be non-negative and not
    /// both zero.
    pub fn new(favour: ExactInt, against: ExactInt) -> Result<Self> {
        if favour.is_negative() || against.is_negative() {
            return Err(Error::domain("odds must be non-negative"));
        }
        if favour.is_zero() && against.is_zero() {
            return Err(Error::domain("odds 0:0 are undefined"));
        }
        let g = favour.gcd(&against);
        Ok(Self { favour: favour / &g, against: against / &g })
    }

    pub fn favour(&self) -> &ExactInt {
        &self.favour
    }

    pub fn against(&self) -> &ExactInt {
        &self.against
    }

    /// `for / (for + against)`.
    pub fn probability(&self) -> ExactRational {
        ExactRational::new(self.favour.clone(), &self.favour + &self.against)
    }
}

impl fmt::Display for Odds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.favour, self.against)
    }
}

impl FromStr for Odds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::usage(format!("odds {s:?} must look like FOR:AGAINST")))?;
        let a = BigInt::from_str(a.trim()).map_err(|_| Error::usage(format!("bad odds {s:?}")))?;
        let b = BigInt::from_str(b.trim()).map_err(|_| Error::usage(format!("bad odds {s:?}")))?;
        Odds::new(a, b)
    }
}

/// Serializes a big integer as its decimal string.
pub fn serialize_exact_int<S: Serializer>(n: &ExactInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(n)
}

impl Serialize for Odds {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Odds equivalent to a probability in `[0, 1]`. `0` maps to `0:1` and `1`
/// to `1:0`.
pub fn odds_from_probability(p: &ExactRational) -> Result<Odds> {
    if p.is_negative() || p > &ExactRational::one() {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    // p = a/b in lowest terms, so a : (b - a) is already coprime.
    let favour = p.numer().clone();
    let against = p.denom() - &favour;
    Odds::new(favour, against)
}

pub fn probability_from_odds(odds: &Odds) -> ExactRational {
    odds.probability()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), 1.into());
        assert_eq!(factorial(1), 1.into());
        assert_eq!(factorial(5), 120.into());
    }

    #[test]
    fn factorial_32_leading_digits() {
        let q = factorial(32) / num_traits::pow(ExactInt::from(10), 28);
        assert_eq!(q, 26_313_083.into());
        assert_eq!(times_power_of_ten(&factorial(32), 8), "26313083 × 10^28");
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial_coefficient(4, 2), 6.into());
        assert_eq!(binomial_coefficient(7, 0), 1.into());
        assert_eq!(binomial_coefficient(0, 0), 1.into());
        assert_eq!(binomial_coefficient(5, -1), 0.into());
        assert_eq!(binomial_coefficient(5, 6), 0.into());
    }

    #[test]
    fn binomial_matches_pascal_rows() {
        let mut row = vec![ExactInt::one()];
        for n in 1..=100u64 {
            let mut next = vec![ExactInt::one(); n as usize + 1];
            for k in 1..n as usize {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
        }
        for (k, v) in row.iter().enumerate() {
            assert_eq!(&binomial_coefficient(100, k as i64), v);
        }
    }

    #[test]
    fn odds_examples() {
        assert_eq!(odds_from_probability(&ratio(1, 2)).unwrap().to_string(), "1:1");
        assert_eq!(odds_from_probability(&ratio(28, 41)).unwrap().to_string(), "28:13");
        assert_eq!(odds_from_probability(&ratio(369, 370)).unwrap().to_string(), "369:1");
        assert_eq!(odds_from_probability(&ratio(0, 1)).unwrap().to_string(), "0:1");
        assert_eq!(odds_from_probability(&ratio(1, 1)).unwrap().to_string(), "1:0");
        assert!(odds_from_probability(&ratio(3, 2)).is_err());
        assert!(odds_from_probability(&ratio(-1, 2)).is_err());
    }

    #[test]
    fn odds_reduce_and_reject() {
        let o = Odds::new(56.into(), 26.into()).unwrap();
        assert_eq!(o.to_string(), "28:13");
        assert!(Odds::new(0.into(), 0.into()).is_err());
        assert!(Odds::new((-1).into(), 2.into()).is_err());
        assert_eq!("280:13".parse::<Odds>().unwrap().favour(), &ExactInt::from(280));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse_rational("-1.5e-1").unwrap(), ratio(-3, 20));
        assert_eq!(parse_rational("12").unwrap(), ratio(12, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    proptest! {
        #[test]
        fn factorial_recurrence(n in 1u64..200) {
            prop_assert_eq!(factorial(n), factorial(n - 1) * n);
        }

        #[test]
        fn binomial_symmetry(n in 0u64..300, k in 0i64..300) {
            let k = k % (n as i64 + 1);
            prop_assert_eq!(binomial_coefficient(n, k), binomial_coefficient(n, n as i64 - k));
        }

        #[test]
        fn odds_round_trip(num in 0i64..10_000, extra in 0i64..10_000) {
            let p = ratio(num, num + extra + 1);
            let odds = odds_from_probability(&p).unwrap();
            prop_assert!(odds.favour().gcd(odds.against()).is_one());
            prop_assert_eq!(probability_from_odds(&odds), p);
        }
    }
}
