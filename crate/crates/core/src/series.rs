//! Truncated formal power series without constant term.
//!
//! A [`PowerSeries`] stores `a_1, a_2, ..., a_N` for `a_1 x + a_2 x^2 + ... + a_N x^N`.
//! Coefficients beyond the stored order are zero, so a series doubles as a
//! polynomial. Every operation takes its truncation order explicitly.
//!
//! Powers are computed with the multinomial rule: the coefficient of `x^m` in
//! `s^p` is the sum, over every multiset of `p` degrees adding up to `m`, of the
//! number of arrangements of that multiset times the product of the matching
//! coefficients. For `(ax + bx^2 + cx^3 + dx^4)^2` the degree-4 multisets are
//! `{1, 3}` (two arrangements) and `{2, 2}` (one), giving `2ac + b^2`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{factorial, ExactInt, ExactRational};

/// Field elements usable as series coefficients.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: &ExactInt) -> Self;
}

impl Coefficient for ExactRational {
    fn from_int(n: &ExactInt) -> Self {
        ExactRational::from_integer(n.clone())
    }
}

impl Coefficient for f64 {
    fn from_int(n: &ExactInt) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<T = ExactRational> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> PowerSeries<T> {
    /// `coeffs[i]` is the coefficient of `x^(i + 1)`.
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// The series `x`, carried to `order` terms.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order];
        if let Some(first) = coeffs.first_mut() {
            *first = T::one();
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^degree`; zero for degree 0 and beyond the stored order.
    pub fn coefficient(&self, degree: usize) -> T {
        if degree == 0 {
            return T::zero();
        }
        self.coeffs.get(degree - 1).cloned().unwrap_or_else(T::zero)
    }

    /// Product truncated at `order`.
    pub fn mul_truncated(&self, other: &Self, order: usize) -> Self {
        let mut out = vec![T::zero(); order];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                // degrees i+1 and j+1 multiply to degree i+j+2, stored at i+j+1
                let idx = i + j + 1;
                if idx >= order {
                    break;
                }
                out[idx] = out[idx].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs: out }
    }

    /// Keeps the first `order` coefficients, padding with zeros.
    pub fn truncate(&self, order: usize) -> Self {
        let coeffs = (1..=order).map(|d| self.coefficient(d)).collect();
        Self { coeffs }
    }
}

/// One term of the multinomial expansion: a multiset of factor degrees
/// (non-decreasing) and its number of arrangements `p! / (c_1! c_2! ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultinomialTerm {
    pub degrees: Vec<usize>,
    #[serde(serialize_with = "crate::exactnum::serialize_exact_int")]
    pub count: ExactInt,
}

impl MultinomialTerm {
    /// Multiplicity `c_i` of each degree `i = 1..=max`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let max = self.degrees.last().copied().unwrap_or(0);
        let mut out = vec![0; max];
        for &d in &self.degrees {
            out[d - 1] += 1;
        }
        out
    }
}

/// All ways to write `degree` as an unordered sum of `power` positive parts,
/// each with its arrangement count. Empty when `degree < power`.
pub fn multinomial_coefficient_terms(degree: usize, power: usize) -> Vec<MultinomialTerm> {
    let mut out = Vec::new();
    if power == 0 || degree < power {
        return out;
    }
    let mut parts = Vec::with_capacity(power);
    partitions(degree, power, 1, &mut parts, &mut |parts| {
        let mut denom = ExactInt::one();
        let mut run = 1u64;
        for w in parts.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                denom *= factorial(run);
                run = 1;
            }
        }
        denom *= factorial(run);
        out.push(MultinomialTerm { degrees: parts.to_vec(), count: factorial(power as u64) / denom });
    });
    out
}

fn partitions(
    remaining: usize,
    slots: usize,
    min_part: usize,
    parts: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if slots == 0 {
        if remaining == 0 {
            emit(parts);
        }
        return;
    }
    // the remaining slots all take at least `part`
    let mut part = min_part;
    while part * slots <= remaining {
        parts.push(part);
        partitions(remaining - part, slots - 1, part, parts, emit);
        parts.pop();
        part += 1;
    }
}

/// `s^power` truncated at `order`, via the multinomial rule.
pub fn raise_series<T: Coefficient>(s: &PowerSeries<T>, power: usize, order: usize) -> Result<PowerSeries<T>> {
    if power == 0 {
        return Err(Error::domain("series power must be at least 1"));
    }
    let coeffs = (1..=order)
        .map(|m| {
            multinomial_coefficient_terms(m, power).iter().fold(T::zero(), |acc, term| {
                let product = term.degrees.iter().fold(T::one(), |p, &d| p * s.coefficient(d));
                acc + T::from_int(&term.count) * product
            })
        })
        .collect();
    Ok(PowerSeries::new(coeffs))
}

/// `f(g(x))` truncated at `order`.
pub fn compose_series<T: Coefficient>(f: &PowerSeries<T>, g: &PowerSeries<T>, order: usize) -> PowerSeries<T> {
    let g = g.truncate(order);
    let mut out = vec![T::zero(); order];
    let mut g_power = g.clone();
    // g^j has lowest degree j, so terms of f past `order` never contribute
    for j in 1..=order.min(f.order()) {
        if j > 1 {
            g_power = g_power.mul_truncated(&g, order);
        }
        let a = f.coefficient(j);
        if a.is_zero() {
            continue;
        }
        for (slot, c) in out.iter_mut().zip(g_power.coefficients()) {
            *slot = slot.clone() + a.clone() * c.clone();
        }
    }
    PowerSeries::new(out)
}

/// The compositional inverse `t` of `s` through degree `order`, so that
/// `s(t(x)) = x + O(x^(order+1))`.
///
/// Solved degree by degree: the `x^m` coefficient of `s(t)` is
/// `a_1 b_m + (terms in b_1 .. b_(m-1))`, which must vanish for `m >= 2`.
pub fn revert_series<T: Coefficient>(s: &PowerSeries<T>, order: usize) -> Result<PowerSeries<T>> {
    let a1 = s.coefficient(1);
    if a1.is_zero() {
        return Err(Error::NotInvertible);
    }
    let mut b = vec![T::zero(); order];
    if order == 0 {
        return Ok(PowerSeries::new(b));
    }
    b[0] = T::one() / a1.clone();
    for m in 2..=order {
        // b_m is still zero here, so this is the known part of [x^m] s(t)
        let partial = PowerSeries::new(b[..m].to_vec());
        let known = compose_series(s, &partial, m).coefficient(m);
        b[m - 1] = -known / a1.clone();
    }
    Ok(PowerSeries::new(b))
}

impl<T: Coefficient + fmt::Display> fmt::Display for PowerSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i + 1 {
                1 => write!(f, "({c})x")?,
                d => write!(f, "({c})x^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.coeffs.len() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{binomial_coefficient, ratio};
    use proptest::prelude::*;

    fn rat_series(v: &[(i64, i64)]) -> PowerSeries {
        PowerSeries::new(v.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    fn repeated_product(s: &PowerSeries, p: usize, order: usize) -> PowerSeries {
        let s = s.truncate(order);
        (1..p).fold(s.clone(), |acc, _| acc.mul_truncated(&s, order))
    }

    #[test]
    fn monomial_cube() {
        let x = PowerSeries::<ExactRational>::identity(1);
        let cube = raise_series(&x, 3, 5).unwrap();
        let expected: Vec<_> = [0, 0, 1, 0, 0].iter().map(|&v| ratio(v, 1)).collect();
        assert_eq!(cube.coefficients(), expected.as_slice());
    }

    #[test]
    fn square_degree_four_is_2ac_plus_b2() {
        // distinct primes for a, b, c, d make any other combination detectable
        let (a, b, c, d) = (2, 3, 5, 7);
        let s = rat_series(&[(a, 1), (b, 1), (c, 1), (d, 1)]);
        let sq = raise_series(&s, 2, 4).unwrap();
        assert_eq!(sq.coefficient(4), ratio(2 * a * c + b * b, 1));
    }

    #[test]
    fn multinomial_terms_examples() {
        let terms = multinomial_coefficient_terms(4, 2);
        assert_eq!(
            terms,
            vec![
                MultinomialTerm { degrees: vec![1, 3], count: 2.into() },
                MultinomialTerm { degrees: vec![2, 2], count: 1.into() },
            ]
        );
        assert_eq!(
            multinomial_coefficient_terms(2, 2),
            vec![MultinomialTerm { degrees: vec![1, 1], count: 1.into() }]
        );
        assert!(multinomial_coefficient_terms(2, 3).is_empty());
        assert_eq!(terms[1].multiplicities(), vec![0, 2]);
    }

    #[test]
    fn multinomial_six_three_matches_expansion() {
        let total: ExactInt = multinomial_coefficient_terms(6, 3).iter().map(|t| t.count.clone()).sum();
        let ones = PowerSeries::new(vec![ratio(1, 1); 6]);
        let cube = repeated_product(&ones, 3, 6);
        assert_eq!(ExactRational::from_integer(total), cube.coefficient(6));
    }

    #[test]
    fn compose_examples() {
        let g = rat_series(&[(1, 1), (1, 1)]);
        let x = PowerSeries::<ExactRational>::identity(1);
        assert_eq!(compose_series(&x, &g, 2), g);
        let x2 = rat_series(&[(0, 1), (1, 1)]);
        assert_eq!(compose_series(&x2, &g, 4), rat_series(&[(0, 1), (1, 1), (2, 1), (1, 1)]));
    }

    #[test]
    fn revert_identity_and_leading_terms() {
        let x = PowerSeries::<ExactRational>::identity(5);
        assert_eq!(revert_series(&x, 5).unwrap(), x);

        let s = rat_series(&[(3, 2), (-5, 7), (1, 3)]);
        let t = revert_series(&s, 3).unwrap();
        let a1 = ratio(3, 2);
        let a2 = ratio(-5, 7);
        assert_eq!(t.coefficient(1), ratio(1, 1) / a1.clone());
        assert_eq!(t.coefficient(2), -a2 / (a1.clone() * a1.clone() * a1));
    }

    #[test]
    fn revert_x_plus_x2() {
        // x + x^2 reverts to the Catalan series with alternating signs
        let s = rat_series(&[(1, 1), (1, 1)]);
        let t = revert_series(&s, 6).unwrap();
        let catalan = [1i64, 1, 2, 5, 14, 42];
        for (k, c) in catalan.iter().enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.coefficient(k + 1), ratio(sign * c, 1));
        }
        assert_eq!(compose_series(&s, &t, 6), PowerSeries::identity(6));
    }

    #[test]
    fn revert_rejects_zero_linear_term() {
        let s = rat_series(&[(0, 1), (1, 1)]);
        assert!(matches!(revert_series(&s, 4), Err(Error::NotInvertible)));
    }

    #[test]
    fn real_mode_reversion() {
        let s = PowerSeries::new(vec![0.7, -0.3, 0.25, 1.1]);
        let t = revert_series(&s, 8).unwrap();
        let id = compose_series(&s, &t, 8);
        assert!((id.coefficient(1) - 1.0).abs() < 1e-12);
        for d in 2..=8 {
            assert!(id.coefficient(d).abs() < 1e-9, "degree {d}: {}", id.coefficient(d));
        }
    }

    #[test]
    fn zero_power_rejected() {
        assert!(raise_series(&rat_series(&[(1, 1)]), 0, 3).is_err());
    }

    fn arb_series(max_order: usize) -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-9i64..=9, 1i64..=6), 1..=max_order)
            .prop_map(|v| PowerSeries::new(v.into_iter().map(|(n, d)| ratio(n, d)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multinomial_power_equals_repeated_product(s in arb_series(10), p in 1usize..=5, order in 1usize..=10) {
            prop_assert_eq!(raise_series(&s, p, order).unwrap(), repeated_product(&s, p, order));
        }

        #[test]
        fn reversion_round_trip(s in arb_series(10), order in 1usize..=10) {
            prop_assume!(!s.coefficient(1).is_zero());
            let t = revert_series(&s, order).unwrap();
            prop_assert_eq!(compose_series(&s, &t, order), PowerSeries::identity(order));
        }

        #[test]
        fn double_reversion_is_identity(mut s in arb_series(8), order in 1usize..=8) {
            s.coeffs[0] = ratio(1, 1);
            let back = revert_series(&revert_series(&s, order).unwrap(), order).unwrap();
            prop_assert_eq!(back, s.truncate(order));
        }

        #[test]
        fn multinomial_counts_sum(m in 1usize..=14, p in 1usize..=14) {
            prop_assume!(p <= m);
            let total: ExactInt = multinomial_coefficient_terms(m, p).iter().map(|t| t.count.clone()).sum();
            // compositions of m into p positive parts
            prop_assert_eq!(total, binomial_coefficient(m as u64 - 1, p as i64 - 1));
        }
    }
}
