//! The normal limit of the binomial and its exact counterparts.
//!
//! For `n` trials with success probability `p`, the central band of
//! half-width `c·√n/2` around `n·p` carries, as `n` grows, the mass
//! `∫_{|t| ≤ c/2} (2/√(2π)) e^{-2t²} dt`, which is `0.682689...` at `c = 1`.
//! This module computes the band mass exactly (rationals), in the limit
//! (quadrature), by the point approximation `2/√(2πn)·e^{-2l²/n}`, and by
//! seeded simulation.
//!
//! Band membership is decided in exact arithmetic: `k` is inside when
//! `(k - n·p)² ≤ half_width²`, endpoints included.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{binomial_coefficient, rational_from_f64, rational_to_f64, ExactInt, ExactRational};

/// Largest trial count summed in exact rationals; above it the band mass is
/// accumulated in compensated floating point.
pub const EXACT_TRIAL_LIMIT: u64 = 4096;

/// Replicates per simulation chunk. Each chunk draws from its own ChaCha8
/// stream, so results do not depend on how chunks are spread over threads.
pub const SIMULATION_CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    n: u64,
    p: ExactRational,
}

impl TrialSpec {
    pub fn new(n: u64, p: ExactRational) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("number of trials must be at least 1"));
        }
        if !p.is_positive() || p >= ExactRational::one() {
            return Err(Error::domain(format!("success probability {p} must lie strictly between 0 and 1")));
        }
        Ok(Self { n, p })
    }

    /// `n` fair trials (cross or pile).
    pub fn fair(n: u64) -> Result<Self> {
        Self::new(n, ExactRational::new(1.into(), 2.into()))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> &ExactRational {
        &self.p
    }

    fn mean(&self) -> ExactRational {
        &self.p * ExactRational::from_integer(self.n.into())
    }
}

/// A band probability: exact when the trial count allows it.
#[derive(Debug, Clone, PartialEq)]
pub enum BandProbability {
    Exact(ExactRational),
    Approximate(f64),
}

impl BandProbability {
    pub fn to_f64(&self) -> f64 {
        match self {
            BandProbability::Exact(r) => rational_to_f64(r),
            BandProbability::Approximate(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&ExactRational> {
        match self {
            BandProbability::Exact(r) => Some(r),
            BandProbability::Approximate(_) => None,
        }
    }
}

/// Integer range `[lo, hi]` of success counts with `(k - mean)² ≤ half_width_sq`,
/// or `None` when no integer qualifies.
fn band_range(n: u64, mean: &ExactRational, half_width_sq: &ExactRational) -> Option<(u64, u64)> {
    let inside = |k: i128| {
        let d = ExactRational::from_integer(BigInt::from(k)) - mean;
        &(&d * &d) <= half_width_sq
    };
    let centre = rational_to_f64(mean);
    let radius = rational_to_f64(half_width_sq).sqrt();
    let mut lo = ((centre - radius).floor() as i128 - 2).max(0);
    let mut hi = ((centre + radius).ceil() as i128 + 2).min(n as i128);
    while lo <= hi && !inside(lo) {
        lo += 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    (lo <= hi).then_some((lo as u64, hi as u64))
}

/// Exact `P(lo ≤ X ≤ hi)` for `X ~ Binomial(n, p)`.
fn exact_mass(n: u64, p: &ExactRational, lo: u64, hi: u64) -> ExactRational {
    let a = p.numer().clone();
    let b = p.denom().clone();
    let q = &b - &a;
    let width = (hi - lo) as usize;
    // Σ C(n,k) a^k q^(n-k) = a^lo q^(n-hi) Σ C(n,k) a^(k-lo) q^(hi-k)
    let mut a_pow = Vec::with_capacity(width + 1);
    let mut q_pow = Vec::with_capacity(width + 1);
    a_pow.push(ExactInt::one());
    q_pow.push(ExactInt::one());
    for i in 0..width {
        a_pow.push(&a_pow[i] * &a);
        q_pow.push(&q_pow[i] * &q);
    }
    let mut choose = binomial_coefficient(n, lo as i64);
    let mut inner = ExactInt::zero();
    for k in lo..=hi {
        let i = (k - lo) as usize;
        inner += &choose * &a_pow[i] * &q_pow[width - i];
        choose = choose * (n - k) / (k + 1);
    }
    let numer = inner * num_traits::pow(a, lo as usize) * num_traits::pow(q, (n - hi) as usize);
    ExactRational::new(numer, num_traits::pow(b, n as usize))
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Floating-point `P(lo ≤ X ≤ hi)` for large `n`.
///
/// Terms are generated by the ratio `C(n,k+1)p/(C(n,k)q)` relative to the mode,
/// then normalized by the total over the mode ± 40σ window, outside which no
/// term is representable relative to the mode.
fn approximate_mass(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let q = 1.0 - p;
    let nf = n as f64;
    let sigma = (nf * p * q).sqrt();
    let mode = (((nf + 1.0) * p).floor() as u64).min(n);
    let span = (40.0 * sigma + 10.0).ceil() as u64;
    let first = mode.saturating_sub(span).min(lo);
    let last = (mode + span).min(n).max(hi);

    let mut rel = vec![0.0f64; (last - first + 1) as usize];
    let at = |k: u64| (k - first) as usize;
    rel[at(mode)] = 1.0;
    for k in mode..last {
        rel[at(k + 1)] = rel[at(k)] * ((nf - k as f64) / (k as f64 + 1.0)) * (p / q);
    }
    for k in (first + 1..=mode).rev() {
        rel[at(k - 1)] = rel[at(k)] * (k as f64 / (nf - k as f64 + 1.0)) * (q / p);
    }
    let mut total = CompensatedSum::default();
    let mut band = CompensatedSum::default();
    for k in first..=last {
        let w = rel[at(k)];
        total.add(w);
        if (lo..=hi).contains(&k) {
            band.add(w);
        }
    }
    band.value() / total.value()
}

/// `P((X - n·p)² ≤ half_width_sq)` for `X ~ Binomial(n, p)`.
pub fn band_probability(spec: &TrialSpec, half_width_sq: &ExactRational) -> BandProbability {
    let range = band_range(spec.n, &spec.mean(), half_width_sq);
    if spec.n <= EXACT_TRIAL_LIMIT {
        let mass = match range {
            Some((lo, hi)) => exact_mass(spec.n, &spec.p, lo, hi),
            None => ExactRational::zero(),
        };
        BandProbability::Exact(mass)
    } else {
        let mass = match range {
            Some((lo, hi)) => approximate_mass(spec.n, rational_to_f64(&spec.p), lo, hi),
            None => 0.0,
        };
        BandProbability::Approximate(mass)
    }
}

fn central_half_width_sq(n: u64, c: f64) -> Result<ExactRational> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::domain(format!("band multiplier c = {c} must be a finite non-negative number")));
    }
    let c = rational_from_f64(c)?;
    // (c·√n/2)² = c²·n/4
    Ok(&c * &c * ExactRational::new(n.into(), 4.into()))
}

/// `P(|X - n·p| ≤ c·√n/2)`, exact for `n ≤ EXACT_TRIAL_LIMIT`.
pub fn exact_central_probability(spec: &TrialSpec, c: f64) -> Result<BandProbability> {
    let h2 = central_half_width_sq(spec.n, c)?;
    Ok(band_probability(spec, &h2))
}

/// Point approximation `P(X = n/2 ± l) ≈ 2/√(2πn) · exp(-2l²/n)` for fair trials.
pub fn demoivre_term(n: u64, l: i64) -> f64 {
    let nf = n as f64;
    let l = l as f64;
    2.0 / (2.0 * PI * nf).sqrt() * (-2.0 * l * l / nf).exp()
}

/// `ln n! ≈ n ln n - n + ½ ln(2πn)`.
pub fn stirling_ln_factorial(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    nf * nf.ln() - nf + 0.5 * (2.0 * PI * nf).ln()
}

/// `P(X = n/2 + l)` for fair trials with every factorial replaced by its
/// Stirling form. For `l ≪ √n` this tends to [`demoivre_term`].
pub fn stirling_point_probability(n: u64, l: i64) -> Result<f64> {
    let k = n as i64 / 2 + l;
    if !n.is_multiple_of(2) || k < 0 || k as u64 > n {
        return Err(Error::domain(format!("n = {n} must be even and n/2 + l = {k} within 0..=n")));
    }
    let k = k as u64;
    let ln = stirling_ln_factorial(n) - stirling_ln_factorial(k) - stirling_ln_factorial(n - k)
        - n as f64 * std::f64::consts::LN_2;
    Ok(ln.exp())
}

/// `C(n, n/2) / 2^n` exactly.
pub fn exact_central_term(n: u64) -> Result<ExactRational> {
    if !n.is_multiple_of(2) {
        return Err(Error::domain(format!("central term needs even n, got {n}")));
    }
    Ok(ExactRational::new(binomial_coefficient(n, (n / 2) as i64), num_traits::pow(BigInt::from(2), n as usize)))
}

/// Density of the scaled limit: `(2/√(2π)) · e^{-2t²}`.
fn limit_kernel(t: f64) -> f64 {
    2.0 / (2.0 * PI).sqrt() * (-2.0 * t * t).exp()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Quadrature tolerance; the Richardson-corrected Simpson error stays well
/// below it for this kernel.
const QUADRATURE_TOL: f64 = 1e-13;

/// `lim_{n→∞} P(|X - n/2| ≤ c·√n/2)`: the integral of the kernel over `|t| ≤ c/2`.
pub fn limit_central_probability(c: f64) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::domain(format!("band multiplier c = {c} must be a finite non-negative number")));
    }
    let half = adaptive_simpson(&limit_kernel, 0.0, c / 2.0, QUADRATURE_TOL);
    Ok(2.0 * half)
}

/// De Moivre's own figures for `c = 1, 2, 3`. Those for 2 and 3 come from
/// his series rather than the limit integral and differ from it by 2.2e-4
/// and 1.4e-3; they are reported alongside, never used as ground truth.
pub const HISTORICAL_BAND_VALUES: [(f64, f64); 3] = [(1.0, 0.682688), (2.0, 0.95428), (3.0, 0.99874)];

/// The historical figure for `c`, if one was given.
pub fn historical_band_value(c: f64) -> Option<f64> {
    HISTORICAL_BAND_VALUES.iter().find(|(k, _)| *k == c).map(|(_, v)| *v)
}

/// The complementary mass over `|t| > c/2`, integrated directly.
pub fn limit_tail_probability(c: f64) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::domain(format!("band multiplier c = {c} must be a finite non-negative number")));
    }
    // e^{-2t²} underflows relative to 1e-300 by t = c/2 + 20
    let start = c / 2.0;
    let mut total = 0.0;
    let mut a = start;
    while a < start + 20.0 {
        total += adaptive_simpson(&limit_kernel, a, a + 1.0, QUADRATURE_TOL / 40.0);
        a += 1.0;
    }
    Ok(2.0 * total)
}

/// `1/(2√n)` exactly, for perfect-square `n`.
pub fn remark1_fraction(n: u64) -> Result<ExactRational> {
    let root = n.sqrt();
    if n == 0 || root * root != n {
        return Err(Error::domain(format!("{n} is not a positive perfect square")));
    }
    Ok(ExactRational::new(1.into(), (2 * root).into()))
}

/// Smallest `n` with `P(|X/n - p| ≤ c) ≥ 1 - alpha`, `X ~ Binomial(n, p)`.
///
/// The normal limit gives a starting estimate `z²pq/c²`. Below
/// [`EXACT_TRIAL_LIMIT`] trials the search scans exactly from `n = 1`, so the
/// result is the true minimum; above it the scan starts at half the estimate.
pub fn sample_size(p: &ExactRational, c: &ExactRational, alpha: &ExactRational) -> Result<u64> {
    let one = ExactRational::one();
    if !p.is_positive() || p >= &one {
        return Err(Error::domain(format!("p = {p} must lie strictly between 0 and 1")));
    }
    if !c.is_positive() {
        return Err(Error::domain(format!("tolerance c = {c} must be positive")));
    }
    if !alpha.is_positive() || alpha >= &one {
        return Err(Error::domain(format!("risk alpha = {alpha} must lie strictly between 0 and 1")));
    }
    let target = &one - alpha;
    let satisfied = |n: u64| -> Result<bool> {
        let spec = TrialSpec::new(n, p.clone())?;
        let nn = ExactRational::from_integer(n.into());
        let h2 = c * c * &nn * &nn;
        Ok(match band_probability(&spec, &h2) {
            BandProbability::Exact(mass) => mass >= target,
            BandProbability::Approximate(mass) => mass >= rational_to_f64(&target),
        })
    };

    let estimate = gaussian_sample_size(rational_to_f64(p), rational_to_f64(c), rational_to_f64(alpha))?;
    let start = if estimate <= EXACT_TRIAL_LIMIT { 1 } else { estimate / 2 };
    let mut n = start;
    loop {
        if satisfied(n)? {
            return Ok(n);
        }
        n += 1;
    }
}

/// Normal-limit estimate `⌈z² p q / c²⌉` with `P(|Z| ≤ z) = 1 - alpha`.
pub fn gaussian_sample_size(p: f64, c: f64, alpha: f64) -> Result<u64> {
    // P(|Z| ≤ z) = limit_central_probability(z); bisect on z
    let target = 1.0 - alpha;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while limit_central_probability(hi)? < target {
        hi *= 2.0;
        if hi > 80.0 {
            break;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if limit_central_probability(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n = (hi * hi * p * (1.0 - p) / (c * c)).ceil();
    Ok(n.max(1.0) as u64)
}

fn chunk_successes(rng: &mut ChaCha8Rng, trials: u64, threshold: Option<u64>) -> u64 {
    match threshold {
        // fair coin: one bit per trial
        None => {
            let mut count = 0u64;
            let mut left = trials;
            while left >= 64 {
                count += rng.next_u64().count_ones() as u64;
                left -= 64;
            }
            if left > 0 {
                let mask = (1u64 << left) - 1;
                count += (rng.next_u64() & mask).count_ones() as u64;
            }
            count
        }
        Some(t) => (0..trials).filter(|_| rng.next_u64() < t).count() as u64,
    }
}

/// Fraction of `reps` simulated runs of `spec.n` trials whose success count
/// falls in the central band `|k - n·p| ≤ c·√n/2`.
///
/// Replicate chunk `i` uses `ChaCha8Rng::seed_from_u64(seed)` on stream `i`;
/// the result is identical for any rayon thread count.
pub fn simulate_band(spec: &TrialSpec, c: f64, reps: u64, seed: u64) -> Result<f64> {
    if reps == 0 {
        return Err(Error::domain("at least one replicate is required"));
    }
    let h2 = central_half_width_sq(spec.n, c)?;
    let Some((lo, hi)) = band_range(spec.n, &spec.mean(), &h2) else {
        return Ok(0.0);
    };
    let half = ExactRational::new(1.into(), 2.into());
    let threshold = if spec.p == half {
        None
    } else {
        // success when a uniform u64 falls below floor(p · 2^64)
        let scaled = &spec.p * ExactRational::from_integer(BigInt::one() << 64);
        Some(scaled.floor().to_integer().to_u64().unwrap_or(u64::MAX))
    };
    let chunks = reps.div_ceil(SIMULATION_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let size = SIMULATION_CHUNK.min(reps - chunk * SIMULATION_CHUNK);
            (0..size)
                .filter(|_| (lo..=hi).contains(&chunk_successes(&mut rng, spec.n, threshold)))
                .count() as u64
        })
        .sum();
    Ok(hits as f64 / reps as f64)
}
