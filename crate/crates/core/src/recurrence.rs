//! Recurrent series and their geometric decomposition.
//!
//! A recurrence `a_n = b_1 a_(n-1) + ... + b_k a_(n-k)` with pairwise distinct
//! characteristic roots `r_i` splits into geometric progressions
//! `a_n = Σ c_i r_i^n`. The same machinery gives the probability that a game
//! between two players holding `b` stakes each lasts beyond `n` games, and the
//! factorization of `x^n ± 1` over the reals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum pairwise distance between characteristic roots, relative to the
/// larger modulus (or 1). A double root computed in floating point splits by
/// about `√ε`, so the threshold sits well above that.
pub const ROOT_SEPARATION: f64 = 1e-6;

/// Roots this close to 1 use the `n + 1` limit of the geometric sum.
const UNIT_ROOT: f64 = 1e-8;

/// Imaginary parts below this (relative to the root's modulus) are treated as zero.
const REAL_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recurrence {
    coefficients: Vec<f64>,
    initial: Vec<f64>,
}

impl Recurrence {
    /// `coefficients` are `b_1 .. b_k`, `initial` are `a_0 .. a_(k-1)`.
    pub fn new(coefficients: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Order("a recurrence needs at least one coefficient".into()));
        }
        if coefficients.len() != initial.len() {
            return Err(Error::usage(format!(
                "{} coefficients but {} initial terms",
                coefficients.len(),
                initial.len()
            )));
        }
        if coefficients.iter().chain(&initial).any(|x| !x.is_finite()) {
            return Err(Error::domain("recurrence data must be finite"));
        }
        if *coefficients.last().unwrap() == 0.0 {
            return Err(Error::Order("last coefficient b_k is zero; the true order is lower".into()));
        }
        Ok(Self { coefficients, initial })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// `a_0 .. a_(count-1)` by direct iteration.
    pub fn terms(&self, count: usize) -> Vec<f64> {
        let k = self.order();
        let mut out: Vec<f64> = self.initial.iter().copied().take(count).collect();
        while out.len() < count {
            let n = out.len();
            let next = (1..=k).map(|j| self.coefficients[j - 1] * out[n - j]).sum();
            out.push(next);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricTerm {
    #[serde(serialize_with = "serialize_complex")]
    pub coefficient: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    pub root: Complex64,
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// `a_n = Σ coefficient · root^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub terms: Vec<GeometricTerm>,
    /// Non-real terms come in conjugate pairs, so every value is real.
    pub real: bool,
}

impl ClosedForm {
    /// The complex sum, without any realness check.
    pub fn eval_complex(&self, n: u64) -> Complex64 {
        self.terms.iter().map(|t| t.coefficient * pow_complex(t.root, n)).sum()
    }
}

fn pow_complex(z: Complex64, n: u64) -> Complex64 {
    // powu by squaring; u32 covers any index anyone iterates to
    z.powu(n.min(u32::MAX as u64) as u32)
}

/// Roots of `x^k - b_1 x^(k-1) - ... - b_k`, Newton-polished.
pub fn characteristic_roots(coefficients: &[f64]) -> Vec<Complex64> {
    let k = coefficients.len();
    let mut companion = DMatrix::<f64>::zeros(k, k);
    for (j, b) in coefficients.iter().enumerate() {
        companion[(0, j)] = *b;
    }
    for i in 1..k {
        companion[(i, i - 1)] = 1.0;
    }
    let eigen = companion.complex_eigenvalues();
    eigen.iter().map(|&z| polish_root(coefficients, z)).collect()
}

/// Characteristic polynomial and its derivative at `z`.
fn char_poly(coefficients: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for b in coefficients {
        dp = dp * z + p;
        p = p * z - b;
    }
    (p, dp)
}

fn polish_root(coefficients: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = char_poly(coefficients, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        // near a multiple root p is pure rounding noise; keep only improving steps
        let candidate = z - step;
        if char_poly(coefficients, candidate).0.norm() >= p.norm() {
            break;
        }
        z = candidate;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Decomposes the recurrence into geometric progressions.
pub fn solve_recurrence(r: &Recurrence) -> Result<ClosedForm> {
    let k = r.order();
    let mut roots = characteristic_roots(&r.coefficients);
    for i in 0..k {
        for j in i + 1..k {
            let d = (roots[i] - roots[j]).norm();
            if d <= ROOT_SEPARATION * roots[i].norm().max(roots[j].norm()).max(1.0) {
                return Err(Error::DegenerateSpectrum {
                    first: roots[i].to_string(),
                    second: roots[j].to_string(),
                    distance: d,
                });
            }
        }
    }
    let pairs = conjugate_pairing(&mut roots)?;

    // Vandermonde system: Σ_i c_i r_i^n = a_n for n < k
    let v = DMatrix::from_fn(k, k, |n, i| roots[i].powu(n as u32));
    let rhs = DVector::from_iterator(k, r.initial.iter().map(|&a| Complex64::new(a, 0.0)));
    let coeffs = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Consistency("Vandermonde system is singular".into()))?;
    let mut coeffs: Vec<Complex64> = coeffs.iter().copied().collect();

    // make the conjugate symmetry exact
    for (i, partner) in pairs.iter().enumerate() {
        match partner {
            None => coeffs[i].im = 0.0,
            Some(j) if i < *j => {
                let avg = 0.5 * (coeffs[i] + coeffs[*j].conj());
                coeffs[i] = avg;
                coeffs[*j] = avg.conj();
            }
            Some(_) => {}
        }
    }
    let terms = roots
        .into_iter()
        .zip(coeffs)
        .map(|(root, coefficient)| GeometricTerm { coefficient, root })
        .collect();
    Ok(ClosedForm { terms, real: true })
}

/// Snaps near-real roots onto the real axis and pairs the rest with their
/// conjugates. Returns each root's partner index.
fn conjugate_pairing(roots: &mut [Complex64]) -> Result<Vec<Option<usize>>> {
    let k = roots.len();
    let mut partner: Vec<Option<usize>> = vec![None; k];
    let mut used = vec![false; k];
    for i in 0..k {
        if roots[i].im.abs() <= REAL_ROOT_TOL * roots[i].norm().max(1.0) {
            roots[i].im = 0.0;
            used[i] = true;
        }
    }
    for i in 0..k {
        if used[i] {
            continue;
        }
        let target = roots[i].conj();
        let j = (0..k)
            .filter(|&j| j != i && !used[j])
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()))
            .ok_or_else(|| Error::Consistency(format!("root {} has no conjugate partner", roots[i])))?;
        let avg = 0.5 * (roots[i] + roots[j].conj());
        roots[i] = avg;
        roots[j] = avg.conj();
        partner[i] = Some(j);
        partner[j] = Some(i);
        used[i] = true;
        used[j] = true;
    }
    Ok(partner)
}

/// `a_n` from the closed form. Fails if the imaginary residue exceeds
/// `1e-12` relative to the size of the summed terms.
pub fn eval_closed_form(cf: &ClosedForm, n: u64) -> Result<f64> {
    let z = cf.eval_complex(n);
    if cf.real {
        let scale: f64 = cf.terms.iter().map(|t| (t.coefficient * pow_complex(t.root, n)).norm()).sum();
        if z.im.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Consistency(format!("imaginary residue {} at n = {n}", z.im)));
        }
    }
    Ok(z.re)
}

/// `a_0 + ... + a_last` from per-root geometric sums.
pub fn partial_sum(r: &Recurrence, last: u64) -> Result<f64> {
    let cf = solve_recurrence(r)?;
    let one = Complex64::new(1.0, 0.0);
    let total: Complex64 = cf
        .terms
        .iter()
        .map(|t| {
            if (t.root - one).norm() <= UNIT_ROOT {
                t.coefficient * (last + 1) as f64
            } else {
                t.coefficient * (pow_complex(t.root, last + 1) - one) / (t.root - one)
            }
        })
        .sum();
    Ok(total.re)
}

/// Two players with `b` stakes each play games won with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DurationSpec {
    pub b: u32,
    pub p: f64,
    pub n: u64,
}

impl DurationSpec {
    pub fn new(b: u32, p: f64, n: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::domain("each player needs at least one stake"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("win probability {p} must lie strictly between 0 and 1")));
        }
        Ok(Self { b, p, n })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

/// `P(duration > n)` by pushing probability mass through the `2b - 1`
/// non-absorbed positions of the walk.
pub fn duration_exceeds_exact(spec: &DurationSpec) -> f64 {
    let b = spec.b as usize;
    let width = 2 * b - 1;
    // index i is position i - (b - 1); ±b absorb
    let mut mass = vec![0.0; width];
    mass[b - 1] = 1.0;
    let mut next = vec![0.0; width];
    for _ in 0..spec.n {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            if i + 1 < width {
                next[i + 1] += spec.p * m;
            }
            if i > 0 {
                next[i - 1] += spec.q() * m;
            }
        }
        std::mem::swap(&mut mass, &mut next);
    }
    mass.iter().sum()
}

/// `(c_j, t_j)` for `j = 1 ..= b/2`, with
/// `t_j = 2pq(1 + cos((2j-1)π/b))` and
/// `c_j = Π_(i≠j)(1 - t_i) / Π_(i≠j)(t_j - t_i)`.
pub fn duration_terms(b: u32, p: f64) -> Result<Vec<(f64, f64)>> {
    if b == 0 || !b.is_multiple_of(2) {
        return Err(Error::domain(format!("the closed form needs an even number of stakes, got {b}")));
    }
    let q = 1.0 - p;
    let half = (b / 2) as usize;
    let t: Vec<f64> = (1..=half)
        .map(|j| 2.0 * p * q * (1.0 + ((2 * j - 1) as f64 * PI / b as f64).cos()))
        .collect();
    Ok((0..half)
        .map(|j| {
            let (num, den) = (0..half).filter(|&i| i != j).fold((1.0, 1.0), |(num, den), i| {
                (num * (1.0 - t[i]), den * (t[j] - t[i]))
            });
            (num / den, t[j])
        })
        .collect())
}

/// Lengths `sin((2j-1)π/b)`, `j = 1 ..= b/2`: the chords of the geometric
/// construction from which the `t_j` are read off.
pub fn sine_lengths(b: u32) -> Vec<f64> {
    (1..=b / 2).map(|j| ((2 * j - 1) as f64 * PI / b as f64).sin()).collect()
}

/// `P(duration > n) = Σ c_j t_j^(n/2)` for even `b`. Odd `n` is reduced to
/// `n - 1`: absorption only happens after an even number of games.
pub fn duration_exceeds_closed(spec: &DurationSpec) -> Result<f64> {
    let terms = duration_terms(spec.b, spec.p)?;
    let half_n = (spec.n / 2) as i32;
    Ok(terms.iter().map(|(c, t)| c * t.powi(half_n)).sum())
}

/// Real factorization of `x^n + 1` (`sign = +1`) or `x^n - 1` (`sign = -1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnityFactorization {
    pub degree: u32,
    pub sign: i8,
    /// Real roots `r`, one factor `x - r` each.
    pub linear_factors: Vec<f64>,
    /// `cos θ` for each factor `x² - 2x cos θ + 1`.
    pub quadratic_factors: Vec<f64>,
}

impl UnityFactorization {
    /// Coefficients of the expanded product, lowest degree first.
    pub fn expand(&self) -> Vec<f64> {
        let mut poly = vec![1.0];
        for &r in &self.linear_factors {
            poly = poly_mul(&poly, &[-r, 1.0]);
        }
        for &c in &self.quadratic_factors {
            poly = poly_mul(&poly, &[1.0, -2.0 * c, 1.0]);
        }
        poly
    }

    /// Coefficients of `x^n ± 1`, lowest degree first.
    pub fn target(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.degree as usize + 1];
        t[0] = self.sign as f64;
        t[self.degree as usize] = 1.0;
        t
    }

    pub fn max_coefficient_error(&self) -> f64 {
        let e = self.expand();
        let t = self.target();
        if e.len() != t.len() {
            return f64::INFINITY;
        }
        e.iter().zip(&t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The roots of `x^n ± 1` sit on the unit circle at angles `π(2k-1)/n`
/// (plus sign) or `2πk/n` (minus sign). Conjugate pairs combine into
/// quadratics; `±1` give linear factors.
pub fn factor_unity(n: u32, sign: i8) -> Result<UnityFactorization> {
    if n == 0 {
        return Err(Error::domain("degree must be at least 1"));
    }
    let mut linear = Vec::new();
    let mut quadratic = Vec::new();
    match sign {
        1 => {
            // angle π(2k-1)/n lies in (0, π) while 2k - 1 < n
            let mut k = 1;
            while 2 * k - 1 < n {
                quadratic.push((PI * (2 * k - 1) as f64 / n as f64).cos());
                k += 1;
            }
            if n % 2 == 1 {
                linear.push(-1.0);
            }
        }
        -1 => {
            linear.push(1.0);
            let mut k = 1;
            while 2 * k < n {
                quadratic.push((2.0 * PI * k as f64 / n as f64).cos());
                k += 1;
            }
            if n.is_multiple_of(2) {
                linear.push(-1.0);
            }
        }
        _ => return Err(Error::usage(format!("sign must be +1 or -1, got {sign}"))),
    }
    Ok(UnityFactorization { degree: n, sign, linear_factors: linear, quadratic_factors: quadratic })
}

/// `(cos θ + i sin θ)^n` computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeMoivrePower {
    /// `(cos nθ, sin nθ)`.
    pub multiple_angle: (f64, f64),
    /// `|n|`-fold complex multiplication, conjugated for negative `n`.
    pub repeated_product: (f64, f64),
}

impl DeMoivrePower {
    pub fn discrepancy(&self) -> f64 {
        let (a, b) = (self.multiple_angle, self.repeated_product);
        (a.0 - b.0).abs().max((a.1 - b.1).abs())
    }
}

pub fn demoivre_power(theta: f64, n: i64) -> DeMoivrePower {
    let nf = n as f64;
    let multiple_angle = ((nf * theta).cos(), (nf * theta).sin());
    let unit = Complex64::new(theta.cos(), theta.sin());
    let mut z = Complex64::new(1.0, 0.0);
    for _ in 0..n.unsigned_abs() {
        z *= unit;
    }
    // |unit| = 1, so the reciprocal is the conjugate
    if n < 0 {
        z = z.conj();
    }
    DeMoivrePower { multiple_angle, repeated_product: (z.re, z.im) }
}
