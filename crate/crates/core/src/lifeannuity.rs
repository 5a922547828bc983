//! Life tables, the linear mortality law and curtate life annuities.
//!
//! Annuities pay 1 at the end of each year the annuitant survives; the
//! payment for the year of death is forfeited. For a cohort of `l_x` lives at
//! age `x` the price is
//!
//! ```text
//! a_x = Σ_{t≥1} v^t · l_{x+t} / l_x,    v = 1/(1+i)
//! ```
//!
//! Under the linear law with limiting age `ω`, `l_{x+t} ∝ max(0, ω - x - t)`:
//! of the `n = ω - x` lives, one dies every year.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Limiting age of the linear law used for the comparison grid.
pub const MATY_OMEGA: u32 = 86;

/// Something that can say how many of a cohort observed at age `x` are still
/// alive `t` years later.
pub trait Mortality {
    /// Ok when `x` is a valid starting age.
    fn check_age(&self, x: u32) -> Result<()>;

    /// Unnormalized survivors at age `x + t` for a cohort observed at `x`;
    /// zero once everyone has died. Only meaningful after `check_age(x)`.
    fn cohort(&self, x: u32, t: u32) -> f64;

    /// Years after which nobody observed at `x` survives; `None` if never.
    fn horizon(&self, x: u32) -> Option<u32>;

    /// `t`-year survival probability from age `x`.
    fn survival(&self, x: u32, t: u32) -> Result<f64> {
        self.check_age(x)?;
        Ok(self.cohort(x, t) / self.cohort(x, 0))
    }
}

/// Survivor counts for consecutive integer ages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifeTable {
    start_age: u32,
    survivors: Vec<f64>,
    /// Set when part of the table is an extrapolation rather than data.
    note: Option<String>,
}

impl LifeTable {
    /// Entries must be positive, finite and non-increasing.
    pub fn new(start_age: u32, survivors: Vec<f64>) -> Result<Self> {
        if survivors.is_empty() {
            return Err(Error::domain("a life table needs at least one age"));
        }
        for (i, &l) in survivors.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::domain(format!("l at age {} is {l}; entries must be positive", start_age + i as u32)));
            }
            if i > 0 && l > survivors[i - 1] {
                return Err(Error::domain(format!("l increases at age {}", start_age + i as u32)));
            }
        }
        Ok(Self { start_age, survivors, note: None })
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn start_age(&self) -> u32 {
        self.start_age
    }

    /// Last age with a positive survivor count.
    pub fn terminal_age(&self) -> u32 {
        self.start_age + self.survivors.len() as u32 - 1
    }

    pub fn survivors(&self) -> &[f64] {
        &self.survivors
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    /// `l_x`, zero past the table end, `None` before its start.
    pub fn lx(&self, age: u32) -> Option<f64> {
        let idx = age.checked_sub(self.start_age)? as usize;
        Some(self.survivors.get(idx).copied().unwrap_or(0.0))
    }

    /// Reads the `age,lx` CSV format.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table { line: 1, message: e.to_string() })?;
        if headers.len() != 2 || &headers[0] != "age" || &headers[1] != "lx" {
            return Err(Error::Table { line: 1, message: format!("expected header `age,lx`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")) });
        }
        let mut start = None;
        let mut survivors: Vec<f64> = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::Table { line, message: e.to_string() }
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let bad = |message: String| Error::Table { line, message };
            if record.len() != 2 {
                return Err(bad(format!("expected 2 fields, found {}", record.len())));
            }
            let age: u32 = record[0].parse().map_err(|_| bad(format!("age {:?} is not a non-negative integer", &record[0])))?;
            let lx: f64 = record[1].parse().map_err(|_| bad(format!("lx {:?} is not a number", &record[1])))?;
            match start {
                None => start = Some(age),
                Some(s) => {
                    let expected = s + survivors.len() as u32;
                    if age != expected {
                        return Err(bad(format!("ages must be contiguous and ascending: expected {expected}, found {age}")));
                    }
                }
            }
            if !(lx.is_finite() && lx > 0.0) {
                return Err(bad(format!("lx must be positive, found {lx}")));
            }
            if let Some(&prev) = survivors.last() {
                if lx > prev {
                    return Err(bad(format!("lx increases from {prev} to {lx}")));
                }
            }
            survivors.push(lx);
        }
        let start = start.ok_or(Error::Table { line: 1, message: "table has no rows".into() })?;
        LifeTable::new(start, survivors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv(file)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("age,lx\n");
        for (i, l) in self.survivors.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.start_age + i as u32, l);
        }
        out
    }

    /// Table implied by the linear law: `l_x = ω - x` from `start_age` to `ω - 1`.
    pub fn from_law(law: &DeMoivreLaw, start_age: u32) -> Result<Self> {
        if start_age >= law.omega {
            return Err(Error::domain(format!("start age {start_age} must be below ω = {}", law.omega)));
        }
        LifeTable::new(start_age, (start_age..law.omega).map(|x| (law.omega - x) as f64).collect())
    }
}

impl Mortality for LifeTable {
    fn check_age(&self, x: u32) -> Result<()> {
        if x < self.start_age || x > self.terminal_age() {
            return Err(Error::domain(format!(
                "age {x} outside the table ({}..={})",
                self.start_age,
                self.terminal_age()
            )));
        }
        Ok(())
    }

    fn cohort(&self, x: u32, t: u32) -> f64 {
        self.lx(x.saturating_add(t)).unwrap_or(0.0)
    }

    fn horizon(&self, x: u32) -> Option<u32> {
        Some(self.terminal_age() + 1 - x)
    }
}

/// Linear mortality: of `ω - x` lives aged `x`, one dies each year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeMoivreLaw {
    pub omega: u32,
}

impl Default for DeMoivreLaw {
    fn default() -> Self {
        Self { omega: MATY_OMEGA }
    }
}

impl DeMoivreLaw {
    pub fn new(omega: u32) -> Result<Self> {
        if omega == 0 {
            return Err(Error::domain("limiting age must be positive"));
        }
        Ok(Self { omega })
    }

    /// Complement of life `n = ω - x`.
    pub fn complement(&self, x: u32) -> Result<u32> {
        self.check_age(x)?;
        Ok(self.omega - x)
    }
}

impl Mortality for DeMoivreLaw {
    fn check_age(&self, x: u32) -> Result<()> {
        if x >= self.omega {
            return Err(Error::domain(format!("age {x} is not below the limiting age {}", self.omega)));
        }
        Ok(())
    }

    fn cohort(&self, x: u32, t: u32) -> f64 {
        self.omega.saturating_sub(x).saturating_sub(t) as f64
    }

    fn horizon(&self, x: u32) -> Option<u32> {
        Some(self.omega.saturating_sub(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSpec {
    pub i: f64,
}

impl RateSpec {
    pub fn new(i: f64) -> Result<Self> {
        if !i.is_finite() || i <= -1.0 {
            return Err(Error::domain(format!("interest rate {i} must exceed -1")));
        }
        Ok(Self { i })
    }

    pub fn v(&self) -> f64 {
        1.0 / (1.0 + self.i)
    }
}

/// How the reconstructed table continues past age 86.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatyTail {
    /// Table ends at 86 with 20 survivors.
    #[default]
    None,
    /// Survivors fall linearly from 20 at 86 to none at 100.
    LinearTo100,
}

/// Annual deaths for ages `[from, to)` in the reconstruction of the Breslau
/// table: 646 lives at 12, then the death counts of each run of years.
const MATY_DEATHS: &[(u32, u32, f64)] = &[
    (12, 25, 6.0),
    (25, 29, 7.0),
    (29, 34, 8.0),
    (34, 42, 9.0),
    (42, 49, 10.0),
    (49, 54, 11.0),
    (54, 70, 10.0),
    (70, 74, 11.0),
    (74, 78, 10.0),
    (78, 79, 9.0),
    (79, 80, 8.0),
    (80, 81, 7.0),
    (81, 82, 6.0),
    // 29 → 20 over four years; the split is not recorded
    (82, 83, 3.0),
    (83, 86, 2.0),
];

/// The Breslau table as described year by year for 646 lives aged 12,
/// ending at 86 with 20 survivors.
pub fn reconstruct_maty_table() -> LifeTable {
    reconstruct_maty_table_with(MatyTail::None)
}

pub fn reconstruct_maty_table_with(tail: MatyTail) -> LifeTable {
    let mut survivors = vec![646.0];
    for &(from, to, deaths) in MATY_DEATHS {
        for _ in from..to {
            let last = *survivors.last().unwrap();
            survivors.push(last - deaths);
        }
    }
    match tail {
        MatyTail::None => LifeTable::new(12, survivors).expect("reconstruction is a valid table"),
        MatyTail::LinearTo100 => {
            survivors.extend((87..100).map(|x| 20.0 * (100 - x) as f64 / 14.0));
            LifeTable::new(12, survivors)
                .expect("reconstruction is a valid table")
                .with_note("ages 87-99 extrapolated linearly from 20 lives at 86 to none at 100")
        }
    }
}

/// `t`-year survival from age `x`.
pub fn survival_probability(model: &dyn Mortality, x: u32, t: u32) -> Result<f64> {
    model.survival(x, t)
}

/// Curtate life annuity-immediate `Σ_{t≥1} v^t · s(x, t)`.
pub fn annuity_value(model: &dyn Mortality, x: u32, rate: RateSpec) -> Result<f64> {
    model.check_age(x)?;
    let horizon = model
        .horizon(x)
        .ok_or_else(|| Error::domain("survival never reaches zero; the annuity is unbounded"))?;
    let v = rate.v();
    let mut discount = 1.0;
    let mut total = 0.0;
    for t in 1..=horizon {
        discount *= v;
        total += discount * model.cohort(x, t);
    }
    Ok(total / model.cohort(x, 0))
}

/// Joint-life annuity paying while both independent lives survive.
pub fn joint_annuity_value(
    model_a: &dyn Mortality,
    x: u32,
    model_b: &dyn Mortality,
    y: u32,
    rate: RateSpec,
) -> Result<f64> {
    model_a.check_age(x)?;
    model_b.check_age(y)?;
    let horizon = match (model_a.horizon(x), model_b.horizon(y)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(Error::domain("neither life ever dies; the annuity is unbounded")),
    };
    let v = rate.v();
    let mut discount = 1.0;
    let mut total = 0.0;
    for t in 1..=horizon {
        discount *= v;
        total += discount * model_a.cohort(x, t) * model_b.cohort(y, t);
    }
    Ok(total / (model_a.cohort(x, 0) * model_b.cohort(y, 0)))
}

/// Closed form of the linear-law annuity: with `n = ω - x` and
/// `a_n = (1 - v^n)/i`, the price is `(1 - (1+i)·a_n/n) / i`, or `(n-1)/2`
/// at zero interest.
pub fn law_annuity_closed_form(law: &DeMoivreLaw, x: u32, rate: RateSpec) -> Result<f64> {
    let n = law.complement(x)? as f64;
    let i = rate.i;
    if i == 0.0 {
        return Ok((n - 1.0) / 2.0);
    }
    let certain = (1.0 - rate.v().powf(n)) / i;
    Ok((1.0 - (1.0 + i) * certain / n) / i)
}

/// Percentage by which the linear-law price exceeds the table price.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub ages: Vec<u32>,
    pub rates: Vec<f64>,
    /// `entries[r][a]` for `rates[r]` and `ages[a]`.
    pub entries: Vec<Vec<f64>>,
    pub note: Option<String>,
}

impl ErrorTable {
    pub fn get(&self, age: u32, rate: f64) -> Option<f64> {
        let a = self.ages.iter().position(|&x| x == age)?;
        let r = self.rates.iter().position(|&x| x == rate)?;
        Some(self.entries[r][a])
    }
}

/// `100 · (a_x under the law with ω = 86 / a_x under the table - 1)`.
pub fn approximation_error_table(table: &LifeTable, ages: &[u32], rates: &[f64]) -> Result<ErrorTable> {
    approximation_error_table_against(table, &DeMoivreLaw::default(), ages, rates)
}

pub fn approximation_error_table_against(
    table: &LifeTable,
    law: &DeMoivreLaw,
    ages: &[u32],
    rates: &[f64],
) -> Result<ErrorTable> {
    let mut entries = Vec::with_capacity(rates.len());
    for &i in rates {
        let rate = RateSpec::new(i)?;
        let row = ages
            .iter()
            .map(|&x| {
                let approx = annuity_value(law, x, rate)?;
                let truth = annuity_value(table, x, rate)?;
                if truth == 0.0 {
                    return Err(Error::domain(format!("table annuity at age {x} is zero")));
                }
                Ok(100.0 * (approx / truth - 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    Ok(ErrorTable { ages: ages.to_vec(), rates: rates.to_vec(), entries, note: table.note.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Everyone lives forever.
    struct Immortal;

    impl Mortality for Immortal {
        fn check_age(&self, _: u32) -> Result<()> {
            Ok(())
        }
        fn cohort(&self, _: u32, _: u32) -> f64 {
            1.0
        }
        fn horizon(&self, _: u32) -> Option<u32> {
            None
        }
    }

    /// Term-by-term oracle, independent of the cohort formulation.
    fn direct_sum(model: &dyn Mortality, x: u32, i: f64) -> f64 {
        let v = 1.0 / (1.0 + i);
        (1..200).map(|t| v.powi(t as i32) * model.survival(x, t).unwrap()).sum()
    }

    #[test]
    fn maty_checkpoints() {
        let t = reconstruct_maty_table();
        let expect = [
            (12, 646.0),
            (25, 568.0),
            (29, 540.0),
            (34, 500.0),
            (42, 428.0),
            (49, 358.0),
            (54, 303.0),
            (70, 143.0),
            (74, 99.0),
            (78, 59.0),
            (82, 29.0),
            (86, 20.0),
        ];
        for (age, l) in expect {
            assert_eq!(t.lx(age), Some(l), "age {age}");
        }
        assert_eq!(t.terminal_age(), 86);
        assert_eq!(t.note(), None);
        let tail = reconstruct_maty_table_with(MatyTail::LinearTo100);
        assert_eq!(tail.terminal_age(), 99);
        assert_eq!(tail.lx(86), Some(20.0));
        assert!((tail.lx(93).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(tail.lx(100), Some(0.0));
        assert!(tail.note().is_some());
    }

    #[test]
    fn survival_examples() {
        let law = DeMoivreLaw::default();
        assert_eq!(survival_probability(&law, 50, 18).unwrap(), 0.5);
        assert_eq!(survival_probability(&law, 50, 36).unwrap(), 0.0);
        assert!(survival_probability(&law, 86, 1).is_err());
        let t = reconstruct_maty_table();
        assert_eq!(survival_probability(&t, 12, 13).unwrap(), 568.0 / 646.0);
        assert_eq!(survival_probability(&t, 80, 10).unwrap(), 0.0);
        assert!(survival_probability(&t, 11, 1).is_err());
        assert!(survival_probability(&t, 87, 0).is_err());
    }

    #[test]
    fn survival_is_multiplicative() {
        let t = reconstruct_maty_table_with(MatyTail::LinearTo100);
        for x in (12..90).step_by(7) {
            for a in 0..15 {
                for b in 0..15 {
                    if x + a > t.terminal_age() {
                        continue;
                    }
                    let lhs = t.survival(x, a + b).unwrap();
                    let rhs = t.survival(x, a).unwrap() * t.survival(x + a, b).unwrap();
                    assert!((lhs - rhs).abs() < 1e-15);
                    assert!(t.survival(x, a + 1).unwrap() <= t.survival(x, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn annuity_examples() {
        let law = DeMoivreLaw::default();
        assert_eq!(annuity_value(&law, 85, RateSpec::new(0.05).unwrap()).unwrap(), 0.0);
        assert_eq!(annuity_value(&law, 50, RateSpec::new(0.0).unwrap()).unwrap(), 17.5);
        let v = annuity_value(&law, 50, RateSpec::new(0.05).unwrap()).unwrap();
        assert!((v - direct_sum(&law, 50, 0.05)).abs() < 1e-12);
        let t = reconstruct_maty_table();
        for x in [12, 30, 50, 70, 86] {
            let v = annuity_value(&t, x, RateSpec::new(0.04).unwrap()).unwrap();
            assert!((v - direct_sum(&t, x, 0.04)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_interest_identity() {
        let law = DeMoivreLaw::default();
        for x in 0..86 {
            let n = 86 - x;
            let v = annuity_value(&law, x, RateSpec::new(0.0).unwrap()).unwrap();
            assert_eq!(v, (n as f64 - 1.0) / 2.0);
        }
    }

    #[test]
    fn closed_form_matches_summation() {
        let law = DeMoivreLaw::default();
        for x in 0..86 {
            for i in [0.0, 0.01, 0.03, 0.05, 0.07, 0.12] {
                let rate = RateSpec::new(i).unwrap();
                let a = annuity_value(&law, x, rate).unwrap();
                let b = law_annuity_closed_form(&law, x, rate).unwrap();
                assert!((a - b).abs() < 1e-12, "x={x} i={i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn annuity_decreases_with_interest() {
        let t = reconstruct_maty_table();
        for x in [20, 50, 80] {
            let mut prev = f64::INFINITY;
            for k in 0..20 {
                let v = annuity_value(&t, x, RateSpec::new(k as f64 * 0.01).unwrap()).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn joint_annuities() {
        let law = DeMoivreLaw::default();
        let rate0 = RateSpec::new(0.0).unwrap();
        let expected: f64 = (1..=35).map(|t| ((36 - t) as f64 / 36.0).powi(2)).sum();
        let v = joint_annuity_value(&law, 50, &law, 50, rate0).unwrap();
        assert!((v - expected).abs() < 1e-12);

        let t = reconstruct_maty_table();
        let rate = RateSpec::new(0.05).unwrap();
        assert_eq!(joint_annuity_value(&t, 86, &law, 40, rate).unwrap(), 0.0);
        assert_eq!(joint_annuity_value(&law, 85, &t, 40, rate).unwrap(), 0.0);

        let single_a = annuity_value(&t, 40, rate).unwrap();
        let single_b = annuity_value(&law, 60, rate).unwrap();
        let joint = joint_annuity_value(&t, 40, &law, 60, rate).unwrap();
        assert!(joint <= single_a.min(single_b));

        let with_immortal = joint_annuity_value(&t, 40, &Immortal, 3, rate).unwrap();
        assert_eq!(with_immortal, single_a);
        assert!(joint_annuity_value(&Immortal, 1, &Immortal, 1, rate).is_err());
        assert!(annuity_value(&Immortal, 1, rate).is_err());
    }

    #[test]
    fn self_comparison_is_zero() {
        let law = DeMoivreLaw::default();
        let table = LifeTable::from_law(&law, 12).unwrap();
        let grid = approximation_error_table(&table, &[20, 50, 80], &[0.03, 0.05, 0.07]).unwrap();
        for row in &grid.entries {
            for e in row {
                assert!(e.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn age_fifty_five_percent() {
        let grid = approximation_error_table(&reconstruct_maty_table(), &[50], &[0.05]).unwrap();
        let e = grid.get(50, 0.05).unwrap();
        assert!(e > 2.5 && e < 5.5, "{e}");
    }

    #[test]
    fn csv_round_trip() {
        let t = reconstruct_maty_table_with(MatyTail::LinearTo100);
        let back = LifeTable::from_csv(t.to_csv().as_bytes()).unwrap();
        assert_eq!(back.survivors(), t.survivors());
        assert_eq!(back.start_age(), 12);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let cases = [
            ("age,l\n1,2\n", 1),
            ("age,lx\n10,100\n11,90\n13,80\n", 4),
            ("age,lx\n10,100\n11,120\n", 3),
            ("age,lx\n10,100\n11,0\n", 3),
            ("age,lx\n10,100\n11,abc\n", 3),
            ("age,lx\n10,100\nx,90\n", 3),
            ("age,lx\n", 1),
        ];
        for (text, line) in cases {
            match LifeTable::from_csv(text.as_bytes()) {
                Err(Error::Table { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn rate_validation() {
        assert!(RateSpec::new(-1.0).is_err());
        assert!(RateSpec::new(f64::NAN).is_err());
        let r = RateSpec::new(0.05).unwrap();
        assert!((r.v() * 1.05 - 1.0).abs() < 1e-15);
    }
}
