//! Exact binomial bands against their limit, and the sample size question.
//!
//! `cargo run --example binomial_limit`

use doctrine::binomlimit::{self, TrialSpec};
use doctrine::exactnum::{self, ratio};

fn main() -> doctrine::Result<()> {
    let limit = binomlimit::limit_central_probability(1.0)?;
    println!("P(|X - n/2| <= sqrt(n)/2) as n grows; limit {limit:.6}");
    println!("{:>6}  {:>9}  {:>9}", "n", "exact", "gap");
    for n in [100, 400, 1600, 3600, 10_000] {
        let p = binomlimit::exact_central_probability(&TrialSpec::fair(n)?, 1.0)?.to_f64();
        println!("{n:>6}  {p:>9.6}  {:>+9.6}", p - limit);
    }

    for c in [2.0, 3.0] {
        println!("limit at c = {c}: {:.6}", binomlimit::limit_central_probability(c)?);
    }

    let odds = exactnum::odds_from_probability(&ratio(28, 41))?;
    println!("probability 28/41 is odds {odds}");

    for n in [3600, 14_400, 1_000_000] {
        println!("central term of n = {n} is near {}", binomlimit::remark1_fraction(n)?);
    }
    let central = exactnum::rational_to_f64(&binomlimit::exact_central_term(3600)?);
    println!("exact central term at 3600: {central:.8} vs approximation {:.8}", binomlimit::demoivre_term(3600, 0));

    let (p, c, alpha) = (ratio(1, 2), ratio(1, 50), ratio(1, 20));
    let n = binomlimit::sample_size(&p, &c, &alpha)?;
    let gaussian = binomlimit::gaussian_sample_size(0.5, 0.02, 0.05)?;
    println!("trials for frequency within 1/50 of 1/2 with probability 19/20: {n} (normal estimate {gaussian})");
    Ok(())
}
