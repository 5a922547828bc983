//! Raising, composing and reverting power series with exact coefficients.
//!
//! `cargo run --example series_reversion`

use doctrine::exactnum::ratio;
use doctrine::series::{self, PowerSeries};

fn main() -> doctrine::Result<()> {
    for t in series::multinomial_coefficient_terms(6, 3) {
        println!("x^6 in s^3 collects {} × a{:?}", t.count, t.degrees);
    }

    // y = x + x^2 reverts to the Catalan numbers with alternating signs
    let s = PowerSeries::new(vec![ratio(1, 1), ratio(1, 1)]);
    let t = series::revert_series(&s, 8)?;
    println!("revert(x + x²) = {t}");
    println!("check s(t(x)) = {}", series::compose_series(&s, &t, 8));

    // log(1 + x) reverts to exp(x) - 1
    let log: PowerSeries = PowerSeries::new((1..=7).map(|k| ratio(if k % 2 == 1 { 1 } else { -1 }, k)).collect());
    println!("revert(log(1+x)) = {}", series::revert_series(&log, 7)?);

    let cube = series::raise_series(&PowerSeries::new(vec![ratio(1, 1), ratio(1, 1), ratio(1, 1)]), 3, 6)?;
    println!("(x + x² + x³)³ = {cube}");

    let real: PowerSeries<f64> = PowerSeries::new(vec![1.0, -0.5, 1.0 / 3.0]);
    println!("real mode: {}", series::revert_series(&real, 4)?);
    Ok(())
}
