//! Life annuities on the Breslau table and on the linear law.
//!
//! `cargo run --example life_annuities`            prices and the error grid
//! `cargo run --example life_annuities -- --csv`   the reconstructed table as CSV

use doctrine::lifeannuity::{self, DeMoivreLaw, MatyTail, RateSpec};

fn main() -> doctrine::Result<()> {
    let table = lifeannuity::reconstruct_maty_table();
    if std::env::args().any(|a| a == "--csv") {
        print!("{}", table.to_csv());
        return Ok(());
    }
    let law = DeMoivreLaw::default();
    let rate = RateSpec::new(0.05)?;
    println!("{:>4}  {:>8}  {:>8}  {:>8}", "age", "table", "law", "closed");
    for x in [20, 30, 40, 50, 60, 70, 80] {
        println!(
            "{x:>4}  {:>8.4}  {:>8.4}  {:>8.4}",
            lifeannuity::annuity_value(&table, x, rate)?,
            lifeannuity::annuity_value(&law, x, rate)?,
            lifeannuity::law_annuity_closed_form(&law, x, rate)?
        );
    }
    println!("joint life 40 and 30 at 5%: {:.4}", lifeannuity::joint_annuity_value(&table, 40, &table, 30, rate)?);
    println!("survival 12 -> 42: {:.4}", lifeannuity::survival_probability(&table, 12, 30)?);

    let ages: Vec<u32> = (20..=70).step_by(5).collect();
    let rates = [0.03, 0.05, 0.07];
    for (name, t) in [("to 86", table.clone()), ("tail to 100", lifeannuity::reconstruct_maty_table_with(MatyTail::LinearTo100))] {
        let grid = lifeannuity::approximation_error_table(&t, &ages, &rates)?;
        println!("percentage error of the law, table {name}:");
        print!("  rate");
        for a in &grid.ages {
            print!("{a:>7}");
        }
        println!();
        for (r, row) in grid.rates.iter().zip(&grid.entries) {
            print!("  {:>3.0}%", r * 100.0);
            for e in row {
                print!("{e:>+7.2}");
            }
            println!();
        }
    }
    Ok(())
}
