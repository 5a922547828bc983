//! How long two players last: the Markov chain next to the closed form.
//!
//! `cargo run --example duration_of_play`

use doctrine::recurrence::{self, DurationSpec};

fn main() -> doctrine::Result<()> {
    let (b, p) = (10, 0.5);
    println!("each player holds {b} stakes, p = {p}");
    for (j, ((c, t), len)) in recurrence::duration_terms(b, p)?.iter().zip(recurrence::sine_lengths(b)).enumerate() {
        println!("  j = {}: t = {t:.6}, c = {c:+.6}, sin((2j-1)π/b) = {len:.6}", j + 1);
    }
    println!("{:>5}  {:>12}  {:>12}", "n", "markov", "closed");
    for n in [10, 20, 50, 100, 200] {
        let spec = DurationSpec::new(b, p, n)?;
        println!(
            "{n:>5}  {:>12.9}  {:>12.9}",
            recurrence::duration_exceeds_exact(&spec),
            recurrence::duration_exceeds_closed(&spec)?
        );
    }
    let uneven = DurationSpec::new(4, 0.6, 25)?;
    println!("b = 4, p = 0.6, odd n = 25: {:.9}", recurrence::duration_exceeds_closed(&uneven)?);
    Ok(())
}
