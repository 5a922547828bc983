//! Odds that matching decks were arranged, and a knight's tour.
//!
//! `cargo run --example chance_and_design -- [start-square]`

use doctrine::exactnum;
use doctrine::games::{self, Square, TourVerdict};

fn main() -> doctrine::Result<()> {
    for k in [3, 13, 32, 52] {
        let odds = games::deck_match_odds(k)?;
        println!("two decks of {k:>2} in the same order: odds {} to 1 on design", exactnum::times_power_of_ten(odds.favour(), 8));
    }

    let start: Square = std::env::args().nth(1).as_deref().unwrap_or("a1").parse()?;
    let tour = games::find_tour(start);
    for row in tour.squares().chunks(16) {
        println!("  {}", row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    }
    assert_eq!(games::validate_tour(tour.squares()), TourVerdict::Valid);
    let mut swapped = tour.squares().to_vec();
    swapped.swap(10, 20);
    println!("after swapping two squares: {:?}", games::validate_tour(&swapped));
    Ok(())
}
