//! Seeded simulation of the central band beside the exact value.
//!
//! `cargo run --release --example simulation -- [seed] [reps]`

use doctrine::binomlimit::{self, TrialSpec};

fn main() -> doctrine::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1733);
    let reps: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);

    for n in [100, 900, 3600] {
        let spec = TrialSpec::fair(n)?;
        let exact = binomlimit::exact_central_probability(&spec, 1.0)?.to_f64();
        let simulated = binomlimit::simulate_band(&spec, 1.0, reps, seed)?;
        let se = (exact * (1.0 - exact) / reps as f64).sqrt();
        println!(
            "n = {n:>5}: simulated {simulated:.4}, exact {exact:.4}, z = {:+.2}",
            (simulated - exact) / se
        );
    }
    println!("seed {seed}, {reps} replicates; rerunning gives the same digits on any thread count");
    Ok(())
}
