//! The focal product of an ellipse and the inverse-square law toward a focus.
//!
//! `cargo run --example conic_force -- [a] [b]`

use std::f64::consts::PI;

use doctrine::conics::{self, Ellipse};

fn main() -> doctrine::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>());
    let a = args.next().and_then(Result::ok).unwrap_or(2.0);
    let b = args.next().and_then(Result::ok).unwrap_or(1.0);
    let e = Ellipse::new(a, b)?;
    println!("ellipse a = {a}, b = {b}, focus at ({:.6}, 0)", e.c());
    println!("{:>7}  {:>10}  {:>10}  {:>10}  {:>12}", "θ", "FM·FM'", "CD²", "R", "force·FM²");
    for k in 0..8 {
        let theta = k as f64 * PI / 8.0;
        let fp = conics::focal_product(&e, theta);
        let force = conics::centripetal_force(&e, theta) * conics::focal_radius(&e, theta).powi(2);
        println!(
            "{theta:>7.4}  {:>10.6}  {:>10.6}  {:>10.6}  {:>12.9}",
            fp.product,
            fp.halfdiam_sq,
            conics::radius_of_curvature(&e, theta),
            force
        );
    }
    let inv = conics::inverse_square_constant(&e, 720)?;
    println!("force·FM² = {:.12} (a/b² = {:.12}), spread {:.1e}", inv.constant, a / (b * b), inv.max_relative_deviation);
    Ok(())
}
