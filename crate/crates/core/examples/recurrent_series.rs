//! Recurrent series as sums of geometric progressions, and the factors of x^n ± 1.
//!
//! `cargo run --example recurrent_series`

use std::f64::consts::PI;

use doctrine::recurrence::{self, Recurrence};

fn main() -> doctrine::Result<()> {
    let fib = Recurrence::new(vec![1.0, 1.0], vec![0.0, 1.0])?;
    let cf = recurrence::solve_recurrence(&fib)?;
    for t in &cf.terms {
        println!("Fibonacci term {:.6} · ({:.6})^n", t.coefficient.re, t.root.re);
    }
    println!("F_30 = {}, sum F_0..F_30 = {}", recurrence::eval_closed_form(&cf, 30)?, recurrence::partial_sum(&fib, 30)?);

    let theta = PI / 7.0;
    let cosines = Recurrence::new(vec![2.0 * theta.cos(), -1.0], vec![1.0, theta.cos()])?;
    let cf = recurrence::solve_recurrence(&cosines)?;
    println!("cos(5π/7) from the recurrence {:.12}, directly {:.12}", recurrence::eval_closed_form(&cf, 5)?, (5.0 * theta).cos());

    for (n, sign) in [(5, 1), (6, -1)] {
        let f = recurrence::factor_unity(n, sign)?;
        let label = if sign > 0 { "+" } else { "-" };
        let mut parts: Vec<String> = f.linear_factors.iter().map(|r| format!("(x {:+})", -r)).collect();
        parts.extend(f.quadratic_factors.iter().map(|c| format!("(x² {:+.4}x + 1)", -2.0 * c)));
        println!("x^{n} {label} 1 = {}   [error {:.1e}]", parts.join(""), f.max_coefficient_error());
    }

    let p = recurrence::demoivre_power(0.4, 9);
    println!("(cos 0.4 + i sin 0.4)^9 = {:.12} + {:.12}i, discrepancy {:.1e}", p.multiple_angle.0, p.multiple_angle.1, p.discrepancy());
    Ok(())
}
