//! Focal properties of the ellipse and the central-force law.
//!
//! Points are parametrized by the eccentric angle, `M = (a cos θ, b sin θ)`,
//! with foci at `(±c, 0)`. Two facts are checked numerically:
//!
//! * the focal radii multiply to the square of the half-diameter parallel to
//!   the tangent at `M`;
//! * the force toward the focus, `FM / (R · FP³)` with `R` the radius of
//!   curvature and `FP` the perpendicular from the focus onto the tangent,
//!   varies as `1/FM²` along the orbit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ellipse {
    a: f64,
    b: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0 && a >= b && a.is_finite()) {
            return Err(Error::domain(format!("need a ≥ b > 0, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Focal distance `√(a² - b²)`.
    pub fn c(&self) -> f64 {
        ((self.a - self.b) * (self.a + self.b)).sqrt()
    }

    pub fn point(&self, theta: f64) -> OrbitPoint {
        OrbitPoint { theta, position: (self.a * theta.cos(), self.b * theta.sin()) }
    }

    /// Unit tangent at eccentric angle `theta`.
    fn tangent(&self, theta: f64) -> (f64, f64) {
        let (dx, dy) = (-self.a * theta.sin(), self.b * theta.cos());
        let len = dx.hypot(dy);
        (dx / len, dy / len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub theta: f64,
    pub position: (f64, f64),
}

fn distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Focal radius `FM` to the force centre at `(+c, 0)`.
pub fn focal_radius(e: &Ellipse, theta: f64) -> f64 {
    distance(e.point(theta).position, (e.c(), 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalProduct {
    /// Product of the distances from `M` to the two foci.
    pub product: f64,
    /// Squared length of the centre-to-ellipse segment parallel to the tangent at `M`.
    pub halfdiam_sq: f64,
}

impl FocalProduct {
    pub fn relative_gap(&self) -> f64 {
        (self.product - self.halfdiam_sq).abs() / self.halfdiam_sq.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn focal_product(e: &Ellipse, theta: f64) -> FocalProduct {
    let m = e.point(theta).position;
    let c = e.c();
    let product = distance(m, (c, 0.0)) * distance(m, (-c, 0.0));
    // the ray s·u from the centre meets the ellipse where (s·ux/a)² + (s·uy/b)² = 1
    let (ux, uy) = e.tangent(theta);
    let halfdiam_sq = 1.0 / ((ux / e.a).powi(2) + (uy / e.b).powi(2));
    FocalProduct { product, halfdiam_sq }
}

/// `(a² sin²θ + b² cos²θ)^{3/2} / (a b)`.
pub fn radius_of_curvature(e: &Ellipse, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let q = e.a * e.a * s * s + e.b * e.b * c * c;
    q * q.sqrt() / (e.a * e.b)
}

/// Distance `FP` from the focus `(+c, 0)` to the tangent line at `M`.
pub fn focal_perpendicular(e: &Ellipse, theta: f64) -> f64 {
    let m = e.point(theta).position;
    let (ux, uy) = e.tangent(theta);
    let (fx, fy) = (m.0 - e.c(), m.1);
    (fx * uy - fy * ux).abs()
}

/// `FM / (R · FP³)`.
pub fn centripetal_force(e: &Ellipse, theta: f64) -> f64 {
    let fm = focal_radius(e, theta);
    let fp = focal_perpendicular(e, theta);
    fm / (radius_of_curvature(e, theta) * fp.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseSquare {
    /// Mean of `force · FM²` over the grid.
    pub constant: f64,
    pub max_relative_deviation: f64,
}

/// Samples `force · FM²` on `samples` uniformly spaced angles in `[0, 2π)`.
pub fn inverse_square_constant(e: &Ellipse, samples: usize) -> Result<InverseSquare> {
    if samples < 3 {
        return Err(Error::domain(format!("need at least 3 samples, got {samples}")));
    }
    let values: Vec<f64> = (0..samples)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / samples as f64;
            centripetal_force(e, theta) * focal_radius(e, theta).powi(2)
        })
        .collect();
    let constant = values.iter().sum::<f64>() / samples as f64;
    let max_relative_deviation = values.iter().map(|v| (v - constant).abs() / constant.abs()).fold(0.0, f64::max);
    Ok(InverseSquare { constant, max_relative_deviation })
}
