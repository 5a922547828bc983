//! Classical probability and actuarial numerics.
//!
//! The crate collects the computational methods of Abraham De Moivre's work on
//! chance and annuities, each paired with an independent brute-force check:
//!
//! * [`exactnum`]: exact integers, rationals and odds.
//! * [`series`]: truncated power series, multinomial powers, composition and reversion.
//! * [`binomlimit`]: the normal limit of the symmetric binomial, exact band
//!   probabilities, the Bernoulli sample-size problem and seeded simulation.
//! * [`recurrence`]: recurrent series, the duration of play, roots-of-unity
//!   factorizations and the multiple-angle identity.
//! * [`lifeannuity`]: life tables, the linear mortality law and curtate annuities.
//! * [`conics`]: the focal-product identity and the central-force law on an ellipse.
//! * [`games`]: deck-matching odds and the knight's tour.
//! * [`cli`]: the command-line front end behind the `doctrine` binary.
//!
//! Runnable programs for each capability live in the crate's `examples/` directory.
//!
//! ```
//! use doctrine::binomlimit::{exact_central_probability, limit_central_probability, TrialSpec};
//!
//! let exact = exact_central_probability(&TrialSpec::fair(3600)?, 1.0)?;
//! let limit = limit_central_probability(1.0)?;
//! assert!((exact.to_f64() - limit).abs() < 0.01);
//! assert_eq!(doctrine::binomlimit::remark1_fraction(3600)?, doctrine::exactnum::ratio(1, 120));
//! # Ok::<(), doctrine::Error>(())
//! ```

pub mod binomlimit;
pub mod cli;
pub mod conics;
pub mod error;
pub mod exactnum;
pub mod games;
pub mod lifeannuity;
pub mod recurrence;
pub mod series;

pub use error::{Error, Result};
