//! Sensory-aware point-of-interest recommendation.
//!
//! This crate turns two complementary signals into rating predictions
//! for city places (restaurants, squares, museums, …):
//!
//! * **what a place is like** — five sensory features (brightness,
//!   crowding, noise, smell, openness) on a 1–5 scale, either extracted
//!   from dependency-parsed Italian reviews ([`extraction`]) or taken
//!   from crowdsourced tables ([`profiles`]), with a count-weighted
//!   fusion of both sources;
//! * **what a person can stand** — per-feature aversion intensities
//!   that induce piecewise-linear compatibility curves
//!   ([`compatibility`]), plus per-category preferences.
//!
//! Feature compatibilities are folded into a single score by one of
//! four measures ([`aggregation`]) and combined with the stated
//! preference by one of four algorithm families ([`recommender`]).
//! The [`evaluation`] module cross-validates any set of configurations
//! on a ratings file and reports ranking accuracy, error metrics,
//! fitted blend weights and significance tests; [`synth`] generates
//! reproducible datasets for experiments without real data.
//!
//! ```
//! use sensorec::compatibility::AversionCurve;
//!
//! // Noise bothers this user a lot: a quiet place scores high, a loud
//! // one collapses to the bottom of the scale.
//! let curve = AversionCurve::Increasing { a_max: 5.0 };
//! assert_eq!(curve.feature_compatibility(1.0), 5.0);
//! assert_eq!(curve.feature_compatibility(5.0), 1.0);
//! ```

pub mod aggregation;
pub mod compatibility;
pub mod conllu;
mod error;
pub mod evaluation;
pub mod extraction;
pub mod lexicon;
pub mod profiles;
pub mod recommender;
pub mod synth;
mod util;

pub use error::{Error, Result};

/// Lower bound of every rating, feature and compatibility scale.
pub const SCALE_MIN: f64 = 1.0;
/// Upper bound of every rating, feature and compatibility scale.
pub const SCALE_MAX: f64 = 5.0;

// The guide's code blocks double as tests so the book cannot drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/extraction.md")]
    mod extraction {}
    #[doc = include_str!("../../../book/src/compatibility.md")]
    mod compatibility {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/prediction.md")]
    mod prediction {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
}
