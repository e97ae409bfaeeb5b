//! Exact Hölder functions on `[0, 1]` and certified slope bounds.
//!
//! Functions are stored as sorted segments, each an affine part plus a few
//! `c·|x − z|^α` arc terms whose anchor `z` never lies inside the segment.
//! That family is closed under the constructions in [`approx`], [`almond`]
//! and [`spike`], so every value below is computed from an exact
//! representation rather than from samples of a black-box callable.
//!
//! The main entry points:
//!
//! * [`PiecewiseFn`] / [`Polygon`]: representation, evaluation, algebra.
//! * [`certify`]: branch-and-bound enclosures of the Hölder seminorm, band
//!   suprema and the sup norm.
//! * [`approx`]: inserted constants, Krein–Petunin interpolation, polygonal
//!   densification, the slope-adaptation check, 3-ball witnesses and the M-summand
//!   violation certificate.
//! * [`ciesielski`]: the normalized triangle system and its coefficient
//!   functional.
//! * [`almond`]: the recursive almond construction and its slope diagnostics.
//! * [`spike`]: a pointwise-lip function with unbounded Hölder slopes.

pub mod almond;
pub mod alpha;
pub mod approx;
pub mod certify;
pub mod ciesielski;
pub mod critical;
mod error;
pub mod func;
mod index;
pub mod report;
pub mod root;
pub mod spike;
pub mod text;

pub use alpha::Alpha;
pub use certify::{band_slope, holder_seminorm, sup_norm, CertifiedBound, SearchOptions};
pub use critical::{critical_points, critical_set, PointClass};
pub use error::{Error, Result};
pub use func::{Arc, PiecewiseFn, Polygon, Segment};
pub use report::{CertificateReport, ResultEntry};
