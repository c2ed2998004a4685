//! Exact-arithmetic workbench for finitely additive measures on the Cantor
//! algebra: clopen-set algebra, weight-function codings and their
//! equivalence relations, Jordan-extension machinery over spine measures,
//! and Kelley intersection numbers. Every result is an exact rational or a
//! certified rational interval; no floating point anywhere.

pub mod clopen;
pub mod error;
pub mod interval;
pub mod jordan;
pub mod kelley;
pub mod measure;
pub mod path;
pub mod ranges;
pub mod rat;
pub mod simplex;
pub mod spine;
pub mod testutil;
pub mod treecode;
pub mod weights;

pub use clopen::{clopen_ops, Clopen, ClopenOp};
pub use error::{Error, Result};
pub use interval::RatInterval;
pub use measure::{density_defects, iso_from_isometry, metric_iso_finite, FiniteMeasure};
pub use path::{BitPath, DEFAULT_MAX_DEPTH};
pub use rat::{fmt_rat, parse_rat, Rat};
