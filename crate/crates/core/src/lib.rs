//! Capacity of single- and multi-antenna radio links.
//!
//! The closed-form models live in [`formulas`], receive combining in
//! [`combining`], and a seeded Rayleigh-fading Monte-Carlo referee in
//! [`fading`]. [`sweep`] turns these into capacity-vs-SNR datasets that
//! [`io`] writes as CSV, JSON or gnuplot scripts.
//!
//! ```
//! use mimo_capacity::{formulas, AntennaConfig, Bandwidth, Snr};
//!
//! let snr = Snr::from_db(10.0).unwrap();
//! let siso = formulas::siso_capacity(Bandwidth::UNIT, snr);
//! let mimo = formulas::product_gain_capacity(Bandwidth::UNIT, AntennaConfig::new(2, 2).unwrap(), snr);
//! assert!(mimo.bits_per_second > siso.bits_per_second);
//! ```

// `!(a < b)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combining;
pub mod error;
pub mod fading;
pub mod formulas;
pub mod gap;
pub mod io;
pub mod sweep;
pub mod types;

#[cfg(feature = "cli")]
pub mod cli;
#[cfg(feature = "cli")]
pub mod config;

pub use error::{Error, Result};
pub use types::{
    classify, db_to_linear, linear_to_db, AntennaConfig, Bandwidth, CapacityCurve, CapacityModel,
    CurvePoint, LinkKind, ModelTag, Snr,
};
