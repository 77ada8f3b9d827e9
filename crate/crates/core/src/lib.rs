//! Medium-term daily peak-load forecasting core.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every numerical piece of the
//! forecaster:
//!
//! - [`optim`]: Symbiotic Organism Search with a particle-swarm baseline behind the same
//!   interface, plus benchmark objectives.
//! - [`svr`]: epsilon-insensitive support vector regression with an RBF kernel, trained by
//!   an SMO-style dual solver, and KKT/duality-gap verification.
//! - [`mrmr`]: minimum-redundancy maximum-relevance selection over binned mutual
//!   information.
//! - [`data`]: daily series, calendar encoding, lag matrices, train/test split and min-max
//!   scaling.
//! - [`forecast`]: hyperparameter fitness, tuning, recursive month-ahead forecasting and
//!   the end-to-end pipeline.
//!
//! File formats, CSV ingestion and the command-line front end live in the `mtlf` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod data;
pub mod forecast;
pub mod mrmr;
pub mod optim;
pub mod svr;
pub mod synthetic;

pub use chrono::{Datelike, NaiveDate, Weekday};
