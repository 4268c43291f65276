//! Synthetic fingerprint generation and evaluation.
//!
//! - [`imgcore`]: image I/O and ridge-image processing primitives
//! - [`synthgen`]: seeded master-fingerprint generator and impression renderer
//! - [`minutiae`]: crossing-number minutiae extraction and template format
//! - [`matcher`]: pair-table minutiae matcher and deterministic batch engine
//! - [`biostats`]: score distributions, thresholds, KS test, moments, Fréchet distance
//! - [`fpmetrics`]: ridge-valley signature metrics and per-print quality rows

pub mod biostats;
pub mod error;
pub mod fpmetrics;
pub mod imgcore;
pub mod matcher;
pub mod minutiae;
pub mod synthgen;

pub use error::{Error, Result};
