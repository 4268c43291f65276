//! Dataset pipelines behind the `fpsynth` command: synthesis, ingestion,
//! extraction, batch matching, uniqueness evaluation, print metrics and FID.

pub mod config;
pub mod manifest;
pub mod commands;

use thiserror::Error;

/// Bad user input: arguments, configuration or manifests. Maps to exit code 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct Invalid(pub String);

/// Exit code for a failed command: 2 for validation errors, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<Invalid>() {
            return 2;
        }
        if let Some(
            fpsynth::Error::InvalidParameter(_) | fpsynth::Error::Nfiq2OutOfRange(_) | fpsynth::Error::DimensionMismatch(_),
        ) = cause.downcast_ref()
        {
            return 2;
        }
    }
    1
}

pub use config::RunConfig;
pub use manifest::{Manifest, ManifestEntry};
