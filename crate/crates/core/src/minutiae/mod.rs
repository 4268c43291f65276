//! Crossing-number minutiae extraction and the `FPT1` template format.

mod extract;
mod template;

pub use extract::{crossing_number, extract, extract_with, filter_minutiae, scan_skeleton, ExtractConfig, MIN_EXTRACT_SIZE};
pub use template::{Minutia, MinutiaKind, MinutiaeCounts, MinutiaeTemplate, ReliabilityStats, MAX_MINUTIAE};
