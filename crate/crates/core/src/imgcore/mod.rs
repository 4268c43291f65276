//! Image I/O and the ridge-image primitives: orientation, frequency,
//! segmentation, Gabor enhancement, binarization and thinning.

mod binary;
mod frequency;
mod gabor;
mod image;
mod orientation;
pub mod pattern;
mod segment;
mod thin;

pub use binary::{binarize, BinaryImage, Skeleton};
pub use frequency::{estimate_frequency, mean_peak_spacing, ridge_signature, FrequencyMap, FALLBACK_FREQ, MAX_PERIOD, MIN_PERIOD};
pub use gabor::{gabor_enhance, GaborKernel, ENHANCE_KERNEL_SIZE, ENHANCE_SIGMA};
pub(crate) use gabor::convolve_space_variant;
pub use image::{load_image, save_image, GrayImage, DEFAULT_DPI};
pub use orientation::{estimate_orientation, undirected_diff, wrap_pi, OrientationField};
pub use segment::{segment, segment_with_factor, ForegroundMask, DEFAULT_VARIANCE_FACTOR};
pub use thin::{is_one_pixel_wide, neighbour_components, ring, thin, transitions, RING};

/// Default block size for orientation, frequency and segmentation.
pub const DEFAULT_BLOCK_SIZE: usize = 16;
