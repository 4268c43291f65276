//! Seeded master-fingerprint generator and plain-impression renderer.
//!
//! A master is grown from an outline, a singular-point layout, an orientation
//! field and a ridge-frequency map. Impressions of a master add placement,
//! pressure, creases, sensor noise and a faded border.

mod field;
mod grow;
mod layout;
mod render;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use field::{build_orientation, jittered_frequency, orientation_at};
pub use grow::{grow_ridges, GrowConfig, GROW_KERNEL_SIZE};
pub use layout::{sample_layout, FingerClass, Silhouette, SingularityLayout, MAX_LAYOUT_TRIES, SINGULARITY_MARGIN};
pub use render::{render_impression, Crease, ImpressionParams, RenderStreams, Rendered, DEFAULT_NOISE_SIGMA, FADE_WIDTH};

use crate::error::{Error, Result};
use crate::imgcore::{FrequencyMap, GrayImage, OrientationField, DEFAULT_DPI, MAX_PERIOD, MIN_PERIOD};

/// Block size of the synthesis fields; finer than the analysis grid so the
/// field bends smoothly around singular points.
pub const SYNTH_BLOCK_SIZE: usize = 8;
pub const MAX_CREASES_DRAWN: usize = 4;
/// Bounds of the rigid placement applied to mates.
pub const MATE_MAX_ROTATION_DEG: f64 = 15.0;
pub const MATE_MAX_SHIFT: f64 = 20.0;
/// Half-width of the fresh pressure drawn for each mate.
pub const MATE_PRESSURE_SPREAD: f64 = 0.2;

// stream ids of the per-seed generator
const S_LAYOUT: u64 = 0;
const S_FREQ: u64 = 1;
const S_GROW: u64 = 2;
const S_IMPRESSION: u64 = 3;
const S_CREASES: u64 = 4;
const S_NOISE: u64 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    /// `None` draws the class uniformly.
    pub class: Option<FingerClass>,
    pub width: usize,
    pub height: usize,
    pub dpi: u32,
    pub ridge_period_range: (f64, f64),
    /// `None` draws 0 to 4 creases.
    pub crease_count: Option<usize>,
    pub pressure: f64,
    pub noise_sigma: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 0,
            class: None,
            width: 512,
            height: 512,
            dpi: DEFAULT_DPI,
            ridge_period_range: (6.0, 12.0),
            crease_count: None,
            pressure: 1.0,
            noise_sigma: DEFAULT_NOISE_SIGMA,
        }
    }
}

impl SynthParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.width < 128 || self.height < 128 {
            return bad(format!("image {}x{} is below 128x128", self.width, self.height));
        }
        let (lo, hi) = self.ridge_period_range;
        if !(lo.is_finite() && hi.is_finite() && MIN_PERIOD <= lo && lo <= hi && hi <= MAX_PERIOD) {
            return bad(format!("ridge period range {lo}..{hi} outside {MIN_PERIOD}..{MAX_PERIOD}"));
        }
        if !(0.5..=1.5).contains(&self.pressure) {
            return bad(format!("pressure {} outside [0.5, 1.5]", self.pressure));
        }
        if !(self.noise_sigma.is_finite() && (0.0..=0.5).contains(&self.noise_sigma)) {
            return bad(format!("noise sigma {} outside [0, 0.5]", self.noise_sigma));
        }
        if self.dpi == 0 {
            return bad("dpi must be positive".into());
        }
        Ok(())
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

fn render_streams(seed: u64) -> RenderStreams<ChaCha8Rng> {
    RenderStreams { creases: stream(seed, S_CREASES), noise: stream(seed, S_NOISE) }
}

/// Seed of impression `index` of the master with `seed` (splitmix64 mix).
pub fn impression_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything a master carries besides its pixels.
#[derive(Debug, Clone)]
pub struct Master {
    pub image: GrayImage,
    pub layout: SingularityLayout,
    pub orientation: OrientationField,
    pub frequency: FrequencyMap,
}

pub fn generate_master(params: &SynthParams) -> Result<Master> {
    params.validate()?;
    let mut rng = stream(params.seed, S_LAYOUT);
    let class = match params.class {
        Some(c) => c,
        None => FingerClass::ALL[rng.random_range(0..FingerClass::ALL.len())],
    };
    let layout = sample_layout(class, params.width, params.height, &mut rng)?;
    let orientation = build_orientation(&layout, params.width, params.height, SYNTH_BLOCK_SIZE);
    let frequency = jittered_frequency(
        orientation.cols,
        orientation.rows,
        SYNTH_BLOCK_SIZE,
        params.ridge_period_range,
        &mut stream(params.seed, S_FREQ),
    );
    let inside = layout.silhouette.pixel_mask(params.width, params.height);
    let mut image = grow::grow_in(
        &orientation,
        &frequency,
        params.width,
        params.height,
        &inside,
        &GrowConfig::default(),
        &mut stream(params.seed, S_GROW),
    );
    image.dpi = params.dpi;
    Ok(Master { image, layout, orientation, frequency })
}

/// Rendering settings of the baseline impression produced by [`generate`].
pub fn baseline_impression(params: &SynthParams) -> ImpressionParams {
    let crease_count = params
        .crease_count
        .unwrap_or_else(|| stream(params.seed, S_IMPRESSION).random_range(0..=MAX_CREASES_DRAWN));
    ImpressionParams { pressure: params.pressure, crease_count, noise_sigma: params.noise_sigma, ..Default::default() }
}

/// Fresh placement, pressure and crease count for a mate.
pub fn mate_impression(params: &SynthParams, impression_seed: u64) -> ImpressionParams {
    let mut rng = stream(impression_seed, S_IMPRESSION);
    let rotation_deg = rng.random_range(-MATE_MAX_ROTATION_DEG..=MATE_MAX_ROTATION_DEG);
    let translation =
        (rng.random_range(-MATE_MAX_SHIFT..=MATE_MAX_SHIFT), rng.random_range(-MATE_MAX_SHIFT..=MATE_MAX_SHIFT));
    let pressure = (params.pressure + rng.random_range(-MATE_PRESSURE_SPREAD..=MATE_PRESSURE_SPREAD)).clamp(0.5, 1.5);
    let crease_count = rng.random_range(0..=MAX_CREASES_DRAWN);
    ImpressionParams { pressure, crease_count, noise_sigma: params.noise_sigma, rotation_deg, translation }
}

/// Renders `master` with the given settings; `render_seed` drives crease
/// placement and sensor noise.
pub fn render_with(master: &Master, imp: &ImpressionParams, render_seed: u64) -> Rendered {
    render_impression(&master.image, &master.layout.silhouette, imp, &mut render_streams(render_seed))
}

pub fn render_baseline(master: &Master, params: &SynthParams) -> Rendered {
    render_with(master, &baseline_impression(params), params.seed)
}

pub fn render_mate(master: &Master, params: &SynthParams, impression_seed: u64) -> Rendered {
    render_with(master, &mate_impression(params, impression_seed), impression_seed)
}

/// Master plus baseline impression, all drawn from `params.seed`.
pub fn generate(params: &SynthParams) -> Result<GrayImage> {
    let master = generate_master(params)?;
    Ok(render_baseline(&master, params).image)
}

/// Another impression of the master of `params.seed`, placed and rendered
/// from `impression_seed`.
pub fn generate_mate(params: &SynthParams, impression_seed: u64) -> Result<GrayImage> {
    let master = generate_master(params)?;
    Ok(render_mate(&master, params, impression_seed).image)
}
