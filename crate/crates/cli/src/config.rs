//! Flat `key = value` run configuration with module-namespaced keys.

use std::path::Path;

use anyhow::{Context, Result};
use fpsynth::fpmetrics::MetricsConfig;
use fpsynth::matcher::MatcherConfig;
use fpsynth::minutiae::ExtractConfig;
use fpsynth::synthgen::SynthParams;

use crate::Invalid;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Non-mated partners drawn per print for the imposter distributions.
    pub per_print: usize,
    pub target_far: f64,
    /// Cap on synthetic-vs-bonafide comparisons; ignored when `cross_full`.
    pub cross_cap: usize,
    pub cross_full: bool,
    pub hist_bin_width: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { per_print: 1000, target_far: 1e-4, cross_cap: 1_000_000, cross_full: false, hist_bin_width: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub seed: u64,
    /// Template for generated prints; its seed is replaced per master.
    pub synth: SynthParams,
    pub extract: ExtractConfig,
    pub matcher: MatcherConfig,
    pub eval: EvalConfig,
    pub metrics: MetricsConfig,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Invalid> {
    v.parse().map_err(|_| Invalid(format!("{key}: cannot parse {v:?}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(Self::parse(&text)?)
    }

    pub fn parse(text: &str) -> Result<Self, Invalid> {
        let mut c = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Invalid(format!("config line {}: expected `key = value`", n + 1)))?;
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), Invalid> {
        match key {
            "seed" => self.seed = parse(key, v)?,
            "synth.width" => self.synth.width = parse(key, v)?,
            "synth.height" => self.synth.height = parse(key, v)?,
            "synth.dpi" => self.synth.dpi = parse(key, v)?,
            "synth.period_min_px" => self.synth.ridge_period_range.0 = parse(key, v)?,
            "synth.period_max_px" => self.synth.ridge_period_range.1 = parse(key, v)?,
            "synth.pressure" => self.synth.pressure = parse(key, v)?,
            "synth.noise_sigma" => self.synth.noise_sigma = parse(key, v)?,
            "synth.crease_count" => self.synth.crease_count = Some(parse(key, v)?),
            "extract.block_size" => self.extract.block_size = parse(key, v)?,
            "extract.border_margin_px" => self.extract.border_margin = parse(key, v)?,
            "extract.spur_length_px" => self.extract.spur_length = parse(key, v)?,
            "extract.facing_distance_px" => self.extract.facing_distance = parse(key, v)?,
            "extract.min_separation_px" => self.extract.min_separation = parse(key, v)?,
            "matcher.td_px" => self.matcher.td = parse(key, v)?,
            "matcher.t_theta_deg" => self.matcher.t_theta = parse(key, v)?,
            "matcher.t_rot_deg" => self.matcher.t_rot = parse(key, v)?,
            "matcher.d_max_px" => self.matcher.d_max = parse(key, v)?,
            "eval.per_print" => self.eval.per_print = parse(key, v)?,
            "eval.target_far" => self.eval.target_far = parse(key, v)?,
            "eval.cross_cap" => self.eval.cross_cap = parse(key, v)?,
            "eval.cross_full" => self.eval.cross_full = parse(key, v)?,
            "eval.hist_bin_width" => self.eval.hist_bin_width = parse(key, v)?,
            "metrics.patch_count" => self.metrics.patch_count = parse(key, v)?,
            "metrics.block_size" => self.metrics.block_size = parse(key, v)?,
            _ => return Err(Invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Invalid> {
        self.synth.validate().map_err(|e| Invalid(e.to_string()))?;
        self.matcher.validate().map_err(|e| Invalid(e.to_string()))?;
        for (name, bs) in [("extract.block_size", self.extract.block_size), ("metrics.block_size", self.metrics.block_size)] {
            if !(8..=32).contains(&bs) {
                return Err(Invalid(format!("{name} = {bs} outside [8, 32]")));
            }
        }
        let e = &self.extract;
        if ![e.border_margin, e.facing_distance, e.min_separation].iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Invalid("extract distances must be finite and non-negative".into()));
        }
        if self.eval.per_print == 0 || self.eval.cross_cap == 0 || self.eval.hist_bin_width == 0 {
            return Err(Invalid("eval.per_print, eval.cross_cap and eval.hist_bin_width must be positive".into()));
        }
        if !(self.eval.target_far > 0.0 && self.eval.target_far <= 1.0) {
            return Err(Invalid(format!("eval.target_far = {} outside (0, 1]", self.eval.target_far)));
        }
        if self.metrics.patch_count == 0 {
            return Err(Invalid("metrics.patch_count must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn namespaced_keys_and_comments() {
        let c = RunConfig::parse("# run\nmatcher.t_theta_deg = 10.5\neval.per_print=50 # fewer\n\nseed = 9").unwrap();
        assert_eq!(c.matcher.t_theta, 10.5);
        assert_eq!(c.eval.per_print, 50);
        assert_eq!(c.seed, 9);
        assert_eq!(c.matcher.td, 10.0);
    }

    #[test]
    fn bad_input_is_invalid() {
        assert!(RunConfig::parse("matcher.nope = 1").is_err());
        assert!(RunConfig::parse("matcher.td_px = ten").is_err());
        assert!(RunConfig::parse("matcher.td_px").is_err());
        assert!(RunConfig::parse("eval.target_far = 0").is_err());
        assert!(RunConfig::parse("synth.pressure = 3").is_err());
        assert!(RunConfig::parse("metrics.block_size = 64").is_err());
    }
}
