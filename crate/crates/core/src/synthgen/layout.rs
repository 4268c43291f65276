use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};

pub const SINGULARITY_MARGIN: f64 = 40.0;
pub const MAX_LAYOUT_TRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FingerClass {
    Arch,
    LeftLoop,
    RightLoop,
    Whorl,
}

impl FingerClass {
    pub const ALL: [FingerClass; 4] = [FingerClass::Arch, FingerClass::LeftLoop, FingerClass::RightLoop, FingerClass::Whorl];

    pub fn name(self) -> &'static str {
        match self {
            FingerClass::Arch => "arch",
            FingerClass::LeftLoop => "leftLoop",
            FingerClass::RightLoop => "rightLoop",
            FingerClass::Whorl => "whorl",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// (cores, deltas)
    pub fn singularity_counts(self) -> (usize, usize) {
        match self {
            FingerClass::Arch => (0, 0),
            FingerClass::LeftLoop | FingerClass::RightLoop => (1, 1),
            FingerClass::Whorl => (2, 2),
        }
    }
}

/// Fingertip outline: a rectangle of half-height `c` whose top and bottom
/// edges are capped by quarter ellipses with horizontal semi-axes
/// `a_left`/`a_right` and vertical semi-axes `b_top`/`b_bottom`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Silhouette {
    pub cx: f64,
    pub cy: f64,
    pub a_left: f64,
    pub a_right: f64,
    pub b_top: f64,
    pub b_bottom: f64,
    pub c: f64,
}

impl Silhouette {
    /// Membership of a continuous point.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let dx = x - self.cx;
        let a = if dx < 0.0 { self.a_left } else { self.a_right };
        if dx.abs() > a {
            return false;
        }
        let dy = y - self.cy;
        let over = if dy < -self.c {
            (dy + self.c) / self.b_top
        } else if dy > self.c {
            (dy - self.c) / self.b_bottom
        } else {
            0.0
        };
        (dx / a).powi(2) + over * over <= 1.0
    }

    /// Membership of pixel `(x, y)` by its centre.
    pub fn contains_pixel(&self, x: usize, y: usize) -> bool {
        self.contains_point(x as f64 + 0.5, y as f64 + 0.5)
    }

    pub fn pixel_mask(&self, width: usize, height: usize) -> Vec<bool> {
        let mut m = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                m.push(self.contains_pixel(x, y));
            }
        }
        m
    }

    /// True when a disc of radius `r` around `(x, y)` lies inside. The shape
    /// is convex, so testing the rim suffices.
    pub fn contains_disc(&self, x: f64, y: f64, r: f64) -> bool {
        self.contains_point(x, y)
            && (0..64).all(|k| {
                let a = TAU * k as f64 / 64.0;
                self.contains_point(x + r * a.cos(), y + r * a.sin())
            })
    }

    pub fn area(&self) -> f64 {
        let w = self.a_left + self.a_right;
        2.0 * self.c * w + PI / 4.0 * w * (self.b_top + self.b_bottom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityLayout {
    pub class: FingerClass,
    /// Global orientation offset of the zero-pole field, radians.
    pub theta0: f64,
    pub cores: Vec<(f64, f64)>,
    pub deltas: Vec<(f64, f64)>,
    pub silhouette: Silhouette,
}

fn sample_silhouette<R: Rng>(width: usize, height: usize, rng: &mut R) -> Silhouette {
    let s = width.min(height) as f64 / 512.0;
    Silhouette {
        cx: width as f64 / 2.0 + rng.random_range(-10.0..=10.0) * s,
        cy: height as f64 / 2.0 + rng.random_range(-10.0..=10.0) * s,
        a_left: rng.random_range(110.0..=150.0) * s,
        a_right: rng.random_range(110.0..=150.0) * s,
        b_top: rng.random_range(110.0..=150.0) * s,
        b_bottom: rng.random_range(100.0..=140.0) * s,
        c: rng.random_range(30.0..=70.0) * s,
    }
}

fn around<R: Rng>(rng: &mut R, v: f64, lo: f64, hi: f64, s: f64) -> f64 {
    // whole-pixel coordinates keep singularities off every pixel centre
    (v + rng.random_range(lo..=hi) * s).round()
}

fn propose<R: Rng>(class: FingerClass, sil: &Silhouette, s: f64, rng: &mut R) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let (cx, cy) = (sil.cx, sil.cy);
    match class {
        FingerClass::Arch => (vec![], vec![]),
        FingerClass::LeftLoop | FingerClass::RightLoop => {
            let core = (around(rng, cx, -20.0, 20.0, s), around(rng, cy, -50.0, 10.0, s));
            let side = if class == FingerClass::LeftLoop { 1.0 } else { -1.0 };
            let delta = (
                (core.0 + side * rng.random_range(50.0..=100.0) * s).round(),
                around(rng, core.1, 60.0, 120.0, s),
            );
            (vec![core], vec![delta])
        }
        FingerClass::Whorl => {
            let c1 = (around(rng, cx, -15.0, 15.0, s), around(rng, cy, -60.0, -10.0, s));
            let c2 = (around(rng, c1.0, -15.0, 15.0, s), around(rng, c1.1, 30.0, 80.0, s));
            let d1 = (around(rng, cx, -100.0, -60.0, s), around(rng, c2.1, 50.0, 100.0, s));
            let d2 = (around(rng, cx, 60.0, 100.0, s), around(rng, c2.1, 50.0, 100.0, s));
            (vec![c1, c2], vec![d1, d2])
        }
    }
}

/// Draws an outline and singular points for `class`, rejecting layouts whose
/// singularities come closer than the margin to the outline.
pub fn sample_layout<R: Rng>(class: FingerClass, width: usize, height: usize, rng: &mut R) -> Result<SingularityLayout> {
    let s = width.min(height) as f64 / 512.0;
    let margin = SINGULARITY_MARGIN * s;
    for _ in 0..MAX_LAYOUT_TRIES {
        let silhouette = sample_silhouette(width, height, rng);
        let theta0 = rng.random_range(-0.1..=0.1);
        let (cores, deltas) = propose(class, &silhouette, s, rng);
        if cores.iter().chain(&deltas).all(|&(x, y)| silhouette.contains_disc(x, y, margin)) {
            return Ok(SingularityLayout { class, theta0, cores, deltas, silhouette });
        }
    }
    Err(Error::LayoutInfeasible(MAX_LAYOUT_TRIES))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn class_contracts() {
        for class in FingerClass::ALL {
            for seed in 0..20 {
                let l = sample_layout(class, 512, 512, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                assert_eq!((l.cores.len(), l.deltas.len()), class.singularity_counts());
                for &(x, y) in l.cores.iter().chain(&l.deltas) {
                    assert!(l.silhouette.contains_disc(x, y, SINGULARITY_MARGIN));
                }
                if class == FingerClass::Whorl {
                    let dy = (l.cores[1].1 - l.cores[0].1).abs();
                    assert!((30.0..=80.0).contains(&dy), "{dy}");
                }
            }
        }
    }

    #[test]
    fn same_seed_same_layout() {
        let a = sample_layout(FingerClass::Whorl, 512, 512, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = sample_layout(FingerClass::Whorl, 512, 512, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn silhouette_shape() {
        let s = Silhouette { cx: 256.0, cy: 256.0, a_left: 120.0, a_right: 140.0, b_top: 130.0, b_bottom: 110.0, c: 50.0 };
        assert!(s.contains_point(256.0, 256.0));
        assert!(s.contains_point(256.0 - 119.0, 256.0 + 49.0));
        assert!(!s.contains_point(256.0 - 121.0, 256.0));
        assert!(s.contains_point(256.0, 256.0 - 50.0 - 129.0));
        assert!(!s.contains_point(256.0, 256.0 - 50.0 - 131.0));
        // quarter-ellipse corner cut off
        assert!(!s.contains_point(256.0 + 130.0, 256.0 + 50.0 + 100.0));
        let counted = s.pixel_mask(512, 512).iter().filter(|&&v| v).count() as f64;
        assert!((counted - s.area()).abs() / s.area() < 0.01);
    }

    #[test]
    fn class_names_round_trip() {
        for c in FingerClass::ALL {
            assert_eq!(FingerClass::parse(c.name()), Some(c));
        }
        assert_eq!(FingerClass::parse("tented"), None);
    }
}
