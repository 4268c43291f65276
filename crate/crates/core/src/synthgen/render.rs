use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::layout::Silhouette;
use crate::imgcore::GrayImage;

pub const FADE_WIDTH: f64 = 12.0;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.05;

/// Per-impression rendering settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpressionParams {
    /// Finger pressure in `[0.5, 1.5]`; above 1 thickens ridges.
    pub pressure: f64,
    pub crease_count: usize,
    /// Standard deviation of the per-pixel multiplicative gain.
    pub noise_sigma: f64,
    /// Rigid placement: rotation about the image centre (degrees), then shift.
    pub rotation_deg: f64,
    pub translation: (f64, f64),
}

impl Default for ImpressionParams {
    fn default() -> Self {
        Self { pressure: 1.0, crease_count: 0, noise_sigma: DEFAULT_NOISE_SIGMA, rotation_deg: 0.0, translation: (0.0, 0.0) }
    }
}

/// A white crease: the chord between `from` and `to` drawn `width` px wide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crease {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub width: f64,
}

impl Crease {
    fn distance(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (self.to.0 - self.from.0, self.to.1 - self.from.1);
        let len2 = dx * dx + dy * dy;
        let t = (((x - self.from.0) * dx + (y - self.from.1) * dy) / len2).clamp(0.0, 1.0);
        (x - self.from.0 - t * dx).hypot(y - self.from.1 - t * dy)
    }

    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.distance(x as f64 + 0.5, y as f64 + 0.5) <= self.width / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub image: GrayImage,
    /// Foreground pixels of the placed impression.
    pub inside: Vec<bool>,
    pub creases: Vec<Crease>,
}

/// Separate random streams for each rendering stage, so changing one
/// setting (say, the crease count) leaves the other stages untouched.
pub struct RenderStreams<R> {
    pub creases: R,
    pub noise: R,
}

fn place(master: &GrayImage, sil: &Silhouette, p: &ImpressionParams) -> (GrayImage, Vec<bool>) {
    let (w, h) = (master.width, master.height);
    if p.rotation_deg == 0.0 && p.translation == (0.0, 0.0) {
        return (master.clone(), sil.pixel_mask(w, h));
    }
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let (s, c) = p.rotation_deg.to_radians().sin_cos();
    let mut img = GrayImage::new(w, h, 255);
    img.dpi = master.dpi;
    let mut inside = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            // inverse map of the output pixel centre into master coordinates
            let (ox, oy) = (x as f64 + 0.5 - p.translation.0 - cx, y as f64 + 0.5 - p.translation.1 - cy);
            let (mx, my) = (c * ox + s * oy + cx, -s * ox + c * oy + cy);
            let i = y * w + x;
            if mx >= 0.0 && my >= 0.0 && mx < w as f64 && my < h as f64 && sil.contains_point(mx, my) {
                inside[i] = true;
                img.pixels[i] = master.sample(mx, my).round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    (img, inside)
}

/// Gray-level min (thicker ridges) or max (thinner ridges) over a disc.
fn apply_pressure(img: &GrayImage, inside: &[bool], pressure: f64) -> GrayImage {
    let r = ((pressure - 1.0).abs() * 4.0).round() as isize;
    if r == 0 {
        return img.clone();
    }
    let thicken = pressure > 1.0;
    let offsets: Vec<(isize, isize)> =
        (-r..=r).flat_map(|dy| (-r..=r).map(move |dx| (dx, dy))).filter(|(dx, dy)| dx * dx + dy * dy <= r * r).collect();
    let (w, h) = (img.width as isize, img.height as isize);
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if !inside[i] {
                continue;
            }
            let mut v = img.pixels[i];
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h || !inside[(ny * w + nx) as usize] {
                    continue;
                }
                let q = img.pixels[(ny * w + nx) as usize];
                v = if thicken { v.min(q) } else { v.max(q) };
            }
            out.pixels[i] = v;
        }
    }
    out
}

fn draw_creases<R: Rng>(img: &mut GrayImage, inside: &[bool], count: usize, rng: &mut R) -> Vec<Crease> {
    let fg: Vec<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
    if fg.is_empty() || count == 0 {
        return vec![];
    }
    let (w, h) = (img.width, img.height);
    let reach = (w + h) as f64;
    let mut creases = Vec::with_capacity(count);
    for _ in 0..count {
        let p = fg[rng.random_range(0..fg.len())];
        let (px, py) = ((p % w) as f64 + 0.5, (p / w) as f64 + 0.5);
        // flexion creases run roughly across the finger
        let a = rng.random_range(-0.6f64..=0.6);
        let width = rng.random_range(2.0..=4.0);
        let (dx, dy) = (a.cos() * reach, a.sin() * reach);
        let crease = Crease { from: (px - dx, py - dy), to: (px + dx, py + dy), width };
        for y in 0..h {
            for x in 0..w {
                if inside[y * w + x] && crease.covers(x, y) {
                    img.pixels[y * w + x] = 255;
                }
            }
        }
        creases.push(crease);
    }
    creases
}

/// Chamfer (3-4) distance in pixels from each pixel to the nearest pixel
/// outside the foreground; the image frame counts as outside.
fn distance_to_outside(inside: &[bool], w: usize, h: usize) -> Vec<f64> {
    const BIG: u32 = u32::MAX / 4;
    let mut d: Vec<u32> = inside.iter().map(|&v| if v { BIG } else { 0 }).collect();
    let get = |d: &Vec<u32>, x: isize, y: isize| -> u32 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0
        } else {
            d[y as usize * w + x as usize]
        }
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let m = (get(&d, x - 1, y) + 3)
                .min(get(&d, x, y - 1) + 3)
                .min(get(&d, x - 1, y - 1) + 4)
                .min(get(&d, x + 1, y - 1) + 4);
            d[i] = d[i].min(m);
        }
    }
    for y in (0..h as isize).rev() {
        for x in (0..w as isize).rev() {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let m = (get(&d, x + 1, y) + 3)
                .min(get(&d, x, y + 1) + 3)
                .min(get(&d, x + 1, y + 1) + 4)
                .min(get(&d, x - 1, y + 1) + 4);
            d[i] = d[i].min(m);
        }
    }
    d.iter().map(|&v| v as f64 / 3.0).collect()
}

/// Renders one impression of a master: placement, pressure, creases,
/// multiplicative sensor noise and a fade of the outline to white.
pub fn render_impression<R: Rng>(
    master: &GrayImage,
    silhouette: &Silhouette,
    p: &ImpressionParams,
    streams: &mut RenderStreams<R>,
) -> Rendered {
    let (w, h) = (master.width, master.height);
    let (placed, inside) = place(master, silhouette, p);
    let mut img = apply_pressure(&placed, &inside, p.pressure);
    let creases = draw_creases(&mut img, &inside, p.crease_count, &mut streams.creases);
    if p.noise_sigma > 0.0 {
        let gain = Normal::new(1.0, p.noise_sigma).expect("finite sigma");
        for v in img.pixels.iter_mut() {
            let g: f64 = gain.sample(&mut streams.noise);
            *v = (*v as f64 * g).round().clamp(0.0, 255.0) as u8;
        }
    }
    let dist = distance_to_outside(&inside, w, h);
    for (i, v) in img.pixels.iter_mut().enumerate() {
        if !inside[i] {
            *v = 255;
            continue;
        }
        let t = (dist[i] / FADE_WIDTH).min(1.0);
        if t < 1.0 {
            *v = (*v as f64 + (255.0 - *v as f64) * (1.0 - t)).round().clamp(0.0, 255.0) as u8;
        }
    }
    Rendered { image: img, inside, creases }
}
