use super::image::GrayImage;
use super::segment::ForegroundMask;
use crate::error::{Error, Result};

/// Boolean raster, `true` = ridge pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-range coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// One-pixel-wide ridge skeleton produced by [`super::thin`].
pub type Skeleton = BinaryImage;

/// Ridge/valley split with one threshold per mask block (the block mean).
pub fn binarize(img: &GrayImage, mask: &ForegroundMask) -> Result<BinaryImage> {
    if img.width != mask.width || img.height != mask.height {
        return Err(Error::InvalidParameter("mask does not match image size".into()));
    }
    let bs = mask.block_size;
    let mut out = BinaryImage::new(img.width, img.height);
    for by in 0..mask.rows {
        for bx in 0..mask.cols {
            if !mask.block(bx, by) {
                continue;
            }
            let (x0, y0) = (bx * bs, by * bs);
            let (x1, y1) = ((x0 + bs).min(img.width), (y0 + bs).min(img.height));
            let mut sum = 0u64;
            for y in y0..y1 {
                for x in x0..x1 {
                    sum += img.get(x, y) as u64;
                }
            }
            let n = ((x1 - x0) * (y1 - y0)) as f64;
            let mean = sum as f64 / n;
            for y in y0..y1 {
                for x in x0..x1 {
                    out.set(x, y, (img.get(x, y) as f64) < mean);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::pattern::horizontal_bands;

    #[test]
    fn bands_follow_dark_rows() {
        let img = horizontal_bands(64, 64, 3, 5);
        let bin = binarize(&img, &ForegroundMask::full(64, 64, 16)).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(bin.get(x, y), y % 8 < 3);
            }
        }
    }

    #[test]
    fn uniform_is_all_false() {
        let bin = binarize(&GrayImage::new(32, 32, 90), &ForegroundMask::full(32, 32, 16)).unwrap();
        assert_eq!(bin.count(), 0);
    }

    #[test]
    fn inverted_image_gives_complement() {
        let img = horizontal_bands(48, 48, 4, 4);
        let inv = GrayImage::from_fn(48, 48, |x, y| 255 - img.get(x, y));
        let mask = ForegroundMask::full(48, 48, 16);
        let a = binarize(&img, &mask).unwrap();
        let b = binarize(&inv, &mask).unwrap();
        assert!(a.bits.iter().zip(&b.bits).all(|(p, q)| p != q));
    }

    #[test]
    fn background_blocks_false() {
        let img = horizontal_bands(32, 32, 2, 2);
        let mut mask = ForegroundMask::full(32, 32, 16);
        mask.fg[0] = false;
        let bin = binarize(&img, &mask).unwrap();
        assert!((0..16).all(|y| (0..16).all(|x| !bin.get(x, y))));
    }
}
