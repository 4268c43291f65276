use super::image::GrayImage;

pub const DEFAULT_VARIANCE_FACTOR: f64 = 0.1;

/// Block-wise foreground/background segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForegroundMask {
    pub block_size: usize,
    pub cols: usize,
    pub rows: usize,
    pub width: usize,
    pub height: usize,
    pub fg: Vec<bool>,
}

impl ForegroundMask {
    pub fn empty(width: usize, height: usize, block_size: usize) -> Self {
        let (cols, rows) = (width.div_ceil(block_size), height.div_ceil(block_size));
        Self { block_size, cols, rows, width, height, fg: vec![false; cols * rows] }
    }

    pub fn full(width: usize, height: usize, block_size: usize) -> Self {
        let mut m = Self::empty(width, height, block_size);
        m.fg.fill(true);
        m
    }

    #[inline]
    pub fn block(&self, bx: usize, by: usize) -> bool {
        self.fg[by * self.cols + bx]
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.fg[(y / self.block_size) * self.cols + x / self.block_size]
    }

    /// Number of image pixels covered by foreground blocks.
    pub fn pixel_count(&self) -> usize {
        let bs = self.block_size;
        let mut n = 0;
        for by in 0..self.rows {
            let h = (self.height - by * bs).min(bs);
            for bx in 0..self.cols {
                if self.block(bx, by) {
                    n += h * (self.width - bx * bs).min(bs);
                }
            }
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        !self.fg.iter().any(|&b| b)
    }

    /// Pixel raster of the mask, row-major.
    pub fn to_pixels(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(self.contains(x, y));
            }
        }
        out
    }

    /// Same mask at `factor` times the block size (and image size).
    pub fn upsampled(&self, factor: usize) -> Self {
        Self {
            block_size: self.block_size * factor,
            cols: self.cols,
            rows: self.rows,
            width: self.width * factor,
            height: self.height * factor,
            fg: self.fg.clone(),
        }
    }
}

fn morph(grid: &[bool], cols: usize, rows: usize, erode: bool) -> Vec<bool> {
    let mut out = vec![false; grid.len()];
    for by in 0..rows as isize {
        for bx in 0..cols as isize {
            let mut acc = erode;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (bx + dx, by + dy);
                    // outside the grid: neutral for erosion, empty for dilation
                    let v = if nx < 0 || ny < 0 || nx >= cols as isize || ny >= rows as isize {
                        erode
                    } else {
                        grid[ny as usize * cols + nx as usize]
                    };
                    if erode {
                        acc &= v;
                    } else {
                        acc |= v;
                    }
                }
            }
            out[by as usize * cols + bx as usize] = acc;
        }
    }
    out
}

fn largest_component(grid: &[bool], cols: usize, rows: usize) -> Vec<bool> {
    let mut label = vec![0usize; grid.len()];
    let mut best = (0usize, 0usize);
    let mut next = 1;
    let mut stack = Vec::new();
    for start in 0..grid.len() {
        if !grid[start] || label[start] != 0 {
            continue;
        }
        let mut size = 0;
        label[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % cols, i / cols);
            let mut visit = |j: usize| {
                if grid[j] && label[j] == 0 {
                    label[j] = next;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < cols {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - cols);
            }
            if y + 1 < rows {
                visit(i + cols);
            }
        }
        if size > best.1 {
            best = (next, size);
        }
        next += 1;
    }
    label.iter().map(|&l| best.0 != 0 && l == best.0).collect()
}

pub fn segment(img: &GrayImage, block_size: usize) -> ForegroundMask {
    segment_with_factor(img, block_size, DEFAULT_VARIANCE_FACTOR)
}

/// Variance segmentation: blocks whose intensity variance reaches
/// `factor * global variance` are foreground, followed by opening, closing
/// and retention of the largest 4-connected component.
pub fn segment_with_factor(img: &GrayImage, block_size: usize, factor: f64) -> ForegroundMask {
    let mut mask = ForegroundMask::empty(img.width, img.height, block_size);
    let (cols, rows) = (mask.cols, mask.rows);

    let n = img.pixels.len() as f64;
    let mean = img.pixels.iter().map(|&p| p as f64).sum::<f64>() / n;
    let global_var = img.pixels.iter().map(|&p| (p as f64 - mean).powi(2)).sum::<f64>() / n;
    let threshold = factor * global_var;

    let mut sum = vec![0.0; cols * rows];
    let mut sum2 = vec![0.0; cols * rows];
    let mut count = vec![0.0; cols * rows];
    for y in 0..img.height {
        for x in 0..img.width {
            let b = (y / block_size) * cols + x / block_size;
            let v = img.get(x, y) as f64;
            sum[b] += v;
            sum2[b] += v * v;
            count[b] += 1.0;
        }
    }
    let raw: Vec<bool> = (0..cols * rows)
        .map(|b| {
            let m = sum[b] / count[b];
            let var = (sum2[b] / count[b] - m * m).max(0.0);
            var > 0.0 && var >= threshold
        })
        .collect();

    let opened = morph(&morph(&raw, cols, rows, true), cols, rows, false);
    let closed = morph(&morph(&opened, cols, rows, false), cols, rows, true);
    mask.fg = largest_component(&closed, cols, rows);
    mask
}
