use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_DPI: u32 = 500;
const METERS_PER_INCH: f64 = 0.0254;

/// 8-bit grayscale raster, row-major, 0 = ridge (dark), 255 = valley (light).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub dpi: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self { width, height, dpi: DEFAULT_DPI, pixels: vec![fill; width * height] }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer of {} bytes for {}x{} image",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, dpi: DEFAULT_DPI, pixels })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, dpi: DEFAULT_DPI, pixels }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Bilinear sample at continuous coordinates where pixel `(i, j)` covers
    /// `[i, i+1) x [j, j+1)` and its value sits at the pixel center. Samples
    /// outside the raster clamp to the nearest edge pixel.
    pub fn sample(&self, px: f64, py: f64) -> f64 {
        let fx = (px - 0.5).clamp(0.0, (self.width - 1) as f64);
        let fy = (py - 0.5).clamp(0.0, (self.height - 1) as f64);
        let x0 = fx.floor() as usize;
        let y0 = fy.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let ax = fx - x0 as f64;
        let ay = fy - y0 as f64;
        let p00 = self.get(x0, y0) as f64;
        let p10 = self.get(x1, y0) as f64;
        let p01 = self.get(x0, y1) as f64;
        let p11 = self.get(x1, y1) as f64;
        let top = p00 + (p10 - p00) * ax;
        let bottom = p01 + (p11 - p01) * ax;
        top + (bottom - top) * ay
    }

    pub fn ensure_min_size(&self, min: usize) -> Result<()> {
        if self.width < min || self.height < min {
            return Err(Error::ImageTooSmall { width: self.width, height: self.height, min });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Png,
    Pgm,
}

fn format_for(path: &Path) -> Option<Format> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "png" => Some(Format::Png),
        "pgm" => Some(Format::Pgm),
        _ => None,
    }
}

fn unreadable(path: &Path, reason: impl ToString) -> Error {
    Error::Unreadable { path: path.to_path_buf(), reason: reason.to_string() }
}

/// Reads a PNG or binary PGM. The format is sniffed from the file signature,
/// so mislabeled extensions still load.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    let mut file = BufReader::new(File::open(path).map_err(|e| unreadable(path, e))?);
    let mut magic = [0u8; 8];
    let head = file.fill_buf().map_err(|e| unreadable(path, e))?;
    let n = head.len().min(8);
    magic[..n].copy_from_slice(&head[..n]);
    if n >= 8 && magic == [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a] {
        decode_png(file, path)
    } else if n >= 2 && &magic[..2] == b"P5" {
        decode_pgm(file, path)
    } else if n == 0 {
        Err(unreadable(path, "empty file"))
    } else {
        Err(Error::UnsupportedFormat(path.to_path_buf()))
    }
}

fn decode_png<R: BufRead + std::io::Seek>(reader: R, path: &Path) -> Result<GrayImage> {
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = decoder.read_info().map_err(|e| unreadable(path, e))?;
    let dpi = reader
        .info()
        .pixel_dims
        .filter(|d| d.unit == png::Unit::Meter && d.xppu > 0)
        .map(|d| (d.xppu as f64 * METERS_PER_INCH).round() as u32)
        .unwrap_or(DEFAULT_DPI);
    let size = reader.output_buffer_size().ok_or_else(|| unreadable(path, "image too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| unreadable(path, e))?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    let channels = frame.color_type.samples();
    let color = frame.color_type;
    let mut pixels = Vec::with_capacity(width * height);
    for row in buf.chunks(frame.line_size).take(height) {
        for px in row[..width * channels].chunks(channels) {
            let v = match color {
                png::ColorType::Grayscale | png::ColorType::GrayscaleAlpha => px[0],
                _ => ((px[0] as u32 + px[1] as u32 + px[2] as u32 + 1) / 3) as u8,
            };
            pixels.push(v);
        }
    }
    Ok(GrayImage { width, height, dpi, pixels })
}

fn read_pgm_token<R: BufRead>(r: &mut R, path: &Path) -> Result<usize> {
    let mut token = String::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte).map_err(|e| unreadable(path, e))? == 0 {
            return Err(unreadable(path, "truncated header"));
        }
        match byte[0] {
            b'#' if token.is_empty() => {
                let mut comment = Vec::new();
                r.read_until(b'\n', &mut comment).map_err(|e| unreadable(path, e))?;
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    break;
                }
            }
            b if b.is_ascii_digit() => token.push(b as char),
            _ => return Err(unreadable(path, "bad header")),
        }
    }
    token.parse().map_err(|_| unreadable(path, "bad header number"))
}

fn decode_pgm<R: BufRead>(mut r: R, path: &Path) -> Result<GrayImage> {
    let mut magic = [0u8; 2];
    r.read_exact(&mut magic).map_err(|e| unreadable(path, e))?;
    let width = read_pgm_token(&mut r, path)?;
    let height = read_pgm_token(&mut r, path)?;
    let maxval = read_pgm_token(&mut r, path)?;
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(path.to_path_buf()));
    }
    let mut pixels = vec![0u8; width * height];
    r.read_exact(&mut pixels).map_err(|e| unreadable(path, e))?;
    Ok(GrayImage { width, height, dpi: DEFAULT_DPI, pixels })
}

/// Writes PNG or P5 PGM depending on the extension of `path`.
pub fn save_image(img: &GrayImage, path: &Path) -> Result<()> {
    let format = format_for(path).ok_or_else(|| Error::UnsupportedFormat(path.to_path_buf()))?;
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Pgm => {
            write!(w, "P5\n{} {}\n255\n", img.width, img.height)?;
            w.write_all(&img.pixels)?;
        }
        Format::Png => {
            let mut enc = png::Encoder::new(&mut w, img.width as u32, img.height as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let ppm = (img.dpi as f64 / METERS_PER_INCH).round() as u32;
            enc.set_pixel_dims(Some(png::PixelDimensions {
                xppu: ppm,
                yppu: ppm,
                unit: png::Unit::Meter,
            }));
            let mut writer = enc.write_header().map_err(std::io::Error::other)?;
            writer.write_image_data(&img.pixels).map_err(std::io::Error::other)?;
            writer.finish().map_err(std::io::Error::other)?;
        }
    }
    w.flush()?;
    Ok(())
}
