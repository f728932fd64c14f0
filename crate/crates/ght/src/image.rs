//! Grayscale conversion, binarization, and image file IO.
//!
//! Color images collapse to gray by taking the per-pixel maximum over the
//! color channels (alpha is ignored), which keeps faint colored ink dark
//! only when every channel is dark. Binarization writes ink as 0 and
//! background as 255; a pixel is ink when its value is less than or equal
//! to the threshold.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::GhtError;
use crate::histogram::Histogram;
use crate::threshold::{ght, met, otsu, otsu_distortion_form, wprctile, GhtParams, ThresholdResult};

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, GhtError> {
        if width == 0 || height == 0 || pixels.is_empty() {
            return Err(GhtError::EmptyImage);
        }
        if pixels.len() != width * height {
            return Err(GhtError::DimensionMismatch(width, height, pixels.len(), width * height));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Decodes PNG (via the `image` crate) or binary PGM/PPM, deciding by
    /// content magic, and collapses color to gray with [`to_gray_max`].
    pub fn decode(bytes: &[u8]) -> Result<Self, GhtError> {
        if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
            return decode_pnm(bytes);
        }
        let img = image::load_from_memory(bytes).map_err(|e| GhtError::Codec(e.to_string()))?;
        gray_from_image(&img)
    }

    /// [`Self::decode`] for a file, with the path added to codec errors.
    pub fn load(path: &Path) -> Result<Self, GhtError> {
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        Self::decode(&bytes).map_err(|e| match e {
            GhtError::Codec(msg) => GhtError::Codec(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// In-memory PNG encoding.
    pub fn encode_png(&self) -> Result<Vec<u8>, GhtError> {
        let buf: image::GrayImage =
            image::ImageBuffer::from_raw(self.width as u32, self.height as u32, self.pixels.clone())
                .expect("buffer length checked at construction");
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, image::ImageFormat::Png)
            .map_err(|e| GhtError::Codec(e.to_string()))?;
        Ok(out.into_inner())
    }

    /// Writes PNG or binary PGM, deciding by the output extension
    /// (anything other than `.pgm` is written as PNG).
    pub fn save(&self, path: &Path) -> Result<(), GhtError> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
            let mut w = BufWriter::new(File::create(path)?);
            write_pgm(&mut w, self.width, self.height, &self.pixels)?;
            return Ok(());
        }
        let bytes = self.encode_png().map_err(|e| match e {
            GhtError::Codec(msg) => GhtError::Codec(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok(std::fs::write(path, bytes)?)
    }
}

/// Collapses interleaved 8-bit pixel data to gray by the max over color
/// channels. `channels` may be 1 (gray), 2 (gray+alpha), 3 (RGB), or
/// 4 (RGBA); alpha is ignored.
pub fn to_gray_max(width: usize, height: usize, channels: usize, data: &[u8]) -> Result<GrayImage, GhtError> {
    let color = match channels {
        1 | 2 => 1,
        3 | 4 => 3,
        _ => return Err(GhtError::UnsupportedImage(format!("{channels} channels"))),
    };
    if data.len() != width * height * channels {
        return Err(GhtError::DimensionMismatch(width, height, data.len(), width * height * channels));
    }
    let mut pixels = Vec::with_capacity(width * height);
    for px in data.chunks_exact(channels) {
        let mut m = px[0];
        for &c in &px[1..color] {
            m = m.max(c);
        }
        pixels.push(m);
    }
    GrayImage::new(width, height, pixels)
}

/// [`to_gray_max`] for a decoded `image` crate value. 16-bit and float
/// formats are rejected rather than silently truncated.
pub fn gray_from_image(img: &image::DynamicImage) -> Result<GrayImage, GhtError> {
    use image::DynamicImage::*;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        ImageLuma8(b) => to_gray_max(w, h, 1, b.as_raw()),
        ImageLumaA8(b) => to_gray_max(w, h, 2, b.as_raw()),
        ImageRgb8(b) => to_gray_max(w, h, 3, b.as_raw()),
        ImageRgba8(b) => to_gray_max(w, h, 4, b.as_raw()),
        _ => Err(GhtError::UnsupportedImage("only 8-bit images are supported".into())),
    }
}

/// Binary mask, row-major; `true` is ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    mask: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, mask: Vec<bool>) -> Result<Self, GhtError> {
        if width == 0 || height == 0 || mask.is_empty() {
            return Err(GhtError::EmptyImage);
        }
        if mask.len() != width * height {
            return Err(GhtError::DimensionMismatch(width, height, mask.len(), width * height));
        }
        Ok(Self { width, height, mask })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    pub fn ink_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Values below 128 are ink. Round-trips exactly against [`Self::save`],
    /// which only emits 0 and 255.
    pub fn from_gray(img: &GrayImage) -> Self {
        Self {
            width: img.width,
            height: img.height,
            mask: img.pixels.iter().map(|&v| v < 128).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, GhtError> {
        Ok(Self::from_gray(&GrayImage::load(path)?))
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.mask.iter().map(|&b| if b { 0u8 } else { 255u8 }).collect(),
        }
    }

    /// Writes ink as 0 and background as 255, PNG or PGM by extension.
    pub fn save(&self, path: &Path) -> Result<(), GhtError> {
        self.to_gray().save(path)
    }
}

/// Threshold the image at `t`: ink where `pixel as f64 <= t`.
pub fn binarize(img: &GrayImage, t: f64) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        mask: img.pixels.iter().map(|&v| v as f64 <= t).collect(),
    }
}

/// Thresholding algorithm selector for the pipeline and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    Ght(GhtParams),
    Met,
    Otsu,
    OtsuDistortion,
    Wprctile(f64),
}

impl Algorithm {
    pub fn threshold(&self, h: &Histogram) -> Result<ThresholdResult, GhtError> {
        match self {
            Algorithm::Ght(p) => Ok(ght(h, p)),
            Algorithm::Met => Ok(met(h)),
            Algorithm::Otsu => Ok(otsu(h)),
            Algorithm::OtsuDistortion => Ok(otsu_distortion_form(h)),
            Algorithm::Wprctile(omega) => wprctile(h, *omega),
        }
    }
}

/// Full binarization pipeline: 256-bin histogram, threshold, mask.
pub fn run_binarization(img: &GrayImage, alg: &Algorithm) -> Result<(BinaryImage, ThresholdResult), GhtError> {
    let h = Histogram::from_pixels(img.pixels())?;
    let res = alg.threshold(&h)?;
    Ok((binarize(img, res.t), res))
}

fn decode_pnm(bytes: &[u8]) -> Result<GrayImage, GhtError> {
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(GhtError::UnsupportedImage("only binary P5/P6 PNM is supported".into())),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Whitespace and '#'-to-end-of-line comments separate header fields.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err(GhtError::Codec("malformed PNM header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .expect("digits are utf8")
            .parse()
            .map_err(|_| GhtError::Codec("PNM header field out of range".into()))?;
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(GhtError::Codec(format!("unsupported PNM maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(GhtError::Codec("malformed PNM header".into()));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| GhtError::Codec("PNM dimensions overflow".into()))?;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| GhtError::Codec("PNM raster truncated".into()))?;
    to_gray_max(width, height, channels, raster)
}

fn write_pgm<W: Write>(w: &mut W, width: usize, height: usize, pixels: &[u8]) -> std::io::Result<()> {
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(pixels)
}
