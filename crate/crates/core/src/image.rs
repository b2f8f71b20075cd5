//! Grayscale rasters and their flattened-vector views.
//!
//! Every raster in the pipeline (object, reconstructions, guidance images,
//! edge maps) is an [`Image`]: a row-major buffer of `f64` intensities. Pixel
//! `(i, j)` (zero-based) lives at index `i * cols + j`, which is also its
//! position in the flattened column vector used by the sensing model.

use crate::error::{Error, Result};

/// A real-valued `rows × cols` raster stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image {
    /// Wraps a row-major pixel buffer, checking its length and that every
    /// value is finite.
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parameter(format!(
                "image dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if pixels.len() != rows * cols {
            return Err(Error::shape(
                format!("{} pixels ({rows}x{cols})", rows * cols),
                format!("{} pixels", pixels.len()),
            ));
        }
        if let Some(idx) = pixels.iter().position(|p| !p.is_finite()) {
            return Err(Error::Parameter(format!(
                "pixel {idx} is not finite ({})",
                pixels[idx]
            )));
        }
        Ok(Image { rows, cols, pixels })
    }

    /// Constant image. Panics on zero dimensions or a non-finite value.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Image::new(rows, cols, vec![value; rows * cols]).expect("valid constant image")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Image::filled(rows, cols, 0.0)
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    ///
    /// Panics if `f` yields a non-finite value or the dimensions are zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                pixels.push(f(i, j));
            }
        }
        Image::new(rows, cols, pixels).expect("from_fn produced an invalid image")
    }

    /// Maps integer gray levels `0..=max_level` linearly onto `[0, 1]`.
    ///
    /// Standard 8-bit and 16-bit rasters use `max_level` 255 and 65535.
    pub fn from_levels(rows: usize, cols: usize, levels: &[u16], max_level: u16) -> Result<Self> {
        if max_level == 0 {
            return Err(Error::Parameter(
                "maximum gray level must be positive".into(),
            ));
        }
        if let Some(&bad) = levels.iter().find(|&&l| l > max_level) {
            return Err(Error::Parameter(format!(
                "gray level {bad} exceeds maximum {max_level}"
            )));
        }
        let scale = f64::from(max_level);
        Image::new(
            rows,
            cols,
            levels.iter().map(|&l| f64::from(l) / scale).collect(),
        )
    }

    pub fn from_u8(rows: usize, cols: usize, levels: &[u8]) -> Result<Self> {
        let wide: Vec<u16> = levels.iter().map(|&l| u16::from(l)).collect();
        Image::from_levels(rows, cols, &wide, u8::MAX as u16)
    }

    pub fn from_u16(rows: usize, cols: usize, levels: &[u16]) -> Result<Self> {
        Image::from_levels(rows, cols, levels, u16::MAX)
    }

    /// Quantizes to `0..=max_level`, clipping values outside `[0, 1]`.
    pub fn to_levels(&self, max_level: u16) -> Vec<u16> {
        let scale = f64::from(max_level);
        self.pixels
            .iter()
            .map(|&p| (p.clamp(0.0, 1.0) * scale).round() as u16)
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    /// Returns an error naming both shapes unless `other` has the same
    /// dimensions as `self`.
    pub fn ensure_same_shape(&self, other: &Image) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }

    /// Applies `f` to every pixel. Panics if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image::new(
            self.rows,
            self.cols,
            self.pixels.iter().map(|&p| f(p)).collect(),
        )
        .expect("map produced a non-finite pixel")
    }

    /// `(min, max)` over all pixels.
    pub fn min_max(&self) -> (f64, f64) {
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            })
    }

    /// Rescales so the minimum maps to 0 and the maximum to 1. A constant
    /// image maps to all zeros.
    pub fn normalized(&self) -> Image {
        let (lo, hi) = self.min_max();
        let span = hi - lo;
        if span <= 0.0 {
            return Image::zeros(self.rows, self.cols);
        }
        self.map(|p| (p - lo) / span)
    }

    /// Clips every pixel into `[0, 1]`.
    pub fn clamped(&self) -> Image {
        self.map(|p| p.clamp(0.0, 1.0))
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }
}

/// Flattens an image row-major into a vector of length `rows * cols`.
pub fn image_to_vector(img: &Image) -> Vec<f64> {
    img.pixels.clone()
}

/// Reshapes a row-major vector into a `rows × cols` image.
pub fn vector_to_image(v: &[f64], rows: usize, cols: usize) -> Result<Image> {
    Image::new(rows, cols, v.to_vec())
}

/// Per-pixel edge coefficients produced by the guided filter.
///
/// Values are the window-averaged ridge-regression slopes. With a
/// self-guided filter and positive regularization they lie in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMap(Image);

impl EdgeMap {
    pub fn new(coefficients: Image) -> Self {
        EdgeMap(coefficients)
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    pub fn coefficients(&self) -> &[f64] {
        self.0.pixels()
    }

    pub fn as_image(&self) -> &Image {
        &self.0
    }

    pub fn into_image(self) -> Image {
        self.0
    }

    /// Min-max normalized copy for display and grading.
    pub fn normalized(&self) -> Image {
        self.0.normalized()
    }
}
