//! Illumination pattern stacks and bucket-detector measurement vectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::image::Image;

/// `count` illumination patterns of `rows × cols` pixels.
///
/// Patterns are stored pattern-major, each pattern row-major, in single
/// precision. Generated patterns are binary; loaded patterns may hold any
/// finite non-negative intensity.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternStack {
    count: usize,
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl PatternStack {
    pub fn new(count: usize, rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if count == 0 || rows == 0 || cols == 0 {
            return Err(Error::Parameter(format!(
                "pattern stack dimensions must be positive, got {count} x {rows}x{cols}"
            )));
        }
        let expected = count
            .checked_mul(rows * cols)
            .ok_or_else(|| Error::Parameter("pattern stack is too large".into()))?;
        if data.len() != expected {
            return Err(Error::shape(
                format!("{expected} values ({count} patterns of {rows}x{cols})"),
                format!("{} values", data.len()),
            ));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Parameter(format!(
                "pattern value {} at index {idx} is not a finite non-negative intensity",
                data[idx]
            )));
        }
        Ok(PatternStack {
            count,
            rows,
            cols,
            data,
        })
    }

    /// Stacks equally sized images into patterns. Values are narrowed to `f32`.
    pub fn from_images(images: &[Image]) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::Parameter("at least one pattern is required".into()))?;
        let mut data = Vec::with_capacity(images.len() * first.len());
        for img in images {
            first.ensure_same_shape(img)?;
            data.extend(img.pixels().iter().map(|&p| p as f32));
        }
        PatternStack::new(images.len(), first.rows(), first.cols(), data)
    }

    /// Number of patterns `M`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Pixels per pattern, `K = rows * cols`.
    pub fn pixels_per_pattern(&self) -> usize {
        self.rows * self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Row-major pixels of pattern `m`.
    pub fn pattern(&self, m: usize) -> &[f32] {
        let k = self.pixels_per_pattern();
        &self.data[m * k..(m + 1) * k]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f32]> {
        self.data.chunks_exact(self.pixels_per_pattern())
    }

    pub fn pattern_image(&self, m: usize) -> Image {
        Image::new(
            self.rows,
            self.cols,
            self.pattern(m).iter().map(|&v| f64::from(v)).collect(),
        )
        .expect("patterns hold finite values")
    }

    /// True when every value is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// The `M × K` sensing matrix whose row `m` is pattern `m` flattened
    /// row-major.
    pub fn flatten(&self) -> DMatrix<f64> {
        let k = self.pixels_per_pattern();
        DMatrix::from_row_iterator(self.count, k, self.data.iter().map(|&v| f64::from(v)))
    }

    /// Checks that an object or reconstruction matches the pattern shape.
    pub fn ensure_matches(&self, img: &Image) -> Result<()> {
        if img.shape() != (self.rows, self.cols) {
            return Err(Error::shape(
                format!("{}x{} (patterns)", self.rows, self.cols),
                format!("{}x{} (image)", img.rows(), img.cols()),
            ));
        }
        Ok(())
    }
}

/// Bucket values `y = [B(1), ..., B(M)]`, one per pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementVector {
    values: Vec<f64>,
}

impl MeasurementVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("measurement vector is empty".into()));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "measurement {idx} is not finite ({})",
                values[idx]
            )));
        }
        Ok(MeasurementVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Checks that there is one value per pattern in `patterns`.
    pub fn ensure_matches(&self, patterns: &PatternStack) -> Result<()> {
        if self.values.len() != patterns.count() {
            return Err(Error::shape(
                format!("{} measurements (one per pattern)", patterns.count()),
                format!("{} measurements", self.values.len()),
            ));
        }
        Ok(())
    }
}
