//! Image and edge-map quality measures.
//!
//! * [`snr`]: edge-region contrast over background standard deviation,
//!   `(mean(edge) − mean(back)) / sqrt(var(back))`, population variance.
//! * [`mse`] / [`psnr`]: `10·log₁₀(max_val² / MSE)`; identical inputs give
//!   `f64::INFINITY`.
//! * [`ground_truth_edge`]: Sobel magnitude, min-max normalized and
//!   thresholded, used as the reference edge image and region mask.

use crate::error::{Error, Result};
use crate::image::Image;

pub const DEFAULT_EDGE_THRESHOLD: f64 = 0.25;
pub const DEFAULT_MAX_VAL: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Edge,
    Background,
    Ignore,
}

/// Per-pixel edge / background labels with at least one of each.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    rows: usize,
    cols: usize,
    labels: Vec<Region>,
}

impl RegionMask {
    pub fn new(rows: usize, cols: usize, labels: Vec<Region>) -> Result<Self> {
        if labels.len() != rows * cols {
            return Err(Error::shape(
                format!("{} labels ({rows}x{cols})", rows * cols),
                format!("{} labels", labels.len()),
            ));
        }
        if !labels.contains(&Region::Edge) {
            return Err(Error::Mask("no edge pixels".into()));
        }
        if !labels.contains(&Region::Background) {
            return Err(Error::Mask("no background pixels".into()));
        }
        Ok(RegionMask { rows, cols, labels })
    }

    /// Non-zero pixels become edge, zero pixels background.
    pub fn from_edge_image(edge: &Image) -> Result<Self> {
        let labels = edge
            .pixels()
            .iter()
            .map(|&p| {
                if p != 0.0 {
                    Region::Edge
                } else {
                    Region::Background
                }
            })
            .collect();
        RegionMask::new(edge.rows(), edge.cols(), labels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[Region] {
        &self.labels
    }

    pub fn count(&self, region: Region) -> usize {
        self.labels.iter().filter(|&&l| l == region).count()
    }
}

fn mean_and_variance(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Edge-region contrast normalized by background noise.
pub fn snr(result: &Image, mask: &RegionMask) -> Result<f64> {
    if result.shape() != (mask.rows, mask.cols) {
        return Err(Error::shape(
            format!("{}x{} (mask)", mask.rows, mask.cols),
            format!("{}x{} (image)", result.rows(), result.cols()),
        ));
    }
    let pick = |region: Region| {
        result
            .pixels()
            .iter()
            .zip(&mask.labels)
            .filter(move |(_, &l)| l == region)
            .map(|(&p, _)| p)
    };
    let (edge_mean, _) = mean_and_variance(pick(Region::Edge));
    let (back_mean, back_var) = mean_and_variance(pick(Region::Background));
    // a constant background can still leave ~1e-34 of rounding in the variance
    let (lo, hi) = pick(Region::Background)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p), hi.max(p))
        });
    if lo == hi || back_var <= 0.0 {
        return Err(Error::UndefinedSnr("background variance is zero".into()));
    }
    Ok((edge_mean - back_mean) / back_var.sqrt())
}

/// Mean squared error over all pixels.
pub fn mse(reference: &Image, candidate: &Image) -> Result<f64> {
    reference.ensure_same_shape(candidate)?;
    let sum: f64 = reference
        .pixels()
        .iter()
        .zip(candidate.pixels())
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(sum / reference.len() as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
pub fn psnr(reference: &Image, candidate: &Image, max_val: f64) -> Result<f64> {
    if !(max_val.is_finite() && max_val > 0.0) {
        return Err(Error::Parameter(format!(
            "max_val must be positive, got {max_val}"
        )));
    }
    let err = mse(reference, candidate)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max_val * max_val / err).log10())
}

/// Sobel gradient magnitude with replicated borders.
pub fn sobel_magnitude(img: &Image) -> Image {
    let (rows, cols) = img.shape();
    let at = |i: isize, j: isize| {
        let i = i.clamp(0, rows as isize - 1) as usize;
        let j = j.clamp(0, cols as isize - 1) as usize;
        img.get(i, j)
    };
    Image::from_fn(rows, cols, |i, j| {
        let (i, j) = (i as isize, j as isize);
        let gx = (at(i - 1, j + 1) + 2.0 * at(i, j + 1) + at(i + 1, j + 1))
            - (at(i - 1, j - 1) + 2.0 * at(i, j - 1) + at(i + 1, j - 1));
        let gy = (at(i + 1, j - 1) + 2.0 * at(i + 1, j) + at(i + 1, j + 1))
            - (at(i - 1, j - 1) + 2.0 * at(i - 1, j) + at(i - 1, j + 1));
        gx.hypot(gy)
    })
}

/// Reference edges of a known object.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthEdge {
    pub mask: RegionMask,
    /// Binary edge image (1 on edges, 0 elsewhere).
    pub edge: Image,
}

/// Thresholds the normalized Sobel magnitude of `object`: pixels strictly
/// above `threshold` are edges.
pub fn ground_truth_edge(object: &Image, threshold: f64) -> Result<GroundTruthEdge> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Parameter(format!(
            "edge threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let magnitude = sobel_magnitude(object);
    let (lo, hi) = magnitude.min_max();
    if hi - lo <= 0.0 {
        return Err(Error::Mask("object has no gradient".into()));
    }
    threshold_edges(&magnitude.normalized(), threshold)
}

/// Edge set `{p > threshold}` of an already normalized magnitude map.
pub fn threshold_edges(normalized: &Image, threshold: f64) -> Result<GroundTruthEdge> {
    let edge = normalized.map(|p| if p > threshold { 1.0 } else { 0.0 });
    let mask = RegionMask::from_edge_image(&edge)?;
    Ok(GroundTruthEdge { mask, edge })
}
