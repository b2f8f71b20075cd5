//! Traditional correlation ghost imaging, used as a comparison baseline.
//!
//! `G(i,j) = (1/M)·Σ_m (B(m) − ⟨B⟩)·(I_m(i,j) − ⟨I(i,j)⟩)`

use crate::error::{Error, Result};
use crate::image::Image;
use crate::patterns::{MeasurementVector, PatternStack};

/// Raw ensemble covariance between bucket values and every pattern pixel.
pub fn cgi_correlation(patterns: &PatternStack, y: &MeasurementVector) -> Result<Image> {
    y.ensure_matches(patterns)?;
    let m = patterns.count();
    if m < 2 {
        return Err(Error::Parameter(format!(
            "correlation imaging needs at least 2 measurements, got {m}"
        )));
    }
    let k = patterns.pixels_per_pattern();
    let inv_m = 1.0 / m as f64;
    let mean_b = y.values().iter().sum::<f64>() * inv_m;

    let mut mean_i = vec![0.0; k];
    let mut cross = vec![0.0; k];
    for (pattern, &b) in patterns.iter().zip(y.values()) {
        let db = b - mean_b;
        for ((mi, c), &p) in mean_i.iter_mut().zip(cross.iter_mut()).zip(pattern) {
            let p = f64::from(p);
            *mi += p;
            *c += db * p;
        }
    }
    // Σ(B−⟨B⟩)(I−⟨I⟩) = Σ(B−⟨B⟩)·I because Σ(B−⟨B⟩) = 0 up to rounding;
    // subtract that residual term explicitly to stay exact for shifted buckets.
    let centred_sum: f64 = y.values().iter().map(|b| b - mean_b).sum();
    let g = mean_i
        .iter()
        .zip(&cross)
        .map(|(&si, &c)| (c - centred_sum * si * inv_m) * inv_m)
        .collect();
    Image::new(patterns.rows(), patterns.cols(), g)
}

/// Correlation image min-max normalized to `[0, 1]`.
pub fn reconstruct_cgi(patterns: &PatternStack, y: &MeasurementVector) -> Result<Image> {
    Ok(cgi_correlation(patterns, y)?.normalized())
}
