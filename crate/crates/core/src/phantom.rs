//! Synthetic test objects.

use crate::image::Image;

/// Binary aircraft silhouette (0) on a white background (1), seen from above.
///
/// Coordinates are normalized to `[-1, 1]` along both axes so the shape
/// stretches with the raster: an elliptical fuselage along the horizontal
/// axis, swept wings and a tailplane.
pub fn aircraft(rows: usize, cols: usize) -> Image {
    let (row_span, col_span) = ((rows.max(2) - 1) as f64, (cols.max(2) - 1) as f64);
    Image::from_fn(rows, cols, |i, j| {
        let y = i as f64 / row_span * 2.0 - 1.0;
        let x = j as f64 / col_span * 2.0 - 1.0;
        let fuselage = (x / 0.75).powi(2) + (y / 0.11).powi(2) <= 1.0;
        let wing = y.abs() <= 0.72 && x >= -0.2 + 0.3 * y.abs() && x <= 0.05 + 0.3 * y.abs();
        let tail = y.abs() <= 0.3 && x >= 0.5 + 0.3 * y.abs() && x <= 0.62 + 0.3 * y.abs();
        if fuselage || wing || tail {
            0.0
        } else {
            1.0
        }
    })
}

/// Simple grayscale scene: a mid-gray background holding a dark rectangle,
/// a bright disk and a lighter triangle.
pub fn grayscale_shapes(rows: usize, cols: usize) -> Image {
    let (row_span, col_span) = ((rows.max(2) - 1) as f64, (cols.max(2) - 1) as f64);
    Image::from_fn(rows, cols, |i, j| {
        let y = i as f64 / row_span;
        let x = j as f64 / col_span;
        if (x - 0.68).powi(2) + (y - 0.32).powi(2) <= 0.18f64.powi(2) {
            0.95
        } else if (0.12..=0.45).contains(&x) && (0.15..=0.55).contains(&y) {
            0.15
        } else if (0.6..=0.9).contains(&y) && (x - 0.5).abs() <= (y - 0.6) * 1.2 {
            0.7
        } else {
            0.45
        }
    })
}
