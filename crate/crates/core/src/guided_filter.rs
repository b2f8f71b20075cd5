//! Edge-preserving guided filter with the edge-coefficient map exposed.
//!
//! For every window `ω_k` (the `(2r+1)²` square centred on pixel `k`,
//! truncated at the image border) the filter fits `x ≈ a_k·I + b_k` by ridge
//! regression:
//!
//! ```text
//! a_k = (mean_k(I·x) − μ_k·x̄_k) / (σ_k² + ε)
//! b_k = x̄_k − a_k·μ_k
//! ```
//!
//! and the output at pixel `i` is `q_i = ā_i·I_i + b̄_i`, where `ā_i`, `b̄_i`
//! average the coefficients of all windows covering `i`. With `I = x` the
//! slope reduces to `σ_k² / (σ_k² + ε) ∈ [0, 1)`: close to one across edges
//! and texture, close to zero in flat regions. The map `ā` is therefore an
//! edge image of the input.
//!
//! All window statistics are box means over a summed-area table, so a pass
//! costs `O(rows · cols)` regardless of the radius. Truncated windows use
//! their true pixel count.

use crate::error::{Error, Result};
use crate::image::{EdgeMap, Image};

pub const DEFAULT_RADIUS: usize = 1;
pub const DEFAULT_EPSILON: f64 = 3e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuidedFilterParams {
    /// Window half-width `r`; windows are `(2r+1) × (2r+1)`.
    pub radius: usize,
    /// Ridge regularization `ε > 0`.
    pub epsilon: f64,
}

impl Default for GuidedFilterParams {
    fn default() -> Self {
        GuidedFilterParams {
            radius: DEFAULT_RADIUS,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl GuidedFilterParams {
    pub fn new(radius: usize, epsilon: f64) -> Result<Self> {
        let params = GuidedFilterParams { radius, epsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Parameter(format!(
                "guided filter epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Filtered image `q`, averaged slope map `ā` and averaged offset map `b̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct GuidedFilterOutput {
    pub q: Image,
    pub a: EdgeMap,
    pub b: Image,
}

/// Per-window coefficients `a_k`, `b_k`, indexed by window centre.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCoefficients {
    pub a: Image,
    pub b: Image,
}

/// Truncated-window box means over a fixed raster size.
struct BoxMean {
    rows: usize,
    cols: usize,
    radius: usize,
    counts: Vec<f64>,
    table: Vec<f64>,
}

impl BoxMean {
    fn new(rows: usize, cols: usize, radius: usize) -> Self {
        let mut counts = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let h = (i + radius).min(rows - 1) + 1 - i.saturating_sub(radius);
            for j in 0..cols {
                let w = (j + radius).min(cols - 1) + 1 - j.saturating_sub(radius);
                counts.push((h * w) as f64);
            }
        }
        BoxMean {
            rows,
            cols,
            radius,
            counts,
            table: vec![0.0; (rows + 1) * (cols + 1)],
        }
    }

    fn mean(&mut self, values: &[f64]) -> Vec<f64> {
        let (rows, cols, r) = (self.rows, self.cols, self.radius);
        let stride = cols + 1;
        for i in 0..rows {
            let mut row_sum = 0.0;
            for j in 0..cols {
                row_sum += values[i * cols + j];
                self.table[(i + 1) * stride + j + 1] = self.table[i * stride + j + 1] + row_sum;
            }
        }
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let top = i.saturating_sub(r);
            let bottom = (i + r).min(rows - 1) + 1;
            for j in 0..cols {
                let left = j.saturating_sub(r);
                let right = (j + r).min(cols - 1) + 1;
                let sum = self.table[bottom * stride + right]
                    - self.table[top * stride + right]
                    - self.table[bottom * stride + left]
                    + self.table[top * stride + left];
                out.push(sum / self.counts[i * cols + j]);
            }
        }
        out
    }
}

fn centred(img: &Image) -> (Vec<f64>, f64) {
    let mean = img.mean();
    (img.pixels().iter().map(|&p| p - mean).collect(), mean)
}

fn coefficients(
    guidance: &Image,
    input: &Image,
    params: &GuidedFilterParams,
    boxes: &mut BoxMean,
) -> (Vec<f64>, Vec<f64>) {
    let self_guided = guidance.pixels() == input.pixels();
    // Box statistics on mean-removed data keep E[I²] − μ² from cancelling
    // catastrophically on bright, flat regions.
    let (g, g_shift) = centred(guidance);
    let mean_g = boxes.mean(&g);
    let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
    let var: Vec<f64> = boxes
        .mean(&sq)
        .iter()
        .zip(&mean_g)
        .map(|(m2, m)| (m2 - m * m).max(0.0))
        .collect();

    let (mean_x, x_shift, cov) = if self_guided {
        (mean_g.clone(), g_shift, var.clone())
    } else {
        let (x, x_shift) = centred(input);
        let mean_x = boxes.mean(&x);
        let prod: Vec<f64> = g.iter().zip(&x).map(|(a, b)| a * b).collect();
        let cov = boxes
            .mean(&prod)
            .iter()
            .zip(mean_g.iter().zip(&mean_x))
            .map(|(m, (mg, mx))| m - mg * mx)
            .collect();
        (mean_x, x_shift, cov)
    };

    let a: Vec<f64> = cov
        .iter()
        .zip(&var)
        .map(|(c, v)| c / (v + params.epsilon))
        .collect();
    let b = a
        .iter()
        .zip(mean_g.iter().zip(&mean_x))
        .map(|(ak, (mg, mx))| (mx + x_shift) - ak * (mg + g_shift))
        .collect();
    (a, b)
}

/// Per-window ridge coefficients `(a_k, b_k)` before averaging.
pub fn window_coefficients(
    guidance: &Image,
    input: &Image,
    params: &GuidedFilterParams,
) -> Result<WindowCoefficients> {
    params.validate()?;
    guidance.ensure_same_shape(input)?;
    let (rows, cols) = guidance.shape();
    let mut boxes = BoxMean::new(rows, cols, params.radius);
    let (a, b) = coefficients(guidance, input, params, &mut boxes);
    Ok(WindowCoefficients {
        a: Image::new(rows, cols, a)?,
        b: Image::new(rows, cols, b)?,
    })
}

/// Filters `input` steered by `guidance`, returning `q`, `ā` and `b̄`.
pub fn guided_filter(
    guidance: &Image,
    input: &Image,
    params: &GuidedFilterParams,
) -> Result<GuidedFilterOutput> {
    params.validate()?;
    guidance.ensure_same_shape(input)?;
    let (rows, cols) = guidance.shape();
    let mut boxes = BoxMean::new(rows, cols, params.radius);
    let (a, b) = coefficients(guidance, input, params, &mut boxes);
    let mut a_bar = boxes.mean(&a);
    if guidance.pixels() == input.pixels() {
        // Every a_k is non-negative here; summed-area differences can leave
        // a residue of about -1e-23 where the window slopes are zero.
        a_bar.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let b_bar = boxes.mean(&b);
    let q = guidance
        .pixels()
        .iter()
        .zip(a_bar.iter().zip(&b_bar))
        .map(|(i, (a, b))| a * i + b)
        .collect();
    Ok(GuidedFilterOutput {
        q: Image::new(rows, cols, q)?,
        a: EdgeMap::new(Image::new(rows, cols, a_bar)?),
        b: Image::new(rows, cols, b_bar)?,
    })
}

/// Edge map of `x` from the self-guided filter, `guided_filter(x, x).a`.
pub fn edge_response_selfguided(x: &Image, params: &GuidedFilterParams) -> Result<EdgeMap> {
    Ok(guided_filter(x, x, params)?.a)
}
