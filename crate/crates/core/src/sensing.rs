//! Forward model: random binary speckle patterns and simulated single-pixel
//! (bucket) measurements.
//!
//! # Random stream
//!
//! Both operations draw from a `Xoshiro256++` generator seeded through
//! `SplitMix64` (`seed_from_u64`). Pattern generation consumes one `u64` per
//! pixel, pattern-major then row-major; the top 53 bits form a uniform
//! `u ∈ [0, 1)` and the pixel is lit when `u < density`. This ordering is
//! part of the file-level reproducibility contract: the first `M'` patterns
//! of a stack generated with `M > M'` are identical to a stack generated with
//! `M'`.

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::patterns::{MeasurementVector, PatternStack};

/// Default probability that a speckle pixel is lit.
pub const DEFAULT_DENSITY: f64 = 0.5;

/// Detector noise added to each bucket value.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum NoiseModel {
    #[default]
    None,
    /// Zero-mean Gaussian noise with standard deviation `sigma` in bucket units.
    AdditiveGaussian { sigma: f64 },
}

impl NoiseModel {
    /// Gaussian noise of the given standard deviation; `sigma == 0` gives
    /// [`NoiseModel::None`].
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Parameter(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(if sigma == 0.0 {
            NoiseModel::None
        } else {
            NoiseModel::AdditiveGaussian { sigma }
        })
    }

    pub fn sigma(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::AdditiveGaussian { sigma } => *sigma,
        }
    }
}

fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generates `count` independent Bernoulli(`density`) binary patterns.
pub fn generate_patterns(
    rows: usize,
    cols: usize,
    count: usize,
    density: f64,
    seed: u64,
) -> Result<PatternStack> {
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::Parameter(format!(
            "pattern density must lie strictly between 0 and 1, got {density}"
        )));
    }
    if rows == 0 || cols == 0 || count == 0 {
        return Err(Error::Parameter(format!(
            "need at least one pattern of at least one pixel, got {count} x {rows}x{cols}"
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let data = (0..count * rows * cols)
        .map(|_| {
            if unit_interval(rng.next_u64()) < density {
                1.0f32
            } else {
                0.0
            }
        })
        .collect();
    PatternStack::new(count, rows, cols, data)
}

/// Inner product of one pattern with a flattened object, summed in pixel
/// order.
pub(crate) fn bucket(pattern: &[f32], object: &[f64]) -> f64 {
    pattern
        .iter()
        .zip(object)
        .map(|(&p, &o)| f64::from(p) * o)
        .sum()
}

/// Simulates the single-pixel detector: `y[m] = <pattern_m, object> + noise`.
///
/// Noise samples are drawn in pattern order from a generator seeded with
/// `seed`; with [`NoiseModel::None`] the seed is unused.
pub fn measure(
    patterns: &PatternStack,
    object: &Image,
    noise: NoiseModel,
    seed: u64,
) -> Result<MeasurementVector> {
    patterns.ensure_matches(object)?;
    let x = object.pixels();
    let mut values: Vec<f64> = patterns.iter().map(|p| bucket(p, x)).collect();
    if let NoiseModel::AdditiveGaussian { sigma } = noise {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        for v in &mut values {
            let eta: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * eta;
        }
    }
    MeasurementVector::new(values)
}
