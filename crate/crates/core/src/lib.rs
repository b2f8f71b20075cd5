//! Computational ghost imaging with simultaneous image and edge recovery.
//!
//! A single-pixel detector records the overlap of an unknown object with a
//! stack of random binary speckle patterns. This crate simulates that
//! measurement and reconstructs both the object and a global edge map by
//! alternating a projected Landweber step with a guided filter whose slope
//! coefficients double as edge strength.
//!
//! ```
//! use jigi::{phantom, sensing, jigi::{reconstruct_jigi, JigiConfig}, metrics};
//!
//! let object = phantom::aircraft(32, 32);
//! let patterns = sensing::generate_patterns(32, 32, 120, 0.5, 1).unwrap();
//! let y = sensing::measure(&patterns, &object, sensing::NoiseModel::None, 0).unwrap();
//! let result = reconstruct_jigi(&patterns, &y, &JigiConfig::default()).unwrap();
//! let quality = metrics::psnr(&object, &result.image, 1.0).unwrap();
//! assert!(quality > 10.0);
//! ```

pub mod cgi;
pub mod config;
pub mod error;
pub mod guided_filter;
pub mod image;
pub mod io;
pub mod jigi;
pub mod metrics;
pub mod patterns;
pub mod phantom;
pub mod plir;
pub mod sensing;

pub use error::{Error, Result};
pub use guided_filter::{GuidedFilterOutput, GuidedFilterParams};
pub use image::{image_to_vector, vector_to_image, EdgeMap, Image};
pub use jigi::{JigiConfig, PlirParams, ReconstructionResult, StopReason};
pub use patterns::{MeasurementVector, PatternStack};
pub use plir::PlirOperator;

// Book chapters compiled as doctests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/landweber.md")]
    mod landweber {}
    #[doc = include_str!("../../../book/src/guided_filter.md")]
    mod guided_filter {}
    #[doc = include_str!("../../../book/src/joint_iteration.md")]
    mod joint_iteration {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/file_formats.md")]
    mod file_formats {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
