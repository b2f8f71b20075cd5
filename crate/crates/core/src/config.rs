//! TOML run configuration.
//!
//! Every section and key is optional and falls back to the library default;
//! unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//!
//! [sensing]
//! rows = 64
//! cols = 64
//! density = 0.5
//! noise_sigma = 0.0
//!
//! [plir]
//! omega = 1.5
//! rank_cutoff = 1e-10
//! clamp = true
//!
//! [filter]
//! radius = 1
//! epsilon = 0.003
//!
//! [jigi]
//! max_iterations = 500
//! tolerance = 1e-4
//!
//! [metrics]
//! edge_threshold = 0.25
//! max_val = 1.0
//!
//! [sweep]
//! m_values = [100, 150, 200]
//! phantom = "aircraft"
//!
//! [paths]
//! object = "object.pgm"
//! out_dir = "runs/sweep"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::guided_filter::GuidedFilterParams;
use crate::jigi::{JigiConfig, PlirParams};
use crate::metrics::{DEFAULT_EDGE_THRESHOLD, DEFAULT_MAX_VAL};
use crate::sensing::{NoiseModel, DEFAULT_DENSITY};

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingSection {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub noise_sigma: f64,
}

impl Default for SensingSection {
    fn default() -> Self {
        SensingSection {
            rows: 64,
            cols: 64,
            density: DEFAULT_DENSITY,
            noise_sigma: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlirSection {
    pub omega: f64,
    pub rank_cutoff: f64,
    pub clamp: bool,
}

impl Default for PlirSection {
    fn default() -> Self {
        let p = PlirParams::default();
        PlirSection {
            omega: p.omega,
            rank_cutoff: p.rank_cutoff,
            clamp: p.clamp,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub radius: usize,
    pub epsilon: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        let p = GuidedFilterParams::default();
        FilterSection {
            radius: p.radius,
            epsilon: p.epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JigiSection {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for JigiSection {
    fn default() -> Self {
        let c = JigiConfig::default();
        JigiSection {
            max_iterations: c.max_iterations,
            tolerance: c.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub edge_threshold: f64,
    pub max_val: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection {
            edge_threshold: DEFAULT_EDGE_THRESHOLD,
            max_val: DEFAULT_MAX_VAL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub m_values: Vec<usize>,
    /// `"aircraft"`, `"grayscale"` or a path to a PGM object.
    pub phantom: String,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            m_values: vec![100, 150, 200],
            phantom: "aircraft".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub object: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub measurements: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub sensing: SensingSection,
    pub plir: PlirSection,
    pub filter: FilterSection,
    pub jigi: JigiSection,
    pub metrics: MetricsSection,
    pub sweep: SweepSection,
    pub paths: PathsSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        RunConfig::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn jigi_config(&self) -> JigiConfig {
        JigiConfig {
            max_iterations: self.jigi.max_iterations,
            tolerance: self.jigi.tolerance,
            plir: PlirParams {
                omega: self.plir.omega,
                rank_cutoff: self.plir.rank_cutoff,
                clamp: self.plir.clamp,
            },
            filter: GuidedFilterParams {
                radius: self.filter.radius,
                epsilon: self.filter.epsilon,
            },
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::gaussian(self.sensing.noise_sigma)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = self.jigi_config();
        cfg.validate()?;
        if !(cfg.plir.omega.is_finite() && cfg.plir.omega > 0.0) {
            return Err(Error::Config(format!(
                "plir.omega must be positive, got {}",
                cfg.plir.omega
            )));
        }
        if !(0.0..1.0).contains(&cfg.plir.rank_cutoff) {
            return Err(Error::Config("plir.rank_cutoff must lie in [0, 1)".into()));
        }
        let d = self.sensing.density;
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!(
                "sensing.density must lie in (0, 1), got {d}"
            )));
        }
        if self.sensing.rows == 0 || self.sensing.cols == 0 {
            return Err(Error::Config(
                "sensing.rows and sensing.cols must be positive".into(),
            ));
        }
        self.noise()?;
        let t = self.metrics.edge_threshold;
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Config(format!(
                "metrics.edge_threshold must lie in (0, 1), got {t}"
            )));
        }
        if !(self.metrics.max_val.is_finite() && self.metrics.max_val > 0.0) {
            return Err(Error::Config("metrics.max_val must be positive".into()));
        }
        if self.sweep.m_values.contains(&0) {
            return Err(Error::Config("sweep.m_values must be positive".into()));
        }
        Ok(())
    }
}
