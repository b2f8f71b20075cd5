//! Joint iteration of projected Landweber and guided filtering.
//!
//! Starting from `x₀ = 0`, each iteration `t`:
//!
//! 1. takes a Landweber step from the previous filter output,
//!    `x_t = plir_step(q_{t-1})` (with `q_0 = x_0`);
//! 2. filters it, guided by `x_1` on the first pass and by `q_{t-1}`
//!    afterwards: `(q_t, ā_t) = guided_filter(I_t, x_t)`.
//!
//! The loop stops once `‖q_t − q_{t-1}‖ / max(‖q_{t-1}‖, 1e-12)` drops below
//! the tolerance, or after `max_iterations`. It also stops when the update
//! norm `‖q_t − q_{t-1}‖` has grown for [`STAGNATION_WINDOW`] consecutive
//! iterations and by at least [`STAGNATION_GROWTH`] overall. In that case the
//! iterate with the smallest data residual is returned.

use crate::error::{Error, Result};
use crate::guided_filter::{edge_response_selfguided, guided_filter, GuidedFilterParams};
use crate::image::{vector_to_image, EdgeMap, Image};
use crate::patterns::{MeasurementVector, PatternStack};
use crate::plir::{build_operator, plir_step, PlirOperator, DEFAULT_OMEGA, DEFAULT_RANK_CUTOFF};

pub const DEFAULT_MAX_ITERATIONS: usize = 500;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Consecutive growing update norms `‖q_t − q_{t−1}‖` after which the loop
/// gives up, provided the norm also grew by [`STAGNATION_GROWTH`] over that
/// window.
pub const STAGNATION_WINDOW: usize = 5;

/// Minimum total growth of the update norm across the stagnation window.
/// Healthy runs show slow bumps of at most about 1.15x per iteration. An
/// unstable gain grows the norm geometrically.
pub const STAGNATION_GROWTH: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlirParams {
    /// Gain `ω`.
    pub omega: f64,
    /// Relative singular-value cutoff for the pseudo-inverse.
    pub rank_cutoff: f64,
    /// Clip each iterate into `[0, 1]`.
    pub clamp: bool,
}

impl Default for PlirParams {
    fn default() -> Self {
        PlirParams {
            omega: DEFAULT_OMEGA,
            rank_cutoff: DEFAULT_RANK_CUTOFF,
            clamp: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JigiConfig {
    pub max_iterations: usize,
    /// Relative-change threshold on successive outputs.
    pub tolerance: f64,
    pub plir: PlirParams,
    pub filter: GuidedFilterParams,
}

impl Default for JigiConfig {
    fn default() -> Self {
        JigiConfig {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
            plir: PlirParams::default(),
            filter: GuidedFilterParams::default(),
        }
    }
}

impl JigiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        self.filter.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    Stagnated,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxIterations => "max_iterations",
            StopReason::Stagnated => "stagnated",
        }
    }
}

/// Reconstructed image together with its edge map.
///
/// For joint iteration `image` is the final filter output, `guidance` the
/// guidance image of that pass and `offset` its `b̄`, so
/// `image = edge·guidance + offset` (before clipping, when clamping is on).
/// For the Landweber-only ablation `guidance` is the final image and
/// `edge`/`offset` come from one self-guided pass over it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub image: Image,
    pub edge: EdgeMap,
    pub guidance: Image,
    pub offset: Image,
    pub iterations_run: usize,
    /// `‖y − A·x_t‖₂` after each Landweber step.
    pub residual_history: Vec<f64>,
    pub stop_reason: StopReason,
}

/// Returns `‖current − previous‖` and that norm relative to `‖previous‖`.
fn update_size(current: &[f64], previous: &[f64]) -> (f64, f64) {
    let diff: f64 = current
        .iter()
        .zip(previous)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm = previous.iter().map(|v| v * v).sum::<f64>().sqrt();
    (diff, diff / norm.max(1e-12))
}

#[derive(Default)]
struct StagnationGuard {
    recent: std::collections::VecDeque<f64>,
    growing: usize,
}

impl StagnationGuard {
    /// Records the latest update norm and reports whether the run is
    /// diverging. The absolute norm is used because the relative change
    /// saturates when the iterate itself blows up.
    fn update(&mut self, step: f64) -> bool {
        if self.recent.back().is_some_and(|&last| step > last) {
            self.growing += 1;
        } else {
            self.growing = 0;
        }
        self.recent.push_back(step);
        if self.recent.len() > STAGNATION_WINDOW + 1 {
            self.recent.pop_front();
        }
        self.growing >= STAGNATION_WINDOW && step >= STAGNATION_GROWTH * self.recent[0]
    }
}

struct Snapshot {
    q: Vec<f64>,
    edge: EdgeMap,
    guidance: Image,
    offset: Image,
    residual: f64,
}

fn check_inputs(patterns: &PatternStack, y: &MeasurementVector, cfg: &JigiConfig) -> Result<()> {
    cfg.validate()?;
    y.ensure_matches(patterns)
}

/// Runs the joint Landweber / guided-filter reconstruction.
pub fn reconstruct_jigi(
    patterns: &PatternStack,
    y: &MeasurementVector,
    cfg: &JigiConfig,
) -> Result<ReconstructionResult> {
    check_inputs(patterns, y, cfg)?;
    let op = build_operator(patterns, cfg.plir.omega, cfg.plir.rank_cutoff)?;
    jigi_with_operator(&op, patterns.rows(), patterns.cols(), y, cfg)
}

/// [`reconstruct_jigi`] with an already factored operator.
pub fn jigi_with_operator(
    op: &PlirOperator,
    rows: usize,
    cols: usize,
    y: &MeasurementVector,
    cfg: &JigiConfig,
) -> Result<ReconstructionResult> {
    cfg.validate()?;
    let mut prev = vec![0.0; op.unknowns()];
    let mut guidance: Option<Image> = None;
    let mut residuals = Vec::new();
    let mut best: Option<Snapshot> = None;
    let mut guard = StagnationGuard::default();
    let mut stop_reason = StopReason::MaxIterations;
    let mut current: Option<Snapshot> = None;

    for _ in 0..cfg.max_iterations {
        let x = plir_step(op, &prev, y, cfg.plir.clamp)?;
        let residual = op.residual_norm(&x, y.values());
        residuals.push(residual);

        let x_img = vector_to_image(&x, rows, cols)?;
        let guide = guidance.take().unwrap_or_else(|| x_img.clone());
        let out = guided_filter(&guide, &x_img, &cfg.filter)?;
        let q = out.q.into_pixels();
        let (step, change) = update_size(&q, &prev);

        let snap = Snapshot {
            q,
            edge: out.a,
            guidance: guide,
            offset: out.b,
            residual,
        };
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(Snapshot {
                q: snap.q.clone(),
                edge: snap.edge.clone(),
                guidance: snap.guidance.clone(),
                offset: snap.offset.clone(),
                residual,
            });
        }

        let stagnated = guard.update(step);
        prev.clone_from(&snap.q);
        guidance = Some(vector_to_image(&snap.q, rows, cols)?);
        current = Some(snap);

        if change < cfg.tolerance {
            stop_reason = StopReason::Converged;
            break;
        }
        if stagnated {
            stop_reason = StopReason::Stagnated;
            current = best.take();
            break;
        }
    }

    let last = current.expect("at least one iteration runs");
    let mut image = vector_to_image(&last.q, rows, cols)?;
    if cfg.plir.clamp {
        image = image.clamped();
    }
    Ok(ReconstructionResult {
        image,
        edge: last.edge,
        guidance: last.guidance,
        offset: last.offset,
        iterations_run: residuals.len(),
        residual_history: residuals,
        stop_reason,
    })
}

/// Landweber iteration alone, with the edge map taken from a single
/// self-guided filter pass over the final iterate.
pub fn reconstruct_plir_only(
    patterns: &PatternStack,
    y: &MeasurementVector,
    cfg: &JigiConfig,
) -> Result<ReconstructionResult> {
    check_inputs(patterns, y, cfg)?;
    let op = build_operator(patterns, cfg.plir.omega, cfg.plir.rank_cutoff)?;
    plir_only_with_operator(&op, patterns.rows(), patterns.cols(), y, cfg)
}

/// [`reconstruct_plir_only`] with an already factored operator.
pub fn plir_only_with_operator(
    op: &PlirOperator,
    rows: usize,
    cols: usize,
    y: &MeasurementVector,
    cfg: &JigiConfig,
) -> Result<ReconstructionResult> {
    cfg.validate()?;
    let mut prev = vec![0.0; op.unknowns()];
    let mut residuals = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut guard = StagnationGuard::default();

    for _ in 0..cfg.max_iterations {
        let x = plir_step(op, &prev, y, cfg.plir.clamp)?;
        let residual = op.residual_norm(&x, y.values());
        residuals.push(residual);
        let (step, change) = update_size(&x, &prev);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, x.clone()));
        }
        let stagnated = guard.update(step);
        prev = x;
        if change < cfg.tolerance {
            stop_reason = StopReason::Converged;
            break;
        }
        if stagnated {
            stop_reason = StopReason::Stagnated;
            prev = best.take().expect("best iterate recorded").1;
            break;
        }
    }

    let image = vector_to_image(&prev, rows, cols)?;
    let filtered = guided_filter(&image, &image, &cfg.filter)?;
    debug_assert_eq!(filtered.a, edge_response_selfguided(&image, &cfg.filter)?);
    Ok(ReconstructionResult {
        guidance: image.clone(),
        image,
        edge: filtered.a,
        offset: filtered.b,
        iterations_run: residuals.len(),
        residual_history: residuals,
        stop_reason,
    })
}
