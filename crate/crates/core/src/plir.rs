//! Projected Landweber iteration.
//!
//! The update is `x_t = P(x_{t-1} + ω·(AᵀA)⁺Aᵀ·(y − A·x_{t-1}))` where `P`
//! clips every pixel into `[0, 1]`. Because `(AᵀA)⁺Aᵀ = A⁺`, the operator
//! never forms the `K × K` normal matrix: it keeps a thin SVD
//! `A = U·diag(σ)·Vᵀ` of the `M × K` sensing matrix and applies
//! `A⁺·r = V·diag(1/σ)·Uᵀ·r`.
//!
//! The thin SVD is computed through a Householder QR of whichever of `A` or
//! `Aᵀ` is tall, followed by an SVD of the small square triangular factor.
//! For the usual `M ≪ K` regime this costs `O(M²K)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::patterns::{MeasurementVector, PatternStack};

pub const DEFAULT_OMEGA: f64 = 1.5;
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;

/// Precomputed pseudo-inverse action of the sensing matrix plus the gain.
#[derive(Clone, Debug)]
pub struct PlirOperator {
    matrix: DMatrix<f64>,
    u: DMatrix<f64>,
    singular_values: DVector<f64>,
    v: DMatrix<f64>,
    omega: f64,
}

/// Thin SVD `(U, σ, V)` of `a`, singular values descending.
fn thin_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (m, k) = a.shape();
    let (u, s, v) = if m >= k {
        // A = Q·R, R = Ur·Σ·Wᵀ  =>  U = Q·Ur, V = W
        let qr = a.clone().qr();
        let q = qr.q();
        let svd = qr.r().svd(true, true);
        let u = q * svd.u.expect("u requested");
        let v = svd.v_t.expect("v_t requested").transpose();
        (u, svd.singular_values, v)
    } else {
        // Aᵀ = Q·R  =>  A = Rᵀ·Qᵀ, Rᵀ = Ur·Σ·Wᵀ  =>  U = Ur, V = Q·W
        let qr = a.transpose().qr();
        let q = qr.q();
        let svd = qr.r().transpose().svd(true, true);
        let u = svd.u.expect("u requested");
        let v = q * svd.v_t.expect("v_t requested").transpose();
        (u, svd.singular_values, v)
    };

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    let s = DVector::from_iterator(order.len(), order.iter().map(|&i| s[i]));
    (u, s, v)
}

/// Factors the sensing matrix of `patterns` and keeps singular values above
/// `rank_cutoff · σ₁`.
pub fn build_operator(
    patterns: &PatternStack,
    omega: f64,
    rank_cutoff: f64,
) -> Result<PlirOperator> {
    PlirOperator::from_matrix(patterns.flatten(), omega, rank_cutoff)
}

impl PlirOperator {
    pub fn from_matrix(matrix: DMatrix<f64>, omega: f64, rank_cutoff: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Parameter(format!(
                "gain omega must be positive, got {omega}"
            )));
        }
        if !(0.0..1.0).contains(&rank_cutoff) {
            return Err(Error::Parameter(format!(
                "rank cutoff must lie in [0, 1), got {rank_cutoff}"
            )));
        }
        if matrix.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateMatrix(
                "every pattern is identically zero".into(),
            ));
        }

        let (u, s, v) = thin_svd(&matrix);
        let threshold = rank_cutoff * s[0];
        let rank = s
            .iter()
            .take_while(|&&sv| sv > threshold && sv > 0.0)
            .count();
        if rank == 0 {
            return Err(Error::DegenerateMatrix(
                "no singular value above cutoff".into(),
            ));
        }
        Ok(PlirOperator {
            u: u.columns(0, rank).into_owned(),
            singular_values: s.rows(0, rank).into_owned(),
            v: v.columns(0, rank).into_owned(),
            matrix,
            omega,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The sensing matrix `A`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Retained singular values, descending.
    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn left_vectors(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn right_vectors(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Number of measurements `M`.
    pub fn measurements(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of unknowns `K`.
    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    /// `A·x`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect()
    }

    /// `A⁺·r = V·diag(1/σ)·Uᵀ·r`.
    pub fn pinv_apply(&self, r: &[f64]) -> Vec<f64> {
        let mut coeffs = self.u.tr_mul(&DVector::from_column_slice(r));
        coeffs.component_div_assign(&self.singular_values);
        (&self.v * coeffs).iter().copied().collect()
    }

    /// Dense `K × M` pseudo-inverse. Intended for verification only.
    pub fn pseudo_inverse(&self) -> DMatrix<f64> {
        let inv = self.singular_values.map(|s| 1.0 / s);
        &self.v * DMatrix::from_diagonal(&inv) * self.u.transpose()
    }

    /// `‖y − A·x‖₂`.
    pub fn residual_norm(&self, x: &[f64], y: &[f64]) -> f64 {
        self.forward(x)
            .iter()
            .zip(y)
            .map(|(ax, yi)| (yi - ax).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn check_dims(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.unknowns() {
            return Err(Error::shape(
                format!("iterate of length {}", self.unknowns()),
                format!("length {}", x.len()),
            ));
        }
        if y.len() != self.measurements() {
            return Err(Error::shape(
                format!("{} measurements", self.measurements()),
                format!("{}", y.len()),
            ));
        }
        Ok(())
    }
}

/// One Landweber update `x_prev + ω·A⁺·(y − A·x_prev)`, clipped into
/// `[0, 1]` when `clamp` is set.
pub fn plir_step(
    op: &PlirOperator,
    x_prev: &[f64],
    y: &MeasurementVector,
    clamp: bool,
) -> Result<Vec<f64>> {
    op.check_dims(x_prev, y.values())?;
    let residual: Vec<f64> = op
        .forward(x_prev)
        .iter()
        .zip(y.values())
        .map(|(ax, yi)| yi - ax)
        .collect();
    let update = op.pinv_apply(&residual);
    Ok(x_prev
        .iter()
        .zip(&update)
        .map(|(&x, &d)| {
            let next = x + op.omega * d;
            if clamp {
                next.clamp(0.0, 1.0)
            } else {
                next
            }
        })
        .collect())
}
