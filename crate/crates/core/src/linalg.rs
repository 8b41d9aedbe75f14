//! Dense symmetric linear algebra shared by the estimators. Eigenvectors are
//! returned with a deterministic orientation.
//!
//! The eigensolver itself is nalgebra's Householder tridiagonalisation with
//! implicit QR sweeps. This module only fixes the conventions on top of it:
//! eigenvalues ascending, ties in the solver's original index order, and each
//! eigenvector oriented so that its largest-magnitude entry is positive.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::data::DataSet;
use crate::error::{Result, SdrError};

/// A real symmetric matrix. Symmetry is exact: the constructor replaces the
/// input by `(A + Aᵀ) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(SdrError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(SdrError::invalid("dim", "matrix must be at least 1×1"));
        }
        Ok(SymMatrix {
            m: symmetrize(m),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.len();
        for row in rows {
            if row.len() != q {
                return Err(SdrError::DimensionMismatch {
                    expected: q,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(q, q, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix { m: &self.m * factor }
    }

    /// `self − other`.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim() != other.dim() {
            return Err(SdrError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(SymMatrix { m: &self.m - &other.m })
    }

    /// `Bᵀ · self · B` for a `dim × k` matrix `B`.
    pub fn congruence(&self, basis: &DMatrix<f64>) -> SymMatrix {
        let projected = basis.transpose() * (&self.m * basis);
        SymMatrix {
            m: symmetrize(projected),
        }
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let q = m.nrows();
    DMatrix::from_fn(q, q, |i, j| {
        if i == j {
            m[(i, i)]
        } else {
            0.5 * (m[(i, j)] + m[(j, i)])
        }
    })
}

/// Eigenvalues in ascending order with their orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// λ₁ ≤ … ≤ λ_q.
    pub values: DVector<f64>,
    /// Column `j` pairs with `values[j]`.
    pub vectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvectors of the `k` smallest eigenvalues, as columns (`q × k`).
    pub fn bottom_columns(&self, k: usize) -> DMatrix<f64> {
        self.vectors.columns(0, k).into_owned()
    }

    /// Eigenvectors of all but the `k` smallest eigenvalues, as columns.
    pub fn top_columns(&self, k: usize) -> DMatrix<f64> {
        self.vectors.columns(k, self.dim() - k).into_owned()
    }
}

pub fn sample_mean(points: &DataSet) -> DVector<f64> {
    let cols = points.as_columns();
    let mut mean = DVector::zeros(points.dim());
    for point in points.points() {
        for (acc, v) in mean.iter_mut().zip(point) {
            *acc += v;
        }
    }
    mean / cols.ncols() as f64
}

/// Normalisation of the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceNorm {
    /// Divide by `m`.
    #[default]
    Biased,
    /// Divide by `m − 1` (falls back to `m` for a single point).
    Unbiased,
}

/// `(1/m) Σ (xᵢ − x̄)(xᵢ − x̄)ᵀ`.
pub fn sample_covariance(points: &DataSet) -> SymMatrix {
    sample_covariance_with(points, CovarianceNorm::Biased)
}

pub fn sample_covariance_with(points: &DataSet, norm: CovarianceNorm) -> SymMatrix {
    let mean = sample_mean(points);
    covariance_about(points, &mean, norm)
}

pub(crate) fn covariance_about(points: &DataSet, mean: &DVector<f64>, norm: CovarianceNorm) -> SymMatrix {
    let mut centered = points.as_columns().clone();
    for mut col in centered.column_iter_mut() {
        col -= mean;
    }
    let m = points.len();
    let denom = match norm {
        CovarianceNorm::Biased => m,
        CovarianceNorm::Unbiased => m.saturating_sub(1).max(1),
    } as f64;
    let scatter = &centered * centered.transpose();
    SymMatrix {
        m: symmetrize(scatter / denom),
    }
}

pub fn sym_eigendecomposition(m: &SymMatrix) -> Result<EigenSystem> {
    if !m.is_finite() {
        return Err(SdrError::NonFiniteMatrix);
    }
    let raw = SymmetricEigen::new(m.as_matrix().clone());
    let q = m.dim();
    let mut order: Vec<usize> = (0..q).collect();
    // stable: ties keep the solver's index order
    order.sort_by(|&a, &b| raw.eigenvalues[a].total_cmp(&raw.eigenvalues[b]));

    let values = DVector::from_iterator(q, order.iter().map(|&j| raw.eigenvalues[j]));
    let mut vectors = DMatrix::zeros(q, q);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = raw.eigenvectors.column(src).into_owned();
        orient(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(EigenSystem { values, vectors })
}

/// Flips `v` so that its largest-magnitude entry (first one on ties) is positive.
fn orient(v: &mut DVector<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// The `k` eigenvectors of smallest eigenvalues as the rows of a `k × q` matrix.
pub fn bottom_k_eigenvectors(m: &SymMatrix, k: usize) -> Result<DMatrix<f64>> {
    if k == 0 || k > m.dim() {
        return Err(SdrError::invalid(
            "k",
            format!("must lie in 1..={}, got {k}", m.dim()),
        ));
    }
    Ok(sym_eigendecomposition(m)?.bottom_columns(k).transpose())
}

/// `max(|λ_min|, |λ_max|)`.
pub fn operator_norm(m: &SymMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(SdrError::NonFiniteMatrix);
    }
    let values = m.as_matrix().clone().symmetric_eigenvalues();
    Ok(values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// `Tr(S) / ‖S‖_op` for a positive semidefinite `S`.
pub fn effective_rank(s: &SymMatrix) -> Result<f64> {
    let norm = operator_norm(s)?;
    if norm == 0.0 {
        return Err(SdrError::ZeroCovariance);
    }
    Ok(s.trace() / norm)
}

/// Symmetric square root `S^{1/2}` of a PSD matrix. Eigenvalues down to
/// `-1e-10·‖S‖_op` are treated as rounding and clamped to zero.
pub fn psd_sqrt(s: &SymMatrix) -> Result<DMatrix<f64>> {
    let eig = sym_eigendecomposition(s)?;
    let scale = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = eig.values[0];
    if min < -1e-10 * scale {
        return Err(SdrError::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    let roots = eig.values.map(|v| v.max(0.0).sqrt());
    let scaled = DMatrix::from_fn(s.dim(), s.dim(), |i, j| eig.vectors[(i, j)] * roots[j]);
    Ok(scaled * eig.vectors.transpose())
}
