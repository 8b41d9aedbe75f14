use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SdrError};

/// A sample of `n` points in `dim` dimensions.
///
/// Points are stored as the columns of a `dim × n` column-major matrix so
/// that every observation is a contiguous slice. Textual formats and the
/// public constructors use the usual "rows are observations" layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: DMatrix<f64>,
}

impl DataSet {
    /// Builds a data set from observation rows. All rows must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(SdrError::EmptySample)?;
        let dim = first.as_ref().len();
        if dim == 0 {
            return Err(SdrError::invalid("dim", "points must have at least one coordinate"));
        }
        let mut flat = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(SdrError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Ok(DataSet {
            points: DMatrix::from_vec(dim, rows.len(), flat),
        })
    }

    /// Wraps a `dim × n` matrix whose columns are the points.
    pub fn from_columns(points: DMatrix<f64>) -> Result<Self> {
        if points.ncols() == 0 {
            return Err(SdrError::EmptySample);
        }
        if points.nrows() == 0 {
            return Err(SdrError::invalid("dim", "points must have at least one coordinate"));
        }
        Ok(DataSet { points })
    }

    /// Builds from an `n × dim` matrix whose rows are the points.
    pub fn from_row_matrix(rows: &DMatrix<f64>) -> Result<Self> {
        Self::from_columns(rows.transpose())
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points.as_slice()[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.as_slice().chunks_exact(self.dim())
    }

    /// The `dim × n` column matrix.
    pub fn as_columns(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn into_columns(self) -> DMatrix<f64> {
        self.points
    }

    /// Row-major copy, one `Vec` per observation.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    pub fn point_vector(&self, i: usize) -> DVector<f64> {
        DVector::from_column_slice(self.point(i))
    }

    pub(crate) fn point_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.dim();
        &mut self.points.as_mut_slice()[i * d..(i + 1) * d]
    }

    /// Subsample keeping the given points, in the given order.
    pub fn select(&self, indices: &[usize]) -> DataSet {
        DataSet {
            points: self.points.select_columns(indices),
        }
    }

    /// Index of the first point holding a non-finite coordinate.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.points()
            .position(|p| p.iter().any(|v| !v.is_finite()))
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        match self.first_non_finite() {
            Some(index) => Err(SdrError::NonFiniteInput { index }),
            None => Ok(()),
        }
    }

    /// Point indices sorted lexicographically by coordinates (total order on
    /// `f64`), ties by index. Depends only on the multiset of points.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lexicographic(self.point(a), self.point(b)).then(a.cmp(&b)));
        order
    }
}

pub(crate) fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}
