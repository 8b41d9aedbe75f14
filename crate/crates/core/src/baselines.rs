//! Reference estimators: coordinatewise median, geometric median and the
//! oracle mean of the true inliers.

use nalgebra::DVector;

use crate::data::DataSet;
use crate::error::{Result, SdrError};
use crate::linalg;
use crate::median::{self, WeiszfeldConfig};

pub use crate::median::coordinatewise_median;

/// Geometric median at full accuracy.
pub fn geometric_median_estimator(x: &DataSet) -> Result<DVector<f64>> {
    median::geometric_median(x, &WeiszfeldConfig::full_accuracy())
}

/// Mean of the rows flagged `true` in `inlier_mask`.
pub fn oracle_mean(x: &DataSet, inlier_mask: &[bool]) -> Result<DVector<f64>> {
    if inlier_mask.len() != x.len() {
        return Err(SdrError::DimensionMismatch {
            expected: x.len(),
            found: inlier_mask.len(),
        });
    }
    let kept: Vec<usize> = inlier_mask
        .iter()
        .enumerate()
        .filter_map(|(i, &keep)| keep.then_some(i))
        .collect();
    if kept.is_empty() {
        return Err(SdrError::EmptySample);
    }
    Ok(linalg::sample_mean(&x.select(&kept)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn oracle_examples() {
        let x = DataSet::from_rows(&[[1.0, 2.0], [3.0, 6.0], [100.0, -100.0]]).unwrap();
        assert_eq!(oracle_mean(&x, &[true, true, true]).unwrap(), linalg::sample_mean(&x));
        assert_eq!(oracle_mean(&x, &[false, true, false]).unwrap().as_slice(), &[3.0, 6.0]);
        assert_eq!(oracle_mean(&x, &[true, true, false]).unwrap().as_slice(), &[2.0, 4.0]);
        assert!(matches!(oracle_mean(&x, &[false; 3]), Err(SdrError::EmptySample)));
        assert!(oracle_mean(&x, &[true]).is_err());
    }

    #[test]
    fn single_row_medians() {
        let x = DataSet::from_rows(&[[4.0, -1.0, 0.5]]).unwrap();
        assert_eq!(coordinatewise_median(&x).unwrap().as_slice(), &[4.0, -1.0, 0.5]);
        assert_eq!(geometric_median_estimator(&x).unwrap().as_slice(), &[4.0, -1.0, 0.5]);
    }

    #[test]
    fn one_dimensional_medians_agree() {
        let values = [3.0, -1.0, 8.5, 0.0, 2.0, 40.0, -7.0];
        let x = DataSet::from_rows(&values.iter().map(|v| [*v]).collect::<Vec<_>>()).unwrap();
        let uni = median::univariate_median(&values).unwrap();
        assert_eq!(coordinatewise_median(&x).unwrap()[0], uni);
        assert!((geometric_median_estimator(&x).unwrap()[0] - uni).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn coordinatewise_translation_and_permutation(
            rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 3), 1..30),
            shift in proptest::collection::vec(-1e3f64..1e3, 3),
        ) {
            let x = DataSet::from_rows(&rows).unwrap();
            let base = coordinatewise_median(&x).unwrap();
            let mut reversed = rows.clone();
            reversed.reverse();
            prop_assert_eq!(&coordinatewise_median(&DataSet::from_rows(&reversed).unwrap()).unwrap(), &base);
            let moved: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect();
            let got = coordinatewise_median(&DataSet::from_rows(&moved).unwrap()).unwrap();
            // medians select an element, so the shift is applied to the same element
            for j in 0..3 {
                prop_assert_eq!(got[j], base[j] + shift[j]);
            }
        }
    }
}
