//! Robust estimation of a high-dimensional mean from adversarially
//! contaminated samples by iterative spectral dimension reduction (SDR).
//!
//! The estimator alternates a cheap geometric-median filter with a spectral
//! split of the filtered covariance, fixing the mean on the directions where
//! the sample looks clean and recursing on the rest. The crate also ships
//! baseline estimators and a seeded Monte-Carlo harness to compare them.
//!
//! ```
//! use nalgebra::DVector;
//! use sdr_core::{contamination, sdr_estimate, SdrConfig, SymMatrix};
//!
//! let p = 10;
//! let spec = contamination::ContaminationSpec::new(contamination::Scheme::Gmc, 0.2, 7).unwrap();
//! let sample = contamination::standard_contaminated(500, p, &spec).unwrap();
//! let (mu, trace) = sdr_estimate(&sample.data, &SymMatrix::identity(p), &SdrConfig::new(0.2, 0.1)).unwrap();
//! assert_eq!(trace.schedule.dims(), &[10, 4, 2, 1]);
//! assert!((mu - DVector::zeros(p)).norm() < 1.0);
//! ```

pub mod baselines;
pub mod bench;
pub mod contamination;
pub mod data;
pub mod error;
pub mod io;
pub mod linalg;
pub mod median;
pub mod rng;
pub mod schedule;
pub mod sdr;

pub use data::DataSet;
pub use error::{Result, SdrError};
pub use linalg::{EigenSystem, SymMatrix};
pub use median::WeiszfeldConfig;
pub use schedule::{dimension_schedule, DimensionSchedule, ThresholdParams};
pub use sdr::{
    sdr_estimate, sdr_estimate_approx, CovarianceMode, LastLevelRule, LevelTrace, RankSource, SdrConfig, SdrTrace,
};
