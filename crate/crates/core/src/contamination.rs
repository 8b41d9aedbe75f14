//! Synthetic data: Gaussian and bounded sub-Gaussian reference samples and
//! three ways of planting outliers.
//!
//! * CUO: outliers at random positions, each `N(m, I)` with `m` uniform on
//!   `[0, uniform_high]^p` (a fresh `m` per outlier).
//! * GMC: outliers at random positions, all `N(shift_norm·u, I)` for one
//!   random unit vector `u`.
//! * CSE: the rows with the largest `|⟨xᵢ − x̄, v⟩|`, `v` the eigenvector of
//!   the smallest sample-covariance eigenvalue, are replaced by `√p·v`.
//!   Deterministic given the sample.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::DataSet;
use crate::error::{Result, SdrError};
use crate::linalg::{self, SymMatrix};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Cuo,
    Gmc,
    Cse,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Cuo => "CUO",
            Scheme::Gmc => "GMC",
            Scheme::Cse => "CSE",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = SdrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cuo" => Ok(Scheme::Cuo),
            "gmc" => Ok(Scheme::Gmc),
            "cse" => Ok(Scheme::Cse),
            other => Err(SdrError::invalid("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContaminationSpec {
    pub scheme: Scheme,
    /// Contamination rate in `[0, 1/2)`.
    pub eps: f64,
    /// Norm of the GMC outlier mean.
    pub shift_norm: f64,
    /// Upper end of the CUO mean coordinates.
    pub uniform_high: f64,
    pub seed: u64,
}

impl ContaminationSpec {
    pub fn new(scheme: Scheme, eps: f64, seed: u64) -> Result<Self> {
        let spec = ContaminationSpec {
            scheme,
            eps,
            shift_norm: 15.0,
            uniform_high: 3.0,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.eps) {
            return Err(SdrError::invalid("eps", format!("must lie in [0, 1/2), got {}", self.eps)));
        }
        if !(self.shift_norm >= 0.0 && self.shift_norm.is_finite()) {
            return Err(SdrError::invalid("shift_norm", format!("must be ≥ 0, got {}", self.shift_norm)));
        }
        if !(self.uniform_high >= 0.0 && self.uniform_high.is_finite()) {
            return Err(SdrError::invalid(
                "uniform_high",
                format!("must be ≥ 0, got {}", self.uniform_high),
            ));
        }
        Ok(())
    }
}

/// A sample with the ground truth needed to score estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub data: DataSet,
    pub inlier_mask: Vec<bool>,
    pub true_mean: DVector<f64>,
}

impl LabeledSample {
    pub fn clean(data: DataSet, true_mean: DVector<f64>) -> Self {
        let n = data.len();
        LabeledSample {
            data,
            inlier_mask: vec![true; n],
            true_mean,
        }
    }

    pub fn outliers(&self) -> usize {
        self.inlier_mask.iter().filter(|&&keep| !keep).count()
    }
}

/// `⌊n·ε⌋`, with a `1e-9` guard so that e.g. `100 × 0.29` counts 29.
pub fn outlier_count(n: usize, eps: f64) -> usize {
    (n as f64 * eps + 1e-9).floor() as usize
}

fn check_moments(n: usize, mu: &DVector<f64>, sigma: &SymMatrix) -> Result<()> {
    if n == 0 {
        return Err(SdrError::EmptySample);
    }
    if mu.len() != sigma.dim() {
        return Err(SdrError::DimensionMismatch {
            expected: sigma.dim(),
            found: mu.len(),
        });
    }
    Ok(())
}

fn covariance_root(sigma: &SymMatrix) -> Result<DMatrix<f64>> {
    let m = sigma.as_matrix();
    let diagonal = (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0));
    if diagonal {
        if let Some(&min_eigenvalue) = m.diagonal().iter().find(|&&d| d < 0.0 || !d.is_finite()) {
            return Err(SdrError::NotPositiveSemidefinite { min_eigenvalue });
        }
        return Ok(DMatrix::from_diagonal(&m.diagonal().map(f64::sqrt)));
    }
    linalg::psd_sqrt(sigma)
}

fn affine_sample(n: usize, mu: &DVector<f64>, sigma: &SymMatrix, mut draw: impl FnMut() -> f64) -> Result<DataSet> {
    check_moments(n, mu, sigma)?;
    let root = covariance_root(sigma)?;
    let p = mu.len();
    // point by point, coordinate by coordinate
    let noise = DMatrix::from_fn(p, n, |_, _| 0.0);
    let mut noise = noise;
    for value in noise.as_mut_slice() {
        *value = draw();
    }
    let mut points = root * noise;
    for mut col in points.column_iter_mut() {
        col += mu;
    }
    DataSet::from_columns(points)
}

/// `n` draws of `μ + Σ^{1/2} ζ`, `ζ ~ N(0, I)`.
pub fn sample_gaussian(n: usize, mu: &DVector<f64>, sigma: &SymMatrix, seed: u64) -> Result<DataSet> {
    let mut rng = stream_rng(seed, Stream::Inliers);
    affine_sample(n, mu, sigma, || rng.sample(StandardNormal))
}

/// Zero-mean, unit-variance bounded families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubGaussianFamily {
    /// ±1 with probability 1/2.
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    Uniform,
}

/// `n` draws of `μ + Σ^{1/2} ζ` with i.i.d. coordinates of `ζ` from `family`.
pub fn sample_subgaussian(
    n: usize,
    mu: &DVector<f64>,
    sigma: &SymMatrix,
    family: SubGaussianFamily,
    seed: u64,
) -> Result<DataSet> {
    let mut rng = stream_rng(seed, Stream::Inliers);
    let half_width = 3f64.sqrt();
    match family {
        SubGaussianFamily::Rademacher => {
            affine_sample(n, mu, sigma, || if rng.random::<bool>() { 1.0 } else { -1.0 })
        }
        SubGaussianFamily::Uniform => affine_sample(n, mu, sigma, || rng.random_range(-half_width..=half_width)),
    }
}

fn random_positions(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, Stream::Positions);
    let mut positions = rand::seq::index::sample(&mut rng, n, count).into_vec();
    positions.sort_unstable();
    positions
}

fn check_scheme(spec: &ContaminationSpec, expected: Scheme) -> Result<()> {
    spec.validate()?;
    if spec.scheme != expected {
        return Err(SdrError::invalid(
            "scheme",
            format!("expected {expected}, got {}", spec.scheme),
        ));
    }
    Ok(())
}

/// Uniform-mean Gaussian outliers at random positions.
pub fn contaminate_cuo(sample: &LabeledSample, spec: &ContaminationSpec) -> Result<LabeledSample> {
    check_scheme(spec, Scheme::Cuo)?;
    let n = sample.data.len();
    let positions = random_positions(n, outlier_count(n, spec.eps), spec.seed);
    let mut means = stream_rng(spec.seed, Stream::OutlierMeans);
    let mut noise = stream_rng(spec.seed, Stream::OutlierNoise);
    let mut out = sample.clone();
    for &i in &positions {
        for value in out.data.point_mut(i) {
            let center = means.random_range(0.0..=spec.uniform_high);
            let z: f64 = noise.sample(StandardNormal);
            *value = center + z;
        }
        out.inlier_mask[i] = false;
    }
    Ok(out)
}

/// Shifted Gaussian outliers `N(shift_norm·u, I)` at random positions.
pub fn contaminate_gmc(sample: &LabeledSample, spec: &ContaminationSpec) -> Result<LabeledSample> {
    check_scheme(spec, Scheme::Gmc)?;
    let n = sample.data.len();
    let p = sample.data.dim();
    let positions = random_positions(n, outlier_count(n, spec.eps), spec.seed);
    let mut direction_rng = stream_rng(spec.seed, Stream::Direction);
    let direction = loop {
        let v = DVector::<f64>::from_fn(p, |_, _| direction_rng.sample(StandardNormal));
        let norm = v.norm();
        if norm > 0.0 {
            break v / norm;
        }
    };
    let center = direction * spec.shift_norm;
    let mut noise = stream_rng(spec.seed, Stream::OutlierNoise);
    let mut out = sample.clone();
    for &i in &positions {
        for (value, c) in out.data.point_mut(i).iter_mut().zip(center.iter()) {
            let z: f64 = noise.sample(StandardNormal);
            *value = c + z;
        }
        out.inlier_mask[i] = false;
    }
    Ok(out)
}

/// Replaces the `⌊nε⌋` rows most aligned with the smallest-variance direction
/// `v` by `√p·v`. Ties in `|⟨xᵢ − x̄, v⟩|` go to the lower index.
pub fn contaminate_cse(sample: &LabeledSample, eps: f64) -> Result<LabeledSample> {
    if !(0.0..0.5).contains(&eps) {
        return Err(SdrError::invalid("eps", format!("must lie in [0, 1/2), got {eps}")));
    }
    let n = sample.data.len();
    let count = outlier_count(n, eps);
    let mut out = sample.clone();
    if count == 0 {
        return Ok(out);
    }
    let p = sample.data.dim();
    let mean = linalg::sample_mean(&sample.data);
    let cov = linalg::covariance_about(&sample.data, &mean, linalg::CovarianceNorm::Biased);
    let smallest = linalg::sym_eigendecomposition(&cov)?.bottom_columns(1).column(0).into_owned();

    let scores: Vec<f64> = sample
        .data
        .points()
        .map(|x| x.iter().zip(mean.iter()).zip(smallest.iter()).map(|((xi, m), v)| (xi - m) * v).sum::<f64>().abs())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let planted = smallest * (p as f64).sqrt();
    for &i in &order[..count] {
        out.data.point_mut(i).copy_from_slice(planted.as_slice());
        out.inlier_mask[i] = false;
    }
    Ok(out)
}

pub fn contaminate(sample: &LabeledSample, spec: &ContaminationSpec) -> Result<LabeledSample> {
    match spec.scheme {
        Scheme::Cuo => contaminate_cuo(sample, spec),
        Scheme::Gmc => contaminate_gmc(sample, spec),
        Scheme::Cse => {
            spec.validate()?;
            contaminate_cse(sample, spec.eps)
        }
    }
}

/// Clean `N(0, I_p)` sample of size `n` contaminated per `spec`, all draws
/// keyed by `spec.seed`.
pub fn standard_contaminated(n: usize, p: usize, spec: &ContaminationSpec) -> Result<LabeledSample> {
    let mu = DVector::zeros(p);
    let data = sample_gaussian(n, &mu, &SymMatrix::identity(p), spec.seed)?;
    contaminate(&LabeledSample::clean(data, mu), spec)
}
