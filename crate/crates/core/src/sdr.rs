//! Iterative spectral dimension reduction (SDR).
//!
//! At level `ℓ` the data live in a `p_ℓ`-dimensional coordinate system
//! `V_ℓᵀ X`. A rough geometric median locates the bulk, points farther than
//! `t·√p_ℓ` are dropped, and the spectrum of `V_ℓᵀ(Σ̂ − Σ)V_ℓ` on the kept
//! points splits the space: on the `p_ℓ − p_{ℓ+1}` directions of smallest
//! excess variance the filtered mean is trusted, the remaining directions are
//! handed to the next level. The last level is one-dimensional and uses a
//! median. The estimate is the sum of the per-level components, which are
//! mutually orthogonal and together span `ℝ^p`.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::data::DataSet;
use crate::error::{Result, SdrError};
use crate::linalg::{self, CovarianceNorm, SymMatrix};
use crate::median::{self, WeiszfeldConfig};
use crate::schedule::{self, DimensionSchedule, OpNormFactor, ThresholdParams};

/// What is known about the inlier covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceMode {
    /// Gaussian inliers with known covariance.
    GaussianKnown,
    /// Gaussian inliers; the given matrix is within relative accuracy γ.
    Approximate { gamma: f64 },
    /// Sub-Gaussian inliers with the given variance proxy and constant `C₀`.
    SubGaussian { variance_proxy: f64, c0: f64 },
}

/// Estimator used on the final one-dimensional subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LastLevelRule {
    /// Median of the projected points.
    #[default]
    Median,
    /// Mean of the projected points within `t` of their median.
    FilteredMean,
}

/// Rank entering the threshold in the known/approximate covariance modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankSource {
    #[default]
    EffectiveRank,
    Dimension,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdrConfig {
    /// Upper bound on the contamination rate, in (0, 1/2).
    pub eps_star: f64,
    /// Failure probability, in (0, 1/2).
    pub delta: f64,
    pub mode: CovarianceMode,
    /// Replaces the computed threshold (normalised units).
    pub threshold_override: Option<f64>,
    pub rough_gm: WeiszfeldConfig,
    pub last_level_rule: LastLevelRule,
    pub rank_source: RankSource,
    /// Keep `V_ℓ` and `U_ℓ` in the trace.
    pub record_bases: bool,
}

impl SdrConfig {
    pub fn new(eps_star: f64, delta: f64) -> Self {
        SdrConfig {
            eps_star,
            delta,
            mode: CovarianceMode::GaussianKnown,
            threshold_override: None,
            rough_gm: WeiszfeldConfig::rough(),
            last_level_rule: LastLevelRule::Median,
            rank_source: RankSource::EffectiveRank,
            record_bases: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ThresholdParams::new(self.eps_star, self.delta, 1, 1.0)?;
        match self.mode {
            CovarianceMode::GaussianKnown => {}
            CovarianceMode::Approximate { gamma } => {
                if !(gamma > 0.0 && gamma <= 0.5) {
                    return Err(SdrError::invalid("gamma", format!("must lie in (0, 1/2], got {gamma}")));
                }
            }
            CovarianceMode::SubGaussian { variance_proxy, c0 } => {
                ThresholdParams::new(self.eps_star, self.delta, 1, 1.0)?.with_subgaussian(variance_proxy, c0)?;
            }
        }
        if let Some(t) = self.threshold_override {
            if !(t > 0.0 && t.is_finite()) {
                return Err(SdrError::invalid("threshold", format!("must be positive, got {t}")));
            }
        }
        self.rough_gm.validate()
    }
}

impl Default for SdrConfig {
    fn default() -> Self {
        SdrConfig::new(0.1, 0.1)
    }
}

/// Diagnostics for one level of the recursion.
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub level: usize,
    /// `p_ℓ`.
    pub dim: usize,
    /// `|S^(ℓ)|`; `None` on a median-only last level.
    pub filtered: Option<usize>,
    /// `p_ℓ − p_{ℓ+1}` (1 on the last level).
    pub kept_dim: usize,
    /// The kept smallest eigenvalues of `V_ℓᵀ(Σ̂ − Σ)V_ℓ`, normalised units.
    pub eigenvalues: Vec<f64>,
    /// `μ̂^(ℓ)` in the original units.
    pub component: DVector<f64>,
    pub component_norm: f64,
    pub gm_iterations: usize,
    /// `V_ℓ` (`p × p_ℓ`), when bases are recorded.
    pub basis: Option<DMatrix<f64>>,
    /// `U_ℓ` (`(p_ℓ − p_{ℓ+1}) × p_ℓ`) and `U_ℓ^⊥` (`p_{ℓ+1} × p_ℓ`), when
    /// bases are recorded and `ℓ < L`.
    pub split: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

#[derive(Debug, Clone)]
pub struct SdrTrace {
    pub schedule: DimensionSchedule,
    /// Threshold `t` in normalised units.
    pub threshold: f64,
    /// Rate and τ behind the threshold; `None` when overridden.
    pub rate: Option<f64>,
    pub tau: Option<f64>,
    /// Rank used in the threshold.
    pub rank: f64,
    /// `‖Σ‖_op` divided out before estimation.
    pub scale: f64,
    pub levels: Vec<LevelTrace>,
    pub wall_time: Duration,
}

/// SDR estimate of the inlier mean of `x` (`n` points in `ℝ^p`) given the
/// inlier covariance `sigma`.
pub fn sdr_estimate(x: &DataSet, sigma: &SymMatrix, cfg: &SdrConfig) -> Result<(DVector<f64>, SdrTrace)> {
    let start = Instant::now();
    cfg.validate()?;
    let n = x.len();
    let p = x.dim();
    if n < 2 {
        return Err(SdrError::invalid("n", format!("need at least 2 points, got {n}")));
    }
    if sigma.dim() != p {
        return Err(SdrError::DimensionMismatch {
            expected: p,
            found: sigma.dim(),
        });
    }
    x.ensure_finite()?;
    if !sigma.is_finite() {
        return Err(SdrError::NonFiniteMatrix);
    }

    let spectrum = sigma.as_matrix().clone().symmetric_eigenvalues();
    let scale = spectrum.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Err(SdrError::ZeroCovariance);
    }
    let min_eigenvalue = spectrum.min();
    if min_eigenvalue < -1e-10 * scale {
        return Err(SdrError::NotPositiveSemidefinite { min_eigenvalue });
    }
    // data divided by ‖Σ‖^{1/2}, covariance by ‖Σ‖: unit operator norm
    let root = scale.sqrt();
    let sigma = sigma.scaled(1.0 / scale);
    // Tr(Σ)/‖Σ‖_op, clamped against rounding just below 1
    let effective_rank = sigma.trace().max(1.0);

    let (threshold, rate, tau, rank) = resolve_threshold(cfg, n, p, effective_rank)?;
    let schedule = schedule::dimension_schedule(p)?;

    // canonical point order: identical output for any permutation of the rows
    let order = x.canonical_order();
    let mut projected = x.as_columns().select_columns(&order);
    projected /= root;
    let mut projected = DataSet::from_columns(projected)?;
    let mut sigma_level = sigma;
    let mut basis: Option<DMatrix<f64>> = None;
    let mut levels = Vec::with_capacity(schedule.dims().len());

    let lift = |basis: &Option<DMatrix<f64>>, local: DVector<f64>| -> DVector<f64> {
        let v = match basis {
            Some(b) => b * local,
            None => local,
        };
        v * root
    };

    for (level, pair) in schedule.dims().windows(2).enumerate() {
        let (dim, next_dim) = (pair[0], pair[1]);
        let kept_dim = dim - next_dim;

        let gm = median::geometric_median_report(&projected, &cfg.rough_gm)?;
        let kept = filter_indices(&projected, gm.point.as_slice(), threshold * (dim as f64).sqrt());
        if kept.is_empty() {
            return Err(SdrError::AllFilteredOut { level, threshold });
        }
        let filtered = projected.select(&kept);
        let mean = linalg::sample_mean(&filtered);
        let cov = linalg::covariance_about(&filtered, &mean, CovarianceNorm::Biased);
        let excess = cov.sub(&sigma_level)?;
        let eig = linalg::sym_eigendecomposition(&excess)?;

        let low = eig.bottom_columns(kept_dim);
        let high = eig.top_columns(kept_dim);
        let local = &low * (low.transpose() * &mean);
        let component = lift(&basis, local);

        let (basis_record, split_record) = if cfg.record_bases {
            (
                Some(basis.clone().unwrap_or_else(|| DMatrix::identity(p, p))),
                Some((low.transpose(), high.transpose())),
            )
        } else {
            (None, None)
        };
        levels.push(LevelTrace {
            level,
            dim,
            filtered: Some(kept.len()),
            kept_dim,
            eigenvalues: eig.values.as_slice()[..kept_dim].to_vec(),
            component_norm: component.norm(),
            component,
            gm_iterations: gm.iterations,
            basis: basis_record,
            split: split_record,
        });

        projected = DataSet::from_columns(high.transpose() * projected.as_columns())?;
        sigma_level = sigma_level.congruence(&high);
        basis = Some(match basis {
            Some(b) => b * high,
            None => high,
        });
    }

    let last = last_level(&projected, threshold, cfg.last_level_rule, schedule.levels())?;
    let component = lift(&basis, DVector::from_element(1, last.value));
    levels.push(LevelTrace {
        level: schedule.levels(),
        dim: 1,
        filtered: last.filtered,
        kept_dim: 1,
        eigenvalues: Vec::new(),
        component_norm: component.norm(),
        component,
        gm_iterations: 0,
        basis: cfg
            .record_bases
            .then(|| basis.clone().unwrap_or_else(|| DMatrix::identity(p, p))),
        split: None,
    });

    let mut estimate = DVector::zeros(p);
    for lvl in &levels {
        estimate += &lvl.component;
    }

    let trace = SdrTrace {
        schedule,
        threshold,
        rate,
        tau,
        rank,
        scale,
        levels,
        wall_time: start.elapsed(),
    };
    Ok((estimate, trace))
}

/// [`sdr_estimate`] with an approximate covariance `sigma_tilde` satisfying
/// `‖Σ^{-1/2} Σ̃ Σ^{-1/2} − I‖_op ≤ γ`.
pub fn sdr_estimate_approx(
    x: &DataSet,
    sigma_tilde: &SymMatrix,
    gamma: f64,
    cfg: &SdrConfig,
) -> Result<(DVector<f64>, SdrTrace)> {
    let cfg = SdrConfig {
        mode: CovarianceMode::Approximate { gamma },
        ..cfg.clone()
    };
    sdr_estimate(x, sigma_tilde, &cfg)
}

fn resolve_threshold(
    cfg: &SdrConfig,
    n: usize,
    p: usize,
    effective_rank: f64,
) -> Result<(f64, Option<f64>, Option<f64>, f64)> {
    let rank = match (cfg.mode, cfg.rank_source) {
        (CovarianceMode::SubGaussian { .. }, _) | (_, RankSource::Dimension) => p as f64,
        (_, RankSource::EffectiveRank) => effective_rank,
    };
    let params = ThresholdParams::new(cfg.eps_star, cfg.delta, n, rank)?;
    let (t, rate) = match cfg.mode {
        CovarianceMode::GaussianKnown => (
            schedule::threshold_gaussian(&params),
            schedule::base_rate(n, rank, cfg.delta),
        ),
        CovarianceMode::SubGaussian { variance_proxy, c0 } => {
            let params = params.with_subgaussian(variance_proxy, c0)?;
            (schedule::threshold_subgaussian(&params), schedule::subgaussian_rate(&params))
        }
        CovarianceMode::Approximate { gamma } => {
            let params = params.with_gamma(gamma)?;
            // after normalisation ‖Σ̃‖_op = 1, so both norm factors agree
            (
                schedule::threshold_approx_cov(&params, 1.0, OpNormFactor::Linear)?,
                schedule::approx_rate(&params),
            )
        }
    };
    Ok(match cfg.threshold_override {
        Some(over) => (over, None, None, rank),
        None => (t, Some(rate), Some(schedule::tau(rate)), rank),
    })
}

struct LastLevel {
    value: f64,
    filtered: Option<usize>,
}

fn last_level(projected: &DataSet, threshold: f64, rule: LastLevelRule, level: usize) -> Result<LastLevel> {
    let values = projected.as_columns().row(0).iter().copied().collect::<Vec<_>>();
    // the midpoint median commutes with flipping the direction's sign
    let center = median::midpoint_median(&values);
    match rule {
        LastLevelRule::Median => Ok(LastLevel {
            value: center,
            filtered: None,
        }),
        LastLevelRule::FilteredMean => {
            let kept: Vec<f64> = values.into_iter().filter(|v| (v - center).abs() <= threshold).collect();
            if kept.is_empty() {
                return Err(SdrError::AllFilteredOut { level, threshold });
            }
            Ok(LastLevel {
                value: kept.iter().sum::<f64>() / kept.len() as f64,
                filtered: Some(kept.len()),
            })
        }
    }
}

/// Indices of the points within the closed ball of the given radius.
pub fn filter_indices(projected: &DataSet, center: &[f64], radius: f64) -> Vec<usize> {
    projected
        .points()
        .enumerate()
        .filter(|(_, point)| {
            let d2: f64 = point.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
            d2.sqrt() <= radius
        })
        .map(|(i, _)| i)
        .collect()
}
