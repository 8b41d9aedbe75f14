//! Dimension-reduction schedule and filtering thresholds.
//!
//! All thresholds are expressed for data normalised so that the (possibly
//! approximate) covariance has unit operator norm; the estimator performs
//! that normalisation itself.

use std::f64::consts::{E, SQRT_2};

use crate::error::{Result, SdrError};

/// Strictly decreasing dimensions `p₀ > p₁ > … > p_L = 1`, each the previous
/// one divided by `e`, rounded to the largest integer strictly below, plus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionSchedule {
    dims: Vec<usize>,
}

impl DimensionSchedule {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of reduction steps `L` (the last index).
    pub fn levels(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn initial_dim(&self) -> usize {
        self.dims[0]
    }

    /// `Σ_ℓ p_{ℓ−1}/p_ℓ`, the only way the schedule enters the error bound.
    pub fn cost(&self) -> f64 {
        self.dims
            .windows(2)
            .map(|w| w[0] as f64 / w[1] as f64)
            .sum()
    }
}

/// Largest integer strictly smaller than `x`.
fn floor_strict(x: f64) -> usize {
    (x.ceil() - 1.0).max(0.0) as usize
}

pub fn dimension_schedule(p: usize) -> Result<DimensionSchedule> {
    if p == 0 {
        return Err(SdrError::invalid("p", "dimension must be at least 1"));
    }
    let mut dims = vec![p];
    let mut current = p;
    while current > 1 {
        current = floor_strict(current as f64 / E) + 1;
        dims.push(current);
    }
    Ok(DimensionSchedule { dims })
}

/// Inputs shared by the threshold formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub eps_star: f64,
    pub delta: f64,
    pub n: usize,
    /// Rank entering the rate. The threshold functions document which
    /// notion of rank they expect.
    pub rank: f64,
    /// Sub-Gaussian variance proxy.
    pub variance_proxy: f64,
    /// Universal constant of the sub-Gaussian singular value bound.
    pub c0: f64,
    /// Relative accuracy of the approximate covariance.
    pub gamma: f64,
}

impl ThresholdParams {
    pub fn new(eps_star: f64, delta: f64, n: usize, rank: f64) -> Result<Self> {
        let params = ThresholdParams {
            eps_star,
            delta,
            n,
            rank,
            variance_proxy: 1.0,
            c0: SQRT_2,
            gamma: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_subgaussian(mut self, variance_proxy: f64, c0: f64) -> Result<Self> {
        self.variance_proxy = variance_proxy;
        self.c0 = c0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_star > 0.0 && self.eps_star < 0.5) {
            return Err(SdrError::invalid("eps_star", format!("must lie in (0, 1/2), got {}", self.eps_star)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(SdrError::invalid("delta", format!("must lie in (0, 1/2), got {}", self.delta)));
        }
        if self.n == 0 {
            return Err(SdrError::invalid("n", "sample size must be positive"));
        }
        if !(self.rank >= 1.0 && self.rank.is_finite()) {
            return Err(SdrError::invalid("rank", format!("must be a finite value ≥ 1, got {}", self.rank)));
        }
        if !(self.variance_proxy > 0.0 && self.variance_proxy.is_finite()) {
            return Err(SdrError::invalid(
                "variance_proxy",
                format!("must be positive, got {}", self.variance_proxy),
            ));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(SdrError::invalid("c0", format!("must be positive, got {}", self.c0)));
        }
        if !(0.0..=0.5).contains(&self.gamma) {
            return Err(SdrError::invalid("gamma", format!("must lie in [0, 1/2], got {}", self.gamma)));
        }
        Ok(())
    }
}

/// `(√rank + √(2 log(2/δ))) / √n`.
pub fn base_rate(n: usize, rank: f64, delta: f64) -> f64 {
    (rank.sqrt() + (2.0 * (2.0 / delta).ln()).sqrt()) / (n as f64).sqrt()
}

/// `min(1/4, r / √log₊(2/r))`; the second branch is +∞ once `r ≥ 2`.
pub fn tau(rate: f64) -> f64 {
    let log_plus = (2.0 / rate).ln().max(0.0);
    if log_plus == 0.0 {
        return 0.25;
    }
    (rate / log_plus.sqrt()).min(0.25)
}

fn contamination_factor(eps_star: f64) -> f64 {
    (3.0 - 2.0 * eps_star) / (1.0 - 2.0 * eps_star)
}

/// Threshold for Gaussian inliers with known covariance:
/// `(3−2ε*)/(1−2ε*) · (1 + r/√τ) + √(2 + 2 log(1/τ))`.
pub fn threshold_gaussian(params: &ThresholdParams) -> f64 {
    let rate = base_rate(params.n, params.rank, params.delta);
    let tau = tau(rate);
    contamination_factor(params.eps_star) * (1.0 + rate / tau.sqrt()) + (2.0 + 2.0 * (1.0 / tau).ln()).sqrt()
}

/// `3√𝔰 (√p + 2√log(2/δ)) / √n`, with `params.rank` holding the dimension `p`.
pub fn subgaussian_rate(params: &ThresholdParams) -> f64 {
    3.0 * params.variance_proxy.sqrt() * (params.rank.sqrt() + 2.0 * (2.0 / params.delta).ln().sqrt())
        / (params.n as f64).sqrt()
}

/// Threshold for sub-Gaussian inliers with variance proxy 𝔰:
/// `(3−2ε*)/(1−2ε*) · (1 + C₀ r √(𝔰/τ)) + C₀ 𝔰 √(2 + 2 log(1/τ))`.
pub fn threshold_subgaussian(params: &ThresholdParams) -> f64 {
    let rate = subgaussian_rate(params);
    let tau = tau(rate);
    let s = params.variance_proxy;
    contamination_factor(params.eps_star) * (1.0 + params.c0 * rate * (s / tau).sqrt())
        + params.c0 * s * (2.0 + 2.0 * (1.0 / tau).ln()).sqrt()
}

/// How the operator norm of the approximate covariance enters its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OpNormFactor {
    /// Multiply by `‖Σ̃‖_op`.
    #[default]
    Linear,
    /// Multiply by `‖Σ̃‖_op^{1/2}`, which scales like the data.
    Sqrt,
}

/// `C_γ = (1+γ)/(1−γ)`.
pub fn gamma_factor(gamma: f64) -> f64 {
    (1.0 + gamma) / (1.0 - gamma)
}

/// `(√(C_γ·rank) + √(2 log(2/δ))) / √n`.
pub fn approx_rate(params: &ThresholdParams) -> f64 {
    ((gamma_factor(params.gamma) * params.rank).sqrt() + (2.0 * (2.0 / params.delta).ln()).sqrt())
        / (params.n as f64).sqrt()
}

/// Threshold when only an approximation `Σ̃` with relative accuracy γ is known:
/// `‖Σ̃‖/(1−γ) · {(3−2ε*)/(1−2ε*) · (1 + r̃/√τ̃) + √(2 + log(2/τ̃))}`.
pub fn threshold_approx_cov(params: &ThresholdParams, sigma_tilde_opnorm: f64, norm_factor: OpNormFactor) -> Result<f64> {
    if !(params.gamma > 0.0 && params.gamma <= 0.5) {
        return Err(SdrError::invalid("gamma", format!("must lie in (0, 1/2], got {}", params.gamma)));
    }
    if !(sigma_tilde_opnorm > 0.0 && sigma_tilde_opnorm.is_finite()) {
        return Err(SdrError::invalid(
            "sigma_tilde_opnorm",
            format!("must be positive, got {sigma_tilde_opnorm}"),
        ));
    }
    let rate = approx_rate(params);
    let tau = tau(rate);
    let scale = match norm_factor {
        OpNormFactor::Linear => sigma_tilde_opnorm,
        OpNormFactor::Sqrt => sigma_tilde_opnorm.sqrt(),
    };
    let brace = contamination_factor(params.eps_star) * (1.0 + rate / tau.sqrt()) + (2.0 + (2.0 / tau).ln()).sqrt();
    Ok(scale / (1.0 - params.gamma) * brace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_examples() {
        assert_eq!(dimension_schedule(60).unwrap().dims(), &[60, 23, 9, 4, 2, 1]);
        assert_eq!(dimension_schedule(1).unwrap().dims(), &[1]);
        assert_eq!(dimension_schedule(1).unwrap().levels(), 0);
        let s = dimension_schedule(1000).unwrap();
        assert_eq!(s.dims(), &[1000, 368, 136, 51, 19, 7, 3, 2, 1]);
        assert_eq!(s.levels(), 8);
        assert!(dimension_schedule(0).is_err());
    }

    #[test]
    fn schedule_cost_is_near_optimal() {
        // F ≥ L·p^{1/L} ≥ e·ln p for any admissible sequence
        for p in [10usize, 60, 1000, 9999] {
            let s = dimension_schedule(p).unwrap();
            let lower = E * (p as f64).ln();
            assert!(s.cost() >= lower * 0.999 - 1e-9, "p={p}");
            assert!(s.cost() <= lower + 2.0 * E, "p={p} cost={}", s.cost());
        }
    }

    #[test]
    fn strict_floor() {
        assert_eq!(floor_strict(3.0), 2);
        assert_eq!(floor_strict(2.5), 2);
        assert_eq!(floor_strict(0.3), 0);
    }

    #[test]
    fn base_rate_examples() {
        let r = base_rate(1000, 60.0, 0.1);
        assert!((r - 0.322352).abs() < 2e-6);
        let delta = 2.0 / (E * E);
        assert!((base_rate(1, 1.0, delta) - 3.0).abs() < 1e-14);
        assert!((base_rate(4000, 60.0, 0.1) - r / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tau_examples() {
        assert!((tau(0.322352) - 0.238598).abs() < 1e-6);
        assert_eq!(tau(3.0), 0.25);
        assert_eq!(tau(2.0), 0.25);
        assert_eq!(tau(2.0 / E), 0.25);
    }

    #[test]
    fn params_validation() {
        assert!(ThresholdParams::new(0.5, 0.1, 10, 1.0).is_err());
        assert!(ThresholdParams::new(0.0, 0.1, 10, 1.0).is_err());
        assert!(ThresholdParams::new(0.1, 0.5, 10, 1.0).is_err());
        assert!(ThresholdParams::new(0.1, 0.1, 0, 1.0).is_err());
        assert!(ThresholdParams::new(0.1, 0.1, 10, 0.5).is_err());
        let ok = ThresholdParams::new(0.1, 0.1, 10, 1.0).unwrap();
        assert!(ok.with_gamma(0.6).is_err());
        assert!(ok.with_subgaussian(0.0, 1.0).is_err());
        assert!(ok.with_subgaussian(1.0, -1.0).is_err());
    }

    #[test]
    fn approx_requires_positive_gamma() {
        let p = ThresholdParams::new(0.1, 0.1, 100, 5.0).unwrap();
        assert!(threshold_approx_cov(&p, 1.0, OpNormFactor::Linear).is_err());
        let p = p.with_gamma(0.5).unwrap();
        assert_eq!(gamma_factor(0.5), 3.0);
        assert!(threshold_approx_cov(&p, 0.0, OpNormFactor::Linear).is_err());
        assert!(threshold_approx_cov(&p, 1.0, OpNormFactor::Linear).is_ok());
    }

    #[test]
    fn approx_scaling_variants() {
        let p = ThresholdParams::new(0.2, 0.1, 2000, 30.0).unwrap().with_gamma(0.25).unwrap();
        let one = threshold_approx_cov(&p, 1.0, OpNormFactor::Linear).unwrap();
        assert_eq!(one, threshold_approx_cov(&p, 1.0, OpNormFactor::Sqrt).unwrap());
        let lin = threshold_approx_cov(&p, 4.0, OpNormFactor::Linear).unwrap();
        let sq = threshold_approx_cov(&p, 4.0, OpNormFactor::Sqrt).unwrap();
        assert!((lin - 4.0 * one).abs() < 1e-12 * lin);
        assert!((sq - 2.0 * one).abs() < 1e-12 * sq);
    }
}
