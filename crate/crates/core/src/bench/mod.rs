//! Monte-Carlo sweeps over a grid of `(n, p, ε)` cells.
//!
//! Each `(n, p, trial)` triple gets its own seed derived from the master seed,
//! so inliers are shared across contamination rates and results do not
//! depend on the number of worker threads. Rows come out in grid order:
//! `n`, then `p`, then `eps`, then trial, then estimator.

mod csv;
mod plot;
mod summary;

pub use self::csv::{read_results_csv, results_csv, write_results_csv, parse_results_csv, RESULT_HEADER};
pub use plot::{emit_plots, render_svg, PlotAxis};
pub use summary::{aggregate_quantiles, quantile_type7, summary_csv, Quartiles, SummaryRow};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::baselines;
use crate::contamination::{self, ContaminationSpec, LabeledSample};
use crate::error::{Result, SdrError};
use crate::linalg::SymMatrix;
use crate::rng::derive_seed;
use crate::sdr::{self, SdrConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    Sdr,
    Cm,
    Gm,
    Oracle,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Sdr => "SDR",
            Estimator::Cm => "CM",
            Estimator::Gm => "GM",
            Estimator::Oracle => "ORACLE",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = SdrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sdr" => Ok(Estimator::Sdr),
            "cm" => Ok(Estimator::Cm),
            "gm" => Ok(Estimator::Gm),
            "oracle" => Ok(Estimator::Oracle),
            other => Err(SdrError::invalid("estimator", format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub estimators: Vec<Estimator>,
    /// Scheme and its parameters; `eps` and `seed` are set per cell.
    pub scheme: ContaminationSpec,
    pub ns: Vec<usize>,
    pub ps: Vec<usize>,
    pub eps: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub sdr_cfg: SdrConfig,
    /// Fixed `ε*`; by default each cell uses its own `eps` (and
    /// `sdr_cfg.eps_star` when `eps = 0`).
    pub eps_star: Option<f64>,
    /// Record wall times. With timing off `runtime_ms` is 0 and the output is
    /// byte-for-byte reproducible.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(scheme: ContaminationSpec, ns: Vec<usize>, ps: Vec<usize>, eps: Vec<f64>) -> Self {
        ExperimentSpec {
            estimators: vec![Estimator::Sdr, Estimator::Cm, Estimator::Gm, Estimator::Oracle],
            scheme,
            ns,
            ps,
            eps,
            trials: 50,
            master_seed: 0,
            sdr_cfg: SdrConfig::new(0.1, 0.1),
            eps_star: None,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.estimators.is_empty() {
            return Err(SdrError::invalid("estimators", "at least one estimator is required"));
        }
        if self.ns.is_empty() || self.ps.is_empty() || self.eps.is_empty() {
            return Err(SdrError::invalid("grid", "n, p and eps lists must be non-empty"));
        }
        if self.trials == 0 {
            return Err(SdrError::invalid("trials", "must be at least 1"));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(SdrError::invalid("n", format!("sample sizes must be ≥ 2, got {n}")));
        }
        if self.ps.contains(&0) {
            return Err(SdrError::invalid("p", "dimensions must be ≥ 1"));
        }
        for &eps in &self.eps {
            ContaminationSpec { eps, ..self.scheme }.validate()?;
        }
        self.sdr_cfg.validate()?;
        if let Some(e) = self.eps_star {
            SdrConfig { eps_star: e, ..self.sdr_cfg.clone() }.validate()?;
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let mut cells = Vec::with_capacity(self.ns.len() * self.ps.len() * self.eps.len());
        for &n in &self.ns {
            for &p in &self.ps {
                for &eps in &self.eps {
                    cells.push((n, p, eps));
                }
            }
        }
        cells
    }
}

/// One estimator on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: String,
    pub n: usize,
    pub p: usize,
    pub eps: f64,
    pub trial: usize,
    pub seed: u64,
    pub estimator: String,
    /// `‖μ̂ − μ*‖₂`; NaN when the estimator failed.
    pub l2_error: f64,
    pub runtime_ms: f64,
}

/// Seed of trial `trial` of the cell with sample size `n` and dimension `p`.
pub fn trial_seed(master: u64, n: usize, p: usize, trial: usize) -> u64 {
    derive_seed(master, &[n as u64, p as u64, trial as u64])
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let jobs: Vec<((usize, usize, f64), usize)> = spec
        .cells()
        .into_iter()
        .flat_map(|cell| (0..spec.trials).map(move |t| (cell, t)))
        .collect();
    let per_job: Vec<Result<Vec<ResultRow>>> = jobs
        .par_iter()
        .map(|&((n, p, eps), trial)| run_trial(spec, n, p, eps, trial))
        .collect();
    let mut rows = Vec::with_capacity(jobs.len() * spec.estimators.len());
    for job in per_job {
        rows.extend(job?);
    }
    Ok(rows)
}

fn run_trial(spec: &ExperimentSpec, n: usize, p: usize, eps: f64, trial: usize) -> Result<Vec<ResultRow>> {
    let seed = trial_seed(spec.master_seed, n, p, trial);
    let cspec = ContaminationSpec { eps, seed, ..spec.scheme };
    let sample = contamination::standard_contaminated(n, p, &cspec)?;
    let eps_star = spec
        .eps_star
        .unwrap_or(if eps > 0.0 { eps } else { spec.sdr_cfg.eps_star });
    let cfg = SdrConfig { eps_star, ..spec.sdr_cfg.clone() };
    let sigma = SymMatrix::identity(p);

    Ok(spec
        .estimators
        .iter()
        .map(|&est| {
            let start = Instant::now();
            let estimate = run_estimator(est, &sample, &sigma, &cfg);
            let elapsed = start.elapsed();
            ResultRow {
                scheme: spec.scheme.scheme.to_string(),
                n,
                p,
                eps,
                trial,
                seed,
                estimator: est.to_string(),
                l2_error: estimate
                    .map(|mu| (mu - &sample.true_mean).norm())
                    .unwrap_or(f64::NAN),
                runtime_ms: if spec.timing { elapsed.as_secs_f64() * 1e3 } else { 0.0 },
            }
        })
        .collect())
}

fn run_estimator(est: Estimator, sample: &LabeledSample, sigma: &SymMatrix, cfg: &SdrConfig) -> Result<DVector<f64>> {
    match est {
        Estimator::Sdr => sdr::sdr_estimate(&sample.data, sigma, cfg).map(|(mu, _)| mu),
        Estimator::Cm => baselines::coordinatewise_median(&sample.data),
        Estimator::Gm => baselines::geometric_median_estimator(&sample.data),
        Estimator::Oracle => baselines::oracle_mean(&sample.data, &sample.inlier_mask),
    }
}
