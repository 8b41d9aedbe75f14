//! Univariate and geometric medians.
//!
//! The geometric median is computed by Weiszfeld iterations started from the
//! coordinatewise median, with the Vardi–Zhang modification for iterates that
//! land on a data point. Points closer than `singularity_eps · scale` to the
//! iterate count as coinciding with it.

use nalgebra::DVector;

use crate::data::DataSet;
use crate::error::{Result, SdrError};

/// How the stopping tolerance of [`WeiszfeldConfig`] is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceUnit {
    /// `tol` is an absolute step length in data units.
    Absolute,
    /// `tol` is multiplied by the data diameter estimate `2·scale`.
    RelativeToDiameter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeiszfeldConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub tol_unit: ToleranceUnit,
    /// Distance clamp, relative to the data scale.
    pub singularity_eps: f64,
}

impl WeiszfeldConfig {
    /// Cheap location used inside the spectral estimator: 15 iterations,
    /// stop once a step is shorter than 1 (in normalised units).
    pub const fn rough() -> Self {
        WeiszfeldConfig {
            max_iter: 15,
            tol: 1.0,
            tol_unit: ToleranceUnit::Absolute,
            singularity_eps: 1e-12,
        }
    }

    /// Baseline estimator profile.
    pub const fn full_accuracy() -> Self {
        WeiszfeldConfig {
            max_iter: 500,
            tol: 1e-8,
            tol_unit: ToleranceUnit::RelativeToDiameter,
            singularity_eps: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(SdrError::invalid("max_iter", "must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SdrError::invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        if !(self.singularity_eps > 0.0 && self.singularity_eps.is_finite()) {
            return Err(SdrError::invalid(
                "singularity_eps",
                format!("must be positive, got {}", self.singularity_eps),
            ));
        }
        Ok(())
    }
}

impl Default for WeiszfeldConfig {
    fn default() -> Self {
        Self::full_accuracy()
    }
}

#[derive(Debug, Clone)]
pub struct GeometricMedian {
    pub point: DVector<f64>,
    /// Accepted Weiszfeld steps.
    pub iterations: usize,
    /// Objective `Σ‖xᵢ − m‖` at the start and after every accepted step,
    /// non-increasing up to a relative `1e-12`.
    pub objective: Vec<f64>,
}

/// Approximate minimiser of `Σᵢ ‖xᵢ − m‖₂`.
pub fn geometric_median(points: &DataSet, cfg: &WeiszfeldConfig) -> Result<DVector<f64>> {
    geometric_median_report(points, cfg).map(|r| r.point)
}

pub fn geometric_median_report(points: &DataSet, cfg: &WeiszfeldConfig) -> Result<GeometricMedian> {
    cfg.validate()?;
    points.ensure_finite()?;
    // Sums run in a canonical order so the result does not depend on how
    // the input happens to be ordered.
    let order = points.canonical_order();
    let dim = points.dim();

    let mut current = coordinatewise_median(points)?;
    let mut dists = distances(points, &order, &current);
    let mut objective = dists.iter().sum::<f64>();
    let mut history = vec![objective];

    let scale = robust_scale(&dists);
    if scale == 0.0 {
        // every point sits on the starting point
        return Ok(GeometricMedian {
            point: current,
            iterations: 0,
            objective: history,
        });
    }
    let floor = cfg.singularity_eps * scale;
    let tol = match cfg.tol_unit {
        ToleranceUnit::Absolute => cfg.tol,
        ToleranceUnit::RelativeToDiameter => cfg.tol * 2.0 * scale,
    };

    let mut iterations = 0;
    let mut next = DVector::zeros(dim);
    while iterations < cfg.max_iter {
        next.fill(0.0);
        let mut total_weight = 0.0;
        let mut coincident = 0usize;
        for (&i, &d) in order.iter().zip(&dists) {
            if d <= floor {
                coincident += 1;
                continue;
            }
            let w = 1.0 / d;
            total_weight += w;
            for (acc, x) in next.iter_mut().zip(points.point(i)) {
                *acc += w * x;
            }
        }
        if total_weight == 0.0 {
            break;
        }
        next /= total_weight;
        if coincident > 0 {
            // ‖Σ (xᵢ − m)/‖xᵢ − m‖‖ over the other points is total_weight·‖T − m‖
            let pull = total_weight * (&next - &current).norm();
            let eta = coincident as f64;
            if pull <= eta {
                // the data point is itself optimal
                break;
            }
            let keep = eta / pull;
            next *= 1.0 - keep;
            next.axpy(keep, &current, 1.0);
        }
        let next_dists = distances(points, &order, &next);
        let next_objective = next_dists.iter().sum::<f64>();
        // Weiszfeld steps never increase the objective in exact arithmetic;
        // near the optimum the objective is flat to rounding, so only a real
        // increase stops the iteration.
        if next_objective > objective * (1.0 + 1e-12) {
            break;
        }
        let step = (&next - &current).norm();
        std::mem::swap(&mut current, &mut next);
        dists = next_dists;
        objective = next_objective;
        history.push(objective);
        iterations += 1;
        if step < tol {
            break;
        }
    }

    Ok(GeometricMedian {
        point: current,
        iterations,
        objective: history,
    })
}

fn distances(points: &DataSet, order: &[usize], center: &DVector<f64>) -> Vec<f64> {
    order
        .iter()
        .map(|&i| {
            points
                .point(i)
                .iter()
                .zip(center.iter())
                .map(|(x, c)| (x - c) * (x - c))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Median distance to the starting point, or the largest one when more than
/// half of the points coincide with it.
fn robust_scale(dists: &[f64]) -> f64 {
    let mut sorted = dists.to_vec();
    let mid = (sorted.len() - 1) / 2;
    let (_, m, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if m > 0.0 {
        m
    } else {
        dists.iter().cloned().fold(0.0, f64::max)
    }
}

/// Lower median: the element of rank `⌈n/2⌉` (1-based) in sorted order.
pub fn univariate_median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(SdrError::EmptySample);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(SdrError::NonFiniteInput { index });
    }
    let mut buf = values.to_vec();
    Ok(lower_median_in_place(&mut buf))
}

pub(crate) fn lower_median_in_place(buf: &mut [f64]) -> f64 {
    let mid = (buf.len() - 1) / 2;
    *buf.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Average of the lower and upper medians. Unlike the lower median this
/// commutes with negation, `mid(−x) = −mid(x)`.
pub(crate) fn midpoint_median(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    let n = buf.len();
    let lo = lower_median_in_place(&mut buf);
    if n % 2 == 1 {
        return lo;
    }
    let hi = buf[n / 2..].iter().cloned().fold(f64::INFINITY, f64::min);
    0.5 * (lo + hi)
}

/// Lower median of every coordinate.
pub fn coordinatewise_median(points: &DataSet) -> Result<DVector<f64>> {
    points.ensure_finite()?;
    let cols = points.as_columns();
    let mut buf = Vec::with_capacity(points.len());
    Ok(DVector::from_iterator(
        points.dim(),
        (0..points.dim()).map(|j| {
            buf.clear();
            buf.extend(cols.row(j).iter());
            lower_median_in_place(&mut buf)
        }),
    ))
}
