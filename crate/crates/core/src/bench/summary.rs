use std::collections::BTreeMap;

use super::ResultRow;
use crate::error::{Result, SdrError};
use crate::io::format_float;

/// Type-7 quartiles of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    /// Type-7 quartiles of the finite values; NaN when there are none.
    pub fn of(values: &[f64]) -> Quartiles {
        let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.is_empty() {
            return Quartiles {
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
            };
        }
        Quartiles {
            q1: quantile_type7(&sorted, 0.25),
            median: quantile_type7(&sorted, 0.5),
            q3: quantile_type7(&sorted, 0.75),
        }
    }
}

/// Linear interpolation between order statistics: with `h = (N−1)·q`,
/// `x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋])`. `sorted` must be ascending
/// and non-empty.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per cell and estimator summary of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: String,
    pub n: usize,
    pub p: usize,
    pub eps: f64,
    pub estimator: String,
    pub trials: usize,
    /// Trials whose error is NaN.
    pub failures: usize,
    pub error: Quartiles,
    pub runtime_ms: Quartiles,
}

/// Groups rows by `(scheme, n, p, eps, estimator)`, sorted by that key.
pub fn aggregate_quantiles(rows: &[ResultRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(SdrError::EmptySample);
    }
    let mut groups: BTreeMap<(String, usize, usize, u64, String), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        // eps ≥ 0, so the bit pattern orders like the value
        let key = (row.scheme.clone(), row.n, row.p, row.eps.to_bits(), row.estimator.clone());
        groups.entry(key).or_default().push(row);
    }
    Ok(groups
        .into_iter()
        .map(|((scheme, n, p, eps_bits, estimator), members)| {
            let errors: Vec<f64> = members.iter().map(|r| r.l2_error).collect();
            let ok_runtimes: Vec<f64> = members
                .iter()
                .filter(|r| !r.l2_error.is_nan())
                .map(|r| r.runtime_ms)
                .collect();
            SummaryRow {
                scheme,
                n,
                p,
                eps: f64::from_bits(eps_bits),
                estimator,
                trials: members.len(),
                failures: errors.iter().filter(|e| e.is_nan()).count(),
                error: Quartiles::of(&errors),
                runtime_ms: Quartiles::of(&ok_runtimes),
            }
        })
        .collect())
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from(
        "scheme,n,p,eps,estimator,trials,failures,error_q1,error_median,error_q3,runtime_q1,runtime_median,runtime_q3\n",
    );
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.scheme,
            s.n,
            s.p,
            format_float(s.eps),
            s.estimator,
            s.trials,
            s.failures,
            format_float(s.error.q1),
            format_float(s.error.median),
            format_float(s.error.q3),
            format_float(s.runtime_ms.q1),
            format_float(s.runtime_ms.median),
            format_float(s.runtime_ms.q3),
        ));
    }
    out
}
