//! Deterministic property checks shared by the integration tests and the
//! acceptance runner. Each check returns the worst deviation it saw.
#![allow(dead_code, clippy::excessive_precision)]

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sdr_core::contamination::{self, ContaminationSpec, Scheme};
use sdr_core::median::{geometric_median_report, WeiszfeldConfig};
use sdr_core::{sdr_estimate, DataSet, SdrConfig, SymMatrix};

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_rotation(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, p, p).qr().q()
}

/// Well-conditioned SPD matrix `AAᵀ/p + I/2`.
pub fn random_spd(rng: &mut ChaCha8Rng, p: usize) -> SymMatrix {
    let a = gaussian_matrix(rng, p, p);
    SymMatrix::new(&a * a.transpose() / p as f64 + DMatrix::identity(p, p) * 0.5).unwrap()
}

/// Gaussian sample with a random covariance and a handful of GMC outliers.
pub fn generic_instance(seed: u64, n: usize, p: usize) -> (DataSet, SymMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = random_spd(&mut rng, p);
    let mu = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let clean = contamination::sample_gaussian(n, &mu, &sigma, seed).unwrap();
    let sample = contamination::LabeledSample::clean(clean, mu);
    let spec = ContaminationSpec::new(Scheme::Gmc, 0.1, seed).unwrap();
    (contamination::contaminate(&sample, &spec).unwrap().data, sigma)
}

/// Worst relative deviation of `μ̂(aRx + b)` from `aRμ̂(x) + b` with `Σ ↦ a²RΣRᵀ`.
pub fn similarity_equivariance(instances: u64) -> f64 {
    let cfg = SdrConfig::new(0.1, 0.1);
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let p = if k % 2 == 0 { 5 } else { 12 };
        let (x, sigma) = generic_instance(1000 + k, 60, p);
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + k);
        let rot = random_rotation(&mut rng, p);
        let a: f64 = rng.random_range(0.2..5.0);
        let b = DVector::from_fn(p, |_, _| 10.0 * rng.sample::<f64, _>(StandardNormal));

        let (mu, _) = sdr_estimate(&x, &sigma, &cfg).unwrap();
        let mut moved = &rot * x.as_columns() * a;
        for mut col in moved.column_iter_mut() {
            col += &b;
        }
        let moved = DataSet::from_columns(moved).unwrap();
        let sigma_moved = SymMatrix::new(&rot * sigma.as_matrix() * rot.transpose() * (a * a)).unwrap();
        let (mu_moved, _) = sdr_estimate(&moved, &sigma_moved, &cfg).unwrap();

        let expected = &rot * &mu * a + &b;
        let rel = (&mu_moved - &expected).norm() / (1.0 + expected.norm());
        worst = worst.max(rel);
    }
    worst
}

/// Component orthogonality and span checks. Returns the worst
/// `|⟨cᵢ, cⱼ⟩|/(‖cᵢ‖‖cⱼ‖ + 1)`, the worst `‖QᵀQ − I‖_max` of the stacked lifted
/// blocks, the worst of `‖VᵀV − I‖_max` and `‖U U⊥ᵀ‖_max` over the recorded
/// bases, and the worst `‖μ̂ − Σ cᵢ‖`.
pub fn decomposition(instances: u64) -> (f64, f64, f64, f64) {
    let cfg = SdrConfig {
        record_bases: true,
        ..SdrConfig::new(0.1, 0.1)
    };
    let (mut ortho, mut span, mut basis_dev, mut sum_dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..instances {
        let p = [5, 12, 30][k as usize % 3];
        let (x, sigma) = generic_instance(2000 + k, 80, p);
        let (mu, trace) = sdr_estimate(&x, &sigma, &cfg).unwrap();

        let comps: Vec<&DVector<f64>> = trace.levels.iter().map(|l| &l.component).collect();
        for i in 0..comps.len() {
            for j in 0..i {
                let dot = comps[i].dot(comps[j]).abs();
                ortho = ortho.max(dot / (comps[i].norm() * comps[j].norm() + 1.0));
            }
        }
        let total = comps.iter().fold(DVector::zeros(p), |acc, c| acc + *c);
        sum_dev = sum_dev.max((&mu - total).norm());

        let mut blocks = Vec::new();
        for lvl in &trace.levels {
            let v = lvl.basis.as_ref().unwrap();
            let gram = v.transpose() * v - DMatrix::identity(v.ncols(), v.ncols());
            basis_dev = basis_dev.max(gram.amax());
            match &lvl.split {
                Some((u, rest)) => {
                    basis_dev = basis_dev.max((u * rest.transpose()).amax());
                    blocks.push(v * u.transpose())
                }
                None => blocks.push(v.clone()),
            }
        }
        let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
        assert_eq!(cols, p);
        let q = DMatrix::from_columns(
            &blocks
                .iter()
                .flat_map(|b| b.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        span = span.max((q.transpose() * &q - DMatrix::identity(p, p)).amax());
    }
    (ortho, span, basis_dev, sum_dev)
}

/// Number of instances where shuffling the rows changed any bit of μ̂.
pub fn permutation_mismatches(instances: u64) -> usize {
    let cfg = SdrConfig::new(0.1, 0.1);
    (0..instances)
        .filter(|&k| {
            let (x, sigma) = generic_instance(3000 + k, 70, 8);
            let mut rows = x.to_rows();
            rows.shuffle(&mut ChaCha8Rng::seed_from_u64(k));
            let y = DataSet::from_rows(&rows).unwrap();
            let a = sdr_estimate(&x, &sigma, &cfg).unwrap().0;
            let b = sdr_estimate(&y, &sigma, &cfg).unwrap().0;
            a.iter().zip(b.iter()).any(|(u, v)| u.to_bits() != v.to_bits())
        })
        .count()
}

/// Largest relative objective increase over the Weiszfeld histories.
pub fn weiszfeld_monotonicity(instances: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + k);
        let n = rng.random_range(3..200);
        let p = rng.random_range(1..20);
        let mut pts = gaussian_matrix(&mut rng, p, n);
        for j in 0..n / 5 {
            pts.column_mut(j).add_scalar_mut(30.0);
        }
        let data = DataSet::from_columns(pts).unwrap();
        for cfg in [WeiszfeldConfig::rough(), WeiszfeldConfig::full_accuracy()] {
            let report = geometric_median_report(&data, &cfg).unwrap();
            for w in report.objective.windows(2) {
                worst = worst.max((w[1] - w[0]) / w[0]);
            }
        }
    }
    worst
}

/// Worst relative error when every point equals the same vector.
pub fn zero_dispersion(instances: u64) -> f64 {
    let cfg = SdrConfig::new(0.2, 0.1);
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(6000 + k);
        let p = rng.random_range(1..25);
        let mu = DVector::from_fn(p, |_, _| 100.0 * rng.sample::<f64, _>(StandardNormal));
        let sigma = random_spd(&mut rng, p);
        let x = DataSet::from_columns(DMatrix::from_fn(p, 30, |i, _| mu[i])).unwrap();
        let (est, _) = sdr_estimate(&x, &sigma, &cfg).unwrap();
        worst = worst.max((est - &mu).norm() / mu.norm().max(f64::MIN_POSITIVE));
    }
    worst
}

/// `(name, computed, reference)` for the threshold quantities, references
/// from a 50-digit evaluation (`tests/oracles/thresholds_mpmath.py`).
pub fn golden_thresholds() -> Vec<(&'static str, f64, f64)> {
    use sdr_core::schedule::*;
    let p = |eps, n, rank, delta| ThresholdParams::new(eps, delta, n, rank).unwrap();
    let rate = base_rate(1000, 60.0, 0.1);
    vec![
        ("base_rate(1000, 60, 0.1)", rate, 0.32235352548241679713),
        ("tau(base_rate(1000, 60, 0.1))", tau(rate), 0.23860020702961247537),
        ("tau(0.322352)", tau(0.322352), 0.23859876858777331810),
        ("threshold_gaussian(0.1, 1000, 60, 0.1)", threshold_gaussian(&p(0.1, 1000, 60.0, 0.1)), 8.0156361695751666240),
        ("threshold_gaussian(0.4, 10000, 10, 0.05)", threshold_gaussian(&p(0.4, 10000, 10.0, 0.05)), 17.642923002646719816),
        ("threshold_gaussian(0.25, 1, 9, 0.1)", threshold_gaussian(&p(0.25, 1, 9.0, 0.1)), 61.662093840449979611),
        (
            "threshold_subgaussian(0.1, 1000, 60, 0.1, s=1, c0=√2)",
            threshold_subgaussian(&p(0.1, 1000, 60.0, 0.1).with_subgaussian(1.0, std::f64::consts::SQRT_2).unwrap()),
            17.115131600744255888,
        ),
        (
            "threshold_approx_cov(0.2, 2000, 30, 0.1, γ=0.25)",
            threshold_approx_cov(&p(0.2, 2000, 30.0, 0.1).with_gamma(0.25).unwrap(), 1.0, OpNormFactor::Linear).unwrap(),
            11.912156044760285463,
        ),
    ]
}

/// Schedule by brute force: the smallest `q` with `q·e ≥ previous`.
pub fn brute_force_schedule(p: usize) -> Vec<usize> {
    let mut dims = vec![p];
    while *dims.last().unwrap() > 1 {
        let prev = *dims.last().unwrap() as f64;
        let mut q = 1usize;
        while (q as f64) * std::f64::consts::E < prev {
            q += 1;
        }
        dims.push(q);
    }
    dims
}

/// Invariant violations of `dimension_schedule` over `1..=max_p`.
pub fn schedule_violations(max_p: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for p in 1..=max_p {
        let s = sdr_core::dimension_schedule(p).unwrap();
        let d = s.dims();
        if d != brute_force_schedule(p).as_slice() {
            bad.push(format!("p={p}: {d:?} differs from brute force"));
        }
        if d[0] != p || *d.last().unwrap() != 1 {
            bad.push(format!("p={p}: endpoints {d:?}"));
        }
        for w in d.windows(2) {
            if w[1] >= w[0] || w[0] as f64 / w[1] as f64 >= std::f64::consts::E {
                bad.push(format!("p={p}: step {} -> {}", w[0], w[1]));
            }
        }
        if s.levels() as f64 > 2.0 * (p as f64).ln() + 1e-12 {
            bad.push(format!("p={p}: {} levels", s.levels()));
        }
    }
    bad
}
