use std::fs;
use std::path::PathBuf;

use sdr_core::bench::*;
use sdr_core::contamination::{self, ContaminationSpec, Scheme};
use sdr_core::linalg::sample_mean;

fn spec(scheme: Scheme, eps: Vec<f64>) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(ContaminationSpec::new(scheme, 0.0, 0).unwrap(), vec![60, 120], vec![3, 5], eps);
    s.trials = 4;
    s.master_seed = 99;
    s.timing = false;
    s
}

#[test]
fn oracle_on_clean_data_is_the_sample_mean() {
    let mut s = spec(Scheme::Gmc, vec![0.0]);
    s.ns = vec![50];
    s.ps = vec![4];
    s.trials = 1;
    s.estimators = vec![Estimator::Oracle];
    let rows = run_experiment(&s).unwrap();
    assert_eq!(rows.len(), 1);
    let cspec = ContaminationSpec::new(Scheme::Gmc, 0.0, rows[0].seed).unwrap();
    let sample = contamination::standard_contaminated(50, 4, &cspec).unwrap();
    let direct = sample_mean(&sample.data).norm();
    assert!((rows[0].l2_error - direct).abs() <= 1e-15 * direct.max(1.0));
}

#[test]
fn reruns_produce_identical_bytes() {
    let s = spec(Scheme::Cuo, vec![0.1, 0.3]);
    let a = results_csv(&run_experiment(&s).unwrap());
    let b = results_csv(&run_experiment(&s).unwrap());
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| results_csv(&run_experiment(&s).unwrap()));
    assert_eq!(a, c);
}

#[test]
fn every_cell_appears_trials_times_estimators() {
    let s = spec(Scheme::Cse, vec![0.1, 0.2]);
    let rows = run_experiment(&s).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * s.trials * s.estimators.len());
    let summary = aggregate_quantiles(&rows).unwrap();
    assert_eq!(summary.len(), 2 * 2 * 2 * s.estimators.len());
    assert!(summary.iter().all(|r| r.trials == s.trials));
}

#[test]
fn csv_round_trips() {
    let rows = run_experiment(&spec(Scheme::Gmc, vec![0.2])).unwrap();
    let text = results_csv(&rows);
    assert!(text.starts_with(&format!("{}\n", RESULT_HEADER.join(","))));
    let back = parse_results_csv(text.as_bytes()).unwrap();
    assert_eq!(back, rows);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    fs::write(&path, &text).unwrap();
    assert_eq!(read_results_csv(&path).unwrap(), rows);
}

#[test]
fn inliers_are_shared_across_contamination_rates() {
    let s = spec(Scheme::Gmc, vec![0.1, 0.2]);
    let rows = run_experiment(&s).unwrap();
    let seeds = |eps: f64| rows.iter().filter(|r| r.eps == eps).map(|r| r.seed).collect::<Vec<_>>();
    assert_eq!(seeds(0.1), seeds(0.2));
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/error_vs_n.svg")
}

#[test]
fn plot_matches_golden_snapshot() {
    let rows: Vec<ResultRow> = (0..3)
        .flat_map(|k| {
            [100usize, 1000, 10_000].into_iter().flat_map(move |n| {
                [("SDR", 0.5), ("GM", 1.5)].into_iter().map(move |(est, scale)| ResultRow {
                    scheme: "GMC".into(),
                    n,
                    p: 10,
                    eps: 0.1,
                    trial: k,
                    seed: k as u64,
                    estimator: est.into(),
                    l2_error: scale * (1.0 + 0.1 * k as f64) * (1000.0 / n as f64).sqrt(),
                    runtime_ms: 0.0,
                })
            })
        })
        .collect();
    let summary = aggregate_quantiles(&rows).unwrap();
    let svg = render_svg(&summary, PlotAxis::N).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    let path = golden_path();
    if std::env::var_os("SDR_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &svg).unwrap();
    }
    let golden = fs::read_to_string(&path).expect("golden snapshot missing; rerun with SDR_BLESS=1");
    assert_eq!(svg, golden);

    let dir = tempfile::tempdir().unwrap();
    let written = emit_plots(&summary, dir.path()).unwrap();
    assert_eq!(written.len(), 1);
    assert_eq!(fs::read_to_string(&written[0]).unwrap(), golden);
}
