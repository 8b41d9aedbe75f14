//! Replays the checked-in fuzz corpus and feeds random input through the
//! same round-trip checks as the fuzz targets.

#[path = "../../../fuzz/checks.rs"]
mod checks;

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files.into_iter().map(|f| fs::read(f).unwrap()).collect()
}

#[test]
fn corpus_seeds_replay_cleanly() {
    for seed in corpus("parse_matrix") {
        checks::check_matrix(&seed);
    }
    for seed in corpus("parse_config") {
        checks::check_config(&seed);
    }
    for seed in corpus("parse_results_csv") {
        checks::check_results_csv(&seed);
    }
    for seed in corpus("parse_list") {
        checks::check_list(&seed);
    }
}

#[test]
fn corpus_covers_accepting_and_rejecting_inputs() {
    let accepted = corpus("parse_matrix")
        .iter()
        .filter(|s| sdr_core::io::parse_matrix(std::str::from_utf8(s).unwrap()).is_ok())
        .count();
    assert!(accepted >= 2 && accepted < corpus("parse_matrix").len());
}

fn numeric_text() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[-+0-9eE.,# \\n\\tnaif=_a-z]{0,80}").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn random_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        checks::check_matrix(&bytes);
        checks::check_config(&bytes);
        checks::check_results_csv(&bytes);
        checks::check_list(&bytes);
    }

    #[test]
    fn numeric_looking_text_round_trips(text in numeric_text()) {
        checks::check_matrix(text.as_bytes());
        checks::check_config(text.as_bytes());
        checks::check_list(text.as_bytes());
        let csv = format!("scheme,n,p,eps,trial,seed,estimator,l2_error,runtime_ms\n{text}");
        checks::check_results_csv(csv.as_bytes());
    }
}
