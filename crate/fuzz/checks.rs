// Round-trip checks shared by the fuzz targets and the corpus replay test.
// Each takes arbitrary bytes, must never panic on rejected input, and asserts
// that accepted input survives a serialise/parse round trip.
#![allow(dead_code)]

use sdr_core::bench::{parse_results_csv, results_csv};
use sdr_core::io::{parse_config, parse_dataset, parse_list, parse_matrix, parse_sym_matrix};

pub fn check_matrix(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_matrix(text) else {
        let _ = parse_dataset(text);
        return;
    };
    if let Some(first) = rows.first() {
        assert!(rows.iter().all(|r| r.len() == first.len()));
    }
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    let printed: String = rows
        .iter()
        .map(|r| r.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ") + "\n")
        .collect();
    let again = parse_matrix(&printed).expect("printed matrix must parse");
    assert_eq!(
        rows.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>(),
        again.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    if let Ok(m) = parse_sym_matrix(text) {
        assert_eq!(m.dim(), rows.len());
    }
}

pub fn check_config(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(map) = parse_config(text) else { return };
    let printed: String = map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    assert_eq!(parse_config(&printed).expect("printed config must parse"), map);
}

pub fn check_results_csv(data: &[u8]) {
    let Ok(rows) = parse_results_csv(data) else { return };
    assert!(rows.iter().all(|r| (r.l2_error.is_nan() || r.l2_error >= 0.0) && r.runtime_ms >= 0.0));
    let printed = results_csv(&rows);
    let again = parse_results_csv(printed.as_bytes()).expect("printed CSV must parse");
    assert_eq!(results_csv(&again), printed);
}

pub fn check_list(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(items) = parse_list::<usize>(text) {
        let printed = items.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_list::<usize>(&printed).unwrap(), items);
    }
    if let Ok(items) = parse_list::<f64>(text) {
        let printed = items.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        let again = parse_list::<f64>(&printed).unwrap();
        assert_eq!(
            items.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            again.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
