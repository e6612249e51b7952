use vertexcoh_web::{binomial_grid, check_document, cohomology, fixture_document, fixture_names};

#[test]
fn grid_rows_are_binomials() {
    let grid: serde_json::Value = serde_json::from_str(&binomial_grid(-2, 3, 5)).unwrap();
    let rows = grid["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["coefficients"], serde_json::json!(["1", "-2", "3", "-4", "5"]));
    assert_eq!(rows[5]["coefficients"], serde_json::json!(["1", "3", "3", "1", "0"]));
}

#[test]
fn every_fixture_round_trips_through_the_page() {
    for name in fixture_names().split(',') {
        let doc = fixture_document(name);
        assert!(!doc.is_empty(), "{name}");
        let report = check_document(&doc);
        assert!(
            !report.contains("FAIL") && !report.starts_with("error"),
            "{name}: {report}"
        );
    }
    assert!(fixture_document("nope").is_empty());
}

#[test]
fn cohomology_of_dual_numbers() {
    let doc = fixture_document("dual");
    assert!(cohomology(&doc, 2).starts_with("dim H^2 = 1\n"));
    assert!(cohomology(&doc, 1).starts_with("dim H^1 = 1\n"));
    assert!(cohomology(&doc, 3).starts_with("error"));
    assert!(cohomology("basis", 0).starts_with("error"));
}
