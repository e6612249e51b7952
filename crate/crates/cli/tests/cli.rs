use std::path::PathBuf;

use vertexcoh_cli::{run, Outcome, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> Outcome {
    let owned: Vec<String> = args
        .iter()
        .map(|a| {
            if a.contains('.') && !a.starts_with('-') {
                fixture(a)
            } else {
                a.to_string()
            }
        })
        .collect();
    run(std::iter::once("vertexcoh".to_string()).chain(owned))
}

#[test]
fn valid_algebras_pass() {
    for name in [
        "field.alg",
        "dual.alg",
        "cube.alg",
        "product.alg",
        "plane.alg",
        "cube-derivation.alg",
    ] {
        let out = cli(&["check", name]);
        assert_eq!(out.code, EXIT_OK, "{name}\n{}", out.output);
        assert!(!out.output.contains("FAIL"), "{name}");
    }
}

#[test]
fn invalid_documents_are_usage_errors() {
    let out = cli(&["check", "dual-noncommutative.alg"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(
        out.output.contains(":7:") && out.output.contains("not commutative"),
        "{}",
        out.output
    );

    let out = cli(&["check", "dual-bad-derivation.alg"]);
    assert_eq!(out.code, EXIT_USAGE, "{}", out.output);

    assert_eq!(cli(&["h2", "missing.alg"]).code, EXIT_USAGE);
    assert_eq!(cli(&["no-such-command"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--window", "3", "h2", "dual.alg"]).code, EXIT_USAGE);
}

#[test]
fn cohomology_reports() {
    let out = cli(&["h2", "dual.alg"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.output.starts_with("dim H^2 = 1\n"), "{}", out.output);
    assert!(out.output.contains("f^(0)(x, x) = 1"), "{}", out.output);

    assert!(cli(&["h2", "product.alg"]).output.starts_with("dim H^2 = 0\n"));
    assert!(cli(&["h1", "cube.alg"]).output.starts_with("dim H^1 = 2\n"));
    assert!(cli(&["h0", "field.alg"]).output.starts_with("dim H^0 = 1\n"));

    let json: serde_json::Value = serde_json::from_str(&cli(&["--json", "h2", "plane.alg"]).output).unwrap();
    assert_eq!(json["dimension"], 4);
}

#[test]
fn cocycle_verdicts() {
    assert_eq!(cli(&["cocycle", "dual.alg", "dual-xx.cochain"]).code, EXIT_OK);
    let out = cli(&["cocycle", "dual.alg", "dual-asymmetric.cochain"]);
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.output.contains("FAIL"));
    assert_eq!(cli(&["deform", "dual.alg", "dual-asymmetric.cochain"]).code, EXIT_FAIL);
    assert_eq!(cli(&["extend", "dual.alg", "dual-asymmetric.cochain"]).code, EXIT_FAIL);
}

#[test]
fn coboundary_and_equivalence() {
    let out = cli(&["delta1", "dual.alg", "dual-g.cochain"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.output.contains("f x x = 2*x"), "{}", out.output);

    let out = cli(&["equiv-def", "dual.alg", "dual-xx.cochain", "dual-xx-shifted.cochain"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.output.starts_with("equivalent"));
    assert!(out.output.contains("g x = -1"), "{}", out.output);

    let out = cli(&["equiv-def", "dual.alg", "dual-xx.cochain", "dual-zero.cochain"]);
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.output.starts_with("inequivalent"), "{}", out.output);

    assert_eq!(
        cli(&["equiv-ext", "dual.alg", "dual-xx-shifted.cochain", "dual-xx.cochain"]).code,
        EXIT_OK
    );
}

#[test]
fn extension_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("vertexcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let total = dir.join("total.alg");
    let total_s = total.display().to_string();
    let out = cli(&["--out", &total_s, "extend", "dual.alg", "dual-xx.cochain"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);

    let out = cli(&["extract", "dual.alg", &total_s]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert!(out.output.contains("f x x = 1"), "{}", out.output);

    let section = dir.join("moved.section");
    std::fs::write(&section, "section\ns x = x + 1'\n").unwrap();
    let out = cli(&["extract", "dual.alg", &total_s, &section.display().to_string()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert!(out.output.contains("f x x = 1 + 2*x"), "{}", out.output);

    std::fs::write(&section, "section\ns 1 = 1 + x'\n").unwrap();
    let out = cli(&["extract", "dual.alg", &total_s, &section.display().to_string()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.output.contains("Γ(1) ≠ 1"), "{}", out.output);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn harrison_commands() {
    let out = cli(&["compare-harrison", "plane.alg"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.output);
    assert_eq!(cli(&["harrison", "cube-derivation.alg"]).code, EXIT_USAGE);
}
