mod support;

use support::{Table, COMMUTATIVE};
use vertexcoh::fixtures;
use vertexcoh::valg::{check_associator, check_axioms};
use vertexcoh::Settings;

fn accepted(table: &Table, s: &Settings) -> bool {
    let alg = table.to_algebra();
    check_axioms(&alg, s).passed() && check_associator(&alg, s).passed()
}

#[test]
fn presets_pass_exactly() {
    let s = Settings::default();
    for name in COMMUTATIVE.iter().chain(&["cube-derivation"]) {
        let alg = fixtures::by_name(name).unwrap();
        assert!(Table::of(&alg).is_valid(), "{name}");
        let (axioms, assoc) = (check_axioms(&alg, &s), check_associator(&alg, &s));
        assert!(axioms.passed() && axioms.exact(), "{name}: {axioms}");
        assert!(assoc.passed() && assoc.exact(), "{name}: {assoc}");
    }
}

/// The checkers agree with the brute-force table oracle on every
/// single-entry mutation. Some mutations are themselves valid algebras
/// (for instance `1·1 [x] += 1` on the dual numbers just moves the unit);
/// those must be accepted, and every other one rejected.
#[test]
fn mutations_agree_with_oracle() {
    let s = Settings::default();
    let (mut rejected, mut still_valid) = (0, 0);
    for name in COMMUTATIVE.iter().chain(&["cube-derivation"]) {
        let table = Table::of(&fixtures::by_name(name).unwrap());
        for (label, mutant) in table.single_entry_mutations() {
            let oracle = mutant.is_valid();
            assert_eq!(accepted(&mutant, &s), oracle, "{name}: {label}");
            if oracle {
                still_valid += 1;
            } else {
                rejected += 1;
            }
        }
    }
    assert!(rejected > 0);
    eprintln!("{rejected} mutations rejected, {still_valid} valid and accepted");
}
