//! Browser bindings: a binomial grid explorer, an axiom checker and the
//! cohomology solver, all on algebra documents pasted as text.

use serde_json::json;
use vertexcoh::cohomology::{h0, h1, h2};
use vertexcoh::document::{parse_algebra, write_algebra};
use vertexcoh::scalars::binom;
use vertexcoh::valg::{check_all, check_module};
use vertexcoh::{fixtures, Settings};
use wasm_bindgen::prelude::*;

/// Names of the built-in algebras, comma separated.
#[wasm_bindgen]
pub fn fixture_names() -> String {
    fixtures::NAMES.join(",")
}

/// The document of a built-in algebra, or an empty string.
#[wasm_bindgen]
pub fn fixture_document(name: &str) -> String {
    fixtures::by_name(name).map_or_else(String::new, |alg| write_algebra(&alg, None))
}

/// Coefficients `C(n, j)` of `x^{n-j} z^j` in `(x+z)^n` for
/// `n_lo ≤ n ≤ n_hi` and `0 ≤ j < terms`, as JSON rows of strings.
#[wasm_bindgen]
pub fn binomial_grid(n_lo: i32, n_hi: i32, terms: u32) -> String {
    let terms = terms.min(64) as i64;
    let rows: Vec<_> = (n_lo..=n_hi.min(n_lo + 64))
        .map(|n| {
            let n = i64::from(n);
            let coefficients: Vec<String> = (0..terms)
                .map(|j| binom(n, j).map_or_else(|_| "?".into(), |c| c.to_string()))
                .collect();
            json!({ "n": n, "coefficients": coefficients })
        })
        .collect();
    json!({ "terms": terms, "rows": rows }).to_string()
}

/// Algebra and module axiom report for a document.
#[wasm_bindgen]
pub fn check_document(text: &str) -> String {
    let doc = match parse_algebra(text) {
        Ok(doc) => doc,
        Err(e) => return format!("error: {e}\n"),
    };
    let s = Settings::default();
    let mut out = check_all(&doc.algebra, &s).to_string();
    if doc.module.is_some() {
        out.push_str("\nmodule:\n");
        out.push_str(&check_module(&doc.module(), &s).to_string());
    }
    out
}

/// `H^degree` of the document's module (the regular module by default).
#[wasm_bindgen]
pub fn cohomology(text: &str, degree: u32) -> String {
    let module = match parse_algebra(text) {
        Ok(doc) => doc.module(),
        Err(e) => return format!("error: {e}\n"),
    };
    let s = Settings::default();
    let report = match degree {
        0 => h0(&module, &s),
        1 => h1(&module, &s),
        2 => match h2(&module, &s, None) {
            Ok(r) => r,
            Err(e) => return format!("error: {e}\n"),
        },
        _ => return "error: degrees 0, 1 and 2 are supported\n".into(),
    };
    report.render(&module)
}
