//! Acceptance run: one line per criterion, with timing against its budget.
//! Runs without the libtest harness so the lines print in order.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use support::{random_one_cochain, random_two_cochain, rng, small_rational, Table, COMMUTATIVE};
use vertexcoh::cochain::{delta2_report, is_cocycle, symmetry_transform, validate_c2, Bilinear, Context};
use vertexcoh::cohomology::{compare_harrison, h2, same_class};
use vertexcoh::construct::{
    build_deformation, build_extension, deformations_equivalent, extensions_equivalent, extract_cocycle,
};
use vertexcoh::document::{parse_algebra, write_one_cochain, write_two_cochain};
use vertexcoh::formal::{apply_exp, expand_binomial, substitute_shift};
use vertexcoh::harrison::{harrison_h2, CommAlgebra};
use vertexcoh::scalars::binom;
use vertexcoh::valg::{check_associator, check_axioms, Check};
use vertexcoh::{fixtures, ModuleStructure, OneCochain, QMatrix, Rational, Settings, TwoCochain, VecSeries1, Window};

type Verdict = Result<String, String>;

/// Name, check and time budget in seconds.
type Criterion = (&'static str, fn() -> Verdict, u64);

const KNOWN_MUTATION_DEFECT: &str = "not every mutation is rejected";

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn regular(name: &str) -> ModuleStructure {
    ModuleStructure::regular(&fixtures::by_name(name).unwrap())
}

fn in_z2(f: &TwoCochain, ctx: &Context) -> bool {
    validate_c2(f, ctx).passed() && is_cocycle(f, ctx).passed()
}

/// Presets pass exactly; mutations are judged against the table oracle.
/// Mutations the oracle finds valid are a counterexample to the literal
/// "every mutation is rejected" and are reported as such.
fn axiom_suite() -> Verdict {
    let s = Settings::default();
    let names: Vec<&str> = COMMUTATIVE.iter().copied().chain(["cube-derivation"]).collect();
    for name in &names {
        let alg = fixtures::by_name(name).unwrap();
        let (a, b) = (check_axioms(&alg, &s), check_associator(&alg, &s));
        ensure(a.passed() && a.exact() && b.passed() && b.exact(), || {
            format!("{name} fails its own checks")
        })?;
    }
    let (mut rejected, mut valid, mut example) = (0, 0, None);
    for name in &names {
        let table = Table::of(&fixtures::by_name(name).unwrap());
        for (label, mutant) in table.single_entry_mutations() {
            let alg = mutant.to_algebra();
            let accepted = check_axioms(&alg, &s).passed() && check_associator(&alg, &s).passed();
            let oracle = mutant.is_valid();
            ensure(accepted == oracle, || {
                format!("{name}: {label}: checkers say {accepted}, oracle {oracle}")
            })?;
            if oracle {
                valid += 1;
                example.get_or_insert(format!("{name}: {label}"));
            } else {
                rejected += 1;
            }
        }
    }
    let detail = format!("{rejected} invalid mutations rejected, {valid} oracle-valid mutations accepted");
    match example {
        None => Ok(detail),
        Some(e) => Err(format!("{KNOWN_MUTATION_DEFECT}; {detail} (e.g. {e})")),
    }
}

fn coboundaries() -> Verdict {
    let s = Settings::default();
    let mut total = 0;
    for name in fixtures::NAMES {
        let module = regular(name);
        let ctx = Context::new(&module, &s, None);
        let bound = s.cocycle_bound(module.algebra().dim());
        let mut r = rng(0xAC2 + total as u64);
        for _ in 0..100 {
            let f = ctx
                .delta1(&random_one_cochain(&module, &mut r))
                .map_err(|e| e.to_string())?;
            ensure(validate_c2(&f, &ctx).passed(), || {
                format!("{name}: δ₁g is not a valid 2-cochain")
            })?;
            let c = is_cocycle(&f, &ctx);
            ensure(
                c.passed() && c.max_witness(Check::Cocycle).unwrap_or(0) <= bound,
                || format!("{name}: {c}"),
            )?;
            // Only the nilpotent presets promise exact verdicts.
            ensure(c.exact() == module.is_exact(), || {
                format!("{name}: unexpected exactness")
            })?;
            ensure(delta2_report(&f, &ctx).passed(), || {
                format!("{name}: nonzero δ₂ defect")
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} coboundaries, exact on nilpotent presets"))
}

fn harrison_agreement() -> Verdict {
    let s = Settings::default();
    let mut dims = Vec::new();
    for name in COMMUTATIVE {
        let alg = CommAlgebra::from_preset(&fixtures::by_name(name).unwrap()).map_err(|e| e.to_string())?;
        let oracle = harrison_h2(&alg, &alg.regular_module())
            .map_err(|e| e.to_string())?
            .dimension;
        let cmp = compare_harrison(&regular(name), &s).map_err(|e| e.to_string())?;
        ensure(
            cmp.agree && cmp.vertex_dim == oracle && cmp.harrison_dim == oracle,
            || format!("{name}: {}", cmp.render()),
        )?;
        dims.push(format!("{name} {oracle}"));
    }
    ensure(dims[1] == "dual 1" && dims[3] == "product 0", || format!("{dims:?}"))?;
    Ok(dims.join(", "))
}

fn extension_round_trips() -> Verdict {
    let s = Settings::default();
    let mut r = rng(0xAC4);
    let (mut reps, mut invalid) = (0, 0);
    for name in fixtures::NAMES {
        let module = regular(name);
        let ctx = Context::new(&module, &s, Some(0));
        let (n, m) = (module.algebra().dim(), module.dim());
        let mut pool = vec![TwoCochain::zero(n, m, 0)];
        for f in h2(&module, &s, None).map_err(|e| e.to_string())?.two_cochains() {
            let ext = build_extension(&module, &f, &s).map_err(|e| e.to_string())?;
            ensure(ext.report.passed() && ext.report.exact(), || {
                format!("{name}: {}", ext.report)
            })?;
            let back = extract_cocycle(&ext, &ext.canonical_section(), &s).map_err(|e| e.to_string())?;
            ensure(back == f, || format!("{name}: canonical section changes the cocycle"))?;
            let g = random_one_cochain(&module, &mut r);
            let mut gamma = ext.canonical_section();
            for row in 0..m {
                for col in 0..n {
                    gamma.set(n + row, col, g.map().get(row, col).clone());
                }
            }
            let moved = extract_cocycle(&ext, &gamma, &s).map_err(|e| e.to_string())?;
            ensure(
                same_class(&moved, &f, &ctx).map_err(|e| e.to_string())?.is_some(),
                || format!("{name}: section change leaves the class"),
            )?;
            pool.push(f.add(&ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap()));
            pool.push(f);
            reps += 1;
        }
        for f1 in &pool {
            for f2 in &pool {
                let a = same_class(f1, f2, &ctx).map_err(|e| e.to_string())?.is_some();
                let b = extensions_equivalent(f1, f2, &module, &s)
                    .map_err(|e| e.to_string())?
                    .is_some();
                ensure(a == b, || format!("{name}: same_class {a}, extensions_equivalent {b}"))?;
            }
        }
        for _ in 0..8 {
            let f = random_two_cochain(n, m, &mut r);
            let ext = build_extension(&module, &f, &s).map_err(|e| e.to_string())?;
            ensure(in_z2(&f, &ctx) == ext.report.passed(), || {
                format!("{name}: cocycle test and total disagree")
            })?;
            if !ext.report.passed() {
                invalid += 1;
            }
        }
    }
    Ok(format!(
        "{reps} representatives, {invalid} non-cocycles with failing totals"
    ))
}

fn deformation_round_trips() -> Verdict {
    let s = Settings::default();
    let mut r = rng(0xAC5);
    let (mut valid, mut invalid) = (0, 0);
    for name in fixtures::NAMES {
        let module = regular(name);
        let alg = module.algebra().clone();
        let ctx = Context::new(&module, &s, Some(0));
        let n = alg.dim();
        let reps = h2(&module, &s, None).map_err(|e| e.to_string())?.two_cochains();
        let mut candidates = reps.clone();
        for _ in 0..8 {
            let mut f = ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap();
            for rep in &reps {
                f = f.add(&rep.scale(&small_rational(&mut r)));
            }
            candidates.push(f);
            candidates.push(random_two_cochain(n, n, &mut r));
        }
        for f in &candidates {
            let def = build_deformation(&alg, f, &s).map_err(|e| e.to_string())?;
            let cocycle = in_z2(f, &ctx);
            ensure(cocycle == def.report.passed(), || {
                format!("{name}: cocycle {cocycle}, deformation disagrees")
            })?;
            if cocycle {
                valid += 1;
            } else {
                invalid += 1;
            }
        }
        let mut pool = vec![TwoCochain::zero(n, n, 0)];
        for f in reps {
            pool.push(f.add(&ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap()));
            pool.push(f);
        }
        for f1 in &pool {
            for f2 in &pool {
                let a = same_class(f1, f2, &ctx).map_err(|e| e.to_string())?.is_some();
                let b = deformations_equivalent(f1, f2, &alg, &s)
                    .map_err(|e| e.to_string())?
                    .is_some();
                ensure(a == b, || {
                    format!("{name}: same_class {a}, deformations_equivalent {b}")
                })?;
            }
        }
    }
    ensure(valid >= 50 && invalid >= 50, || {
        format!("only {valid} valid and {invalid} invalid samples")
    })?;

    let alg = fixtures::dual_numbers();
    let mut table = Bilinear::zeros(2, 2);
    table.set(
        1,
        1,
        vec![Rational::from_integer(1.into()), Rational::from_integer(0.into())],
    );
    let f = TwoCochain::from_zero_coeff(table);
    let def = build_deformation(&alg, &f, &s).map_err(|e| e.to_string())?;
    ensure(def.report.passed() && def.report.exact(), || "x⋆x = t·1 fails".into())?;
    let trivial = deformations_equivalent(&f, &TwoCochain::zero(2, 2, 0), &alg, &s).map_err(|e| e.to_string())?;
    ensure(trivial.is_none(), || {
        "x⋆x = t·1 is equivalent to the trivial deformation".into()
    })?;
    Ok(format!("{valid} cocycles pass, {invalid} non-cocycles fail"))
}

fn rational(r: &mut impl Rng) -> Rational {
    Rational::new(r.gen_range(-6i64..=6).into(), r.gen_range(1i64..=4).into())
}

fn nilpotent(n: usize, r: &mut impl Rng) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    for row in 0..n {
        for col in (row + 1)..n {
            m.set(row, col, rational(r));
        }
    }
    m
}

fn formal_invariants() -> Verdict {
    const CASES: usize = 200;
    let mut r = rng(0xAC6);
    let wide = Window {
        low_x: -24,
        high_x: 24,
        low_z: 0,
        high_z: 12,
    };
    for _ in 0..CASES {
        let (m, n) = (r.gen_range(-5i64..=5), r.gen_range(-5i64..=5));
        let (a, b, c) = (
            expand_binomial(m, &wide),
            expand_binomial(n, &wide),
            expand_binomial(m + n, &wide),
        );
        for j in 0..=wide.high_z {
            let mut conv = Rational::from_integer(0.into());
            for s in 0..=j {
                conv += &a.coeff(m - s, s).unwrap()[0] * &b.coeff(n - (j - s), j - s).unwrap()[0];
            }
            let expected = binom(m + n, j).unwrap();
            ensure(c.coeff(m + n - j, j).unwrap()[0] == conv && conv == expected, || {
                format!("binomial product law at m={m}, n={n}, j={j}")
            })?;
        }
    }
    for _ in 0..CASES {
        let terms: Vec<(i64, Vec<Rational>)> = (0..r.gen_range(0..5))
            .map(|_| (r.gen_range(-3i64..=5), vec![rational(&mut r), rational(&mut r)]))
            .collect();
        let f = VecSeries1::from_terms(2, terms, None);
        let window = Window::symmetric(8, 8);
        let lhs = substitute_shift(&f, &window).unwrap().ddx();
        let rhs = substitute_shift(&f.ddz(), &window).unwrap();
        ensure(lhs.compare(&rhs).1.is_none(), || {
            "substitution does not commute with ∂".into()
        })?;
    }
    for _ in 0..CASES {
        let d = nilpotent(2, &mut r);
        let family: BTreeMap<i64, Bilinear> = (-2..=4)
            .map(|k| {
                (
                    k,
                    Bilinear::from_coords(2, 2, &(0..8).map(|_| rational(&mut r)).collect::<Vec<_>>()),
                )
            })
            .collect();
        ensure(
            symmetry_transform(&symmetry_transform(&family, &d), &d) == family,
            || "symmetry transform is not an involution".into(),
        )?;
    }
    for _ in 0..CASES {
        let t = nilpotent(3, &mut r);
        let (a, b) = (rational(&mut r), rational(&mut r));
        let v: Vec<Rational> = (0..3).map(|_| rational(&mut r)).collect();
        let s = t.scale(&a).add(&t.mul(&t).scale(&b));
        let composed = apply_exp(&t, &v, 8).compose_series(3, |u| apply_exp(&s, u, 8));
        ensure(composed.is_exact() && composed == apply_exp(&t.add(&s), &v, 8), || {
            "e^{zT} e^{zS} ≠ e^{z(T+S)}".into()
        })?;
    }
    Ok(format!("{CASES} cases per law, exact"))
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn invoke(args: &[String]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_vertexcoh"))
        .args(args)
        .output()
        .expect("the binary runs");
    let mut bytes = out.stdout;
    bytes.extend(out.stderr);
    bytes.extend(out.status.code().unwrap_or(-1).to_string().into_bytes());
    bytes
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

/// Every command on every fixture, twice, in separate processes.
fn determinism() -> Verdict {
    let scratch = std::env::temp_dir().join(format!("vertexcoh-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&scratch).map_err(|e| e.to_string())?;
    let mut algs: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "alg"))
        .collect();
    algs.sort();
    let mut invocations: Vec<Vec<String>> = Vec::new();
    for alg in &algs {
        let a = path(alg);
        for cmd in [
            "check",
            "check-module",
            "h0",
            "h1",
            "h2",
            "harrison",
            "compare-harrison",
        ] {
            invocations.push(vec![cmd.into(), a.clone()]);
            invocations.push(vec!["--json".into(), cmd.into(), a.clone()]);
        }
        let Ok(doc) = parse_algebra(&std::fs::read_to_string(alg).unwrap()) else {
            continue;
        };
        let module = doc.module();
        let (n, m) = (module.algebra().dim(), module.dim());
        let stem = alg.file_stem().unwrap().to_string_lossy().to_string();
        let zero2 = scratch.join(format!("{stem}-zero.cochain"));
        let zero1 = scratch.join(format!("{stem}-zero1.cochain"));
        let total = scratch.join(format!("{stem}-total.alg"));
        std::fs::write(&zero2, write_two_cochain(&TwoCochain::zero(n, m, 0), &module)).unwrap();
        std::fs::write(&zero1, write_one_cochain(&OneCochain::zero(n, m), &module)).unwrap();
        let (z2, z1) = (path(&zero2), path(&zero1));
        invocations.push(vec!["cocycle".into(), a.clone(), z2.clone()]);
        invocations.push(vec!["delta1".into(), a.clone(), z1]);
        invocations.push(vec![
            "--out".into(),
            path(&total),
            "extend".into(),
            a.clone(),
            z2.clone(),
        ]);
        invocations.push(vec!["extract".into(), a.clone(), path(&total)]);
        invocations.push(vec!["equiv-ext".into(), a.clone(), z2.clone(), z2.clone()]);
        invocations.push(vec!["deform".into(), a.clone(), z2.clone()]);
        invocations.push(vec!["equiv-def".into(), a.clone(), z2.clone(), z2]);
    }
    let dual = path(&fixture_dir().join("dual.alg"));
    for c in ["dual-xx", "dual-xx-shifted", "dual-asymmetric", "dual-zero"] {
        let c = path(&fixture_dir().join(format!("{c}.cochain")));
        for cmd in ["cocycle", "extend", "deform"] {
            invocations.push(vec![cmd.into(), dual.clone(), c.clone()]);
        }
        invocations.push(vec![
            "equiv-def".into(),
            dual.clone(),
            path(&fixture_dir().join("dual-xx.cochain")),
            c,
        ]);
    }
    for args in &invocations {
        let (first, second) = (invoke(args), invoke(args));
        ensure(first == second, || format!("output differs between runs of {args:?}"))?;
    }
    std::fs::remove_dir_all(&scratch).ok();
    Ok(format!(
        "{} invocations over {} fixtures, byte-identical",
        invocations.len(),
        algs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("axiom suite", axiom_suite, 5),
        ("coboundaries are cocycles", coboundaries, 30),
        ("Harrison agreement", harrison_agreement, 60),
        ("extension round trips", extension_round_trips, 60),
        ("deformation round trips", deformation_round_trips, 60),
        ("formal-calculus invariants", formal_invariants, 10),
        ("determinism", determinism, 600),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let secs = elapsed.as_secs_f64();
        let line = match verdict {
            Ok(detail) if elapsed < Duration::from_secs(budget) => format!("PASS {name}: {detail} ({secs:.2}s)"),
            Ok(detail) => format!("FAIL {name}: {detail}, but took {secs:.2}s > {budget}s"),
            Err(why) => format!("FAIL {name}: {why} ({secs:.2}s)"),
        };
        println!("criterion {}: {line}", i + 1);
        // The mutation clause of the first criterion is false for these
        // tables: some single-entry mutations are valid algebras. That
        // failure is reported and tolerated; anything else fails the run.
        if line.starts_with("FAIL") && !line.contains(KNOWN_MUTATION_DEFECT) {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("acceptance failed: criteria {failed:?}");
        std::process::exit(1);
    }
}
