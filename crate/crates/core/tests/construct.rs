mod support;

use support::{random_one_cochain, random_two_cochain, rng, small_rational};
use vertexcoh::cochain::{is_cocycle, validate_c2, Context};
use vertexcoh::cohomology::{h2, same_class};
use vertexcoh::construct::{
    build_deformation, build_extension, deformations_equivalent, extensions_equivalent, extract_cocycle, find_section,
};
use vertexcoh::{fixtures, ModuleStructure, Settings, TwoCochain};

fn regular(name: &str) -> ModuleStructure {
    ModuleStructure::regular(&fixtures::by_name(name).unwrap())
}

/// Membership in `Z²`: a valid 2-cochain satisfying the cocycle identity.
fn in_z2(f: &TwoCochain, ctx: &Context) -> bool {
    validate_c2(f, ctx).passed() && is_cocycle(f, ctx).passed()
}

fn representatives(module: &ModuleStructure, s: &Settings) -> Vec<TwoCochain> {
    h2(module, s, None).unwrap().two_cochains()
}

#[test]
fn extension_round_trips() {
    let s = Settings::default();
    let mut r = rng(41);
    for name in fixtures::NAMES {
        let module = regular(name);
        let ctx = Context::new(&module, &s, Some(0));
        let (n, m) = (module.algebra().dim(), module.dim());
        for f in representatives(&module, &s) {
            let ext = build_extension(&module, &f, &s).unwrap();
            assert!(ext.report.passed(), "{name}: {}", ext.report);
            assert!(ext.report.exact(), "{name}");
            assert!(ext.kernel_is_square_zero(s.trunc), "{name}");
            assert_eq!(
                extract_cocycle(&ext, &ext.canonical_section(), &s).unwrap(),
                f,
                "{name}"
            );
            assert_eq!(
                find_section(&ext.base, &ext.total).unwrap(),
                ext.canonical_section(),
                "{name}"
            );

            // Moving the section by g shifts the cocycle by δ₁g.
            let g = random_one_cochain(&module, &mut r);
            let mut gamma = ext.canonical_section();
            for row in 0..m {
                for col in 0..n {
                    gamma.set(n + row, col, g.map().get(row, col).clone());
                }
            }
            let moved = extract_cocycle(&ext, &gamma, &s).unwrap();
            assert_eq!(moved, f.add(&ctx.delta1(&g).unwrap()), "{name}");
            assert!(same_class(&moved, &f, &ctx).unwrap().is_some(), "{name}");
        }
    }
}

#[test]
fn extension_equivalence_matches_classes() {
    let s = Settings::default();
    let mut r = rng(42);
    for name in fixtures::NAMES {
        let module = regular(name);
        let ctx = Context::new(&module, &s, Some(0));
        let (n, m) = (module.algebra().dim(), module.dim());
        let mut pool = vec![TwoCochain::zero(n, m, 0)];
        for f in representatives(&module, &s) {
            pool.push(f.add(&ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap()));
            pool.push(f);
        }
        for f1 in &pool {
            for f2 in &pool {
                let classes = same_class(f1, f2, &ctx).unwrap();
                let ext = extensions_equivalent(f1, f2, &module, &s).unwrap();
                assert_eq!(classes.is_some(), ext.is_some(), "{name}");
                if let Some(g) = ext {
                    assert_eq!(ctx.delta1(&g).unwrap(), f1.sub(f2), "{name}");
                }
            }
        }
    }
}

#[test]
fn non_cocycles_give_invalid_extensions() {
    let s = Settings::default();
    let mut r = rng(43);
    let mut rejected = 0;
    for name in fixtures::NAMES {
        let module = regular(name);
        let ctx = Context::new(&module, &s, Some(0));
        let (n, m) = (module.algebra().dim(), module.dim());
        for _ in 0..10 {
            let f = random_two_cochain(n, m, &mut r);
            let ext = build_extension(&module, &f, &s).unwrap();
            assert_eq!(in_z2(&f, &ctx), ext.report.passed(), "{name}: {f:?}");
            if !ext.report.passed() {
                rejected += 1;
            }
        }
    }
    assert!(rejected >= 50, "{rejected}");
}

#[test]
fn deformation_iff_cocycle() {
    let s = Settings::default();
    let mut r = rng(44);
    let (mut valid, mut invalid) = (0, 0);
    for name in fixtures::NAMES {
        let module = regular(name);
        let alg = module.algebra().clone();
        let ctx = Context::new(&module, &s, Some(0));
        let n = alg.dim();
        let reps = representatives(&module, &s);
        let mut candidates = reps.clone();
        for _ in 0..8 {
            let mut f = ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap();
            for rep in &reps {
                f = f.add(&rep.scale(&small_rational(&mut r)));
            }
            candidates.push(f);
            candidates.push(random_two_cochain(n, n, &mut r));
        }
        for f in candidates {
            let def = build_deformation(&alg, &f, &s).unwrap();
            let cocycle = in_z2(&f, &ctx);
            assert_eq!(cocycle, def.report.passed(), "{name}: {f:?}\n{}", def.report);
            assert!(def.report.notes.is_empty(), "{name}: {:?}", def.report.notes);
            if cocycle {
                valid += 1;
            } else {
                invalid += 1;
            }
        }
    }
    assert!(valid >= 50 && invalid >= 50, "{valid} valid, {invalid} invalid");
}

#[test]
fn deformation_equivalence_matches_classes() {
    let s = Settings::default();
    let mut r = rng(45);
    for name in fixtures::NAMES {
        let module = regular(name);
        let alg = module.algebra().clone();
        let ctx = Context::new(&module, &s, Some(0));
        let n = alg.dim();
        let mut pool = vec![TwoCochain::zero(n, n, 0)];
        for f in representatives(&module, &s) {
            pool.push(f.add(&ctx.delta1(&random_one_cochain(&module, &mut r)).unwrap()));
            pool.push(f);
        }
        for f1 in &pool {
            for f2 in &pool {
                let classes = same_class(f1, f2, &ctx).unwrap();
                let def = deformations_equivalent(f1, f2, &alg, &s).unwrap();
                assert_eq!(classes.is_some(), def.is_some(), "{name}");
            }
        }
    }
}

#[test]
fn dual_numbers_nontrivial_deformation() {
    let s = Settings::default();
    let alg = fixtures::dual_numbers();
    let mut f = TwoCochain::zero(2, 2, 0);
    let mut table = f.zero_coeff().clone();
    table.set(1, 1, vec![vertexcoh::scalars::q(1), vertexcoh::scalars::q(0)]);
    f = TwoCochain::from_zero_coeff(table);
    let def = build_deformation(&alg, &f, &s).unwrap();
    assert!(def.report.passed() && def.report.exact(), "{}", def.report);
    assert!(deformations_equivalent(&f, &TwoCochain::zero(2, 2, 0), &alg, &s)
        .unwrap()
        .is_none());
}
