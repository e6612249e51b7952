mod support;

use support::{random_bilinear, random_one_cochain, random_two_cochain, rng, small_rational};
use vertexcoh::cochain::{delta2_report, is_cocycle, validate_c2, Context};
use vertexcoh::fixtures;
use vertexcoh::valg::Check;
use vertexcoh::{ModuleStructure, Settings, TwoCochain};

const SAMPLES: usize = 100;

fn modules() -> Vec<(&'static str, ModuleStructure)> {
    let mut out: Vec<(&'static str, ModuleStructure)> = fixtures::NAMES
        .iter()
        .map(|name| (*name, ModuleStructure::regular(&fixtures::by_name(name).unwrap())))
        .collect();
    out.push(("dual, zero module", ModuleStructure::zero(&fixtures::dual_numbers())));
    out
}

/// Every coboundary is a cocycle in both forms of the identity.
#[test]
fn coboundaries_are_cocycles() {
    let s = Settings::default();
    for (name, module) in modules() {
        let ctx = Context::new(&module, &s, None);
        let bound = s.cocycle_bound(module.algebra().dim());
        let mut r = rng(0xC0B0 + module.algebra().dim() as u64);
        for sample in 0..SAMPLES {
            let g = random_one_cochain(&module, &mut r);
            let f = ctx.delta1(&g).unwrap();
            let c2 = validate_c2(&f, &ctx);
            assert!(c2.passed(), "{name} sample {sample}: {c2}");
            let cocycle = is_cocycle(&f, &ctx);
            assert!(cocycle.passed(), "{name} sample {sample}: {cocycle}");
            assert!(cocycle.max_witness(Check::Cocycle).unwrap_or(0) <= bound);
            let d2 = delta2_report(&f, &ctx);
            assert!(d2.passed(), "{name} sample {sample}: {d2}");
            assert_eq!(cocycle.exact(), module.is_exact(), "{name}");
        }
    }
}

#[test]
fn delta1_is_linear() {
    let s = Settings::default();
    let mut r = rng(11);
    for (name, module) in modules() {
        let ctx = Context::new(&module, &s, None);
        for _ in 0..20 {
            let (g, h) = (random_one_cochain(&module, &mut r), random_one_cochain(&module, &mut r));
            let (a, b) = (small_rational(&mut r), small_rational(&mut r));
            let lhs = ctx.delta1(&g.scale(&a).add(&h.scale(&b))).unwrap();
            let rhs = ctx
                .delta1(&g)
                .unwrap()
                .scale(&a)
                .add(&ctx.delta1(&h).unwrap().scale(&b));
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

/// Reading a cochain back from its own series is the identity.
#[test]
fn extraction_round_trip() {
    let s = Settings::default();
    let mut r = rng(12);
    for (name, module) in modules() {
        let ctx = Context::new(&module, &s, Some(0));
        let (n, m) = (module.algebra().dim(), module.dim());
        for _ in 0..20 {
            let f = random_two_cochain(n, m, &mut r);
            let series = ctx.series_of(&f);
            let e = |i: usize| {
                let mut v = vec![vertexcoh::scalars::q(0); n];
                v[i] = vertexcoh::scalars::q(1);
                v
            };
            let back = ctx.from_series(0, |i, j| series.apply(&e(i), &e(j))).unwrap();
            assert_eq!(back, f, "{name}");
        }
    }
}

/// Random constant cochains essentially never satisfy the conditions, and
/// the checks must say so.
#[test]
fn random_cochains_are_rejected() {
    let s = Settings::default();
    let mut r = rng(13);
    for name in ["dual", "cube", "plane"] {
        let module = ModuleStructure::regular(&fixtures::by_name(name).unwrap());
        let ctx = Context::new(&module, &s, Some(0));
        let n = module.dim();
        for _ in 0..10 {
            let f = TwoCochain::from_zero_coeff(random_bilinear(n, n, &mut r));
            let mut report = validate_c2(&f, &ctx);
            report.merge(is_cocycle(&f, &ctx));
            assert!(!report.passed(), "{name}: random cochain accepted");
        }
    }
}
