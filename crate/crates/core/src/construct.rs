//! Square-zero extensions and first-order deformations built from
//! 2-cocycles, and the maps back.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::cochain::{Context, OneCochain, TwoCochain};
use crate::cohomology::same_class;
use crate::formal::VecSeries1;
use crate::linalg::{solve, QMatrix};
use crate::scalars::{DualScalar, Rational};
use crate::valg::{check_all, AxiomReport, Check, FiniteVertexAlgebra, ModuleStructure, Settings, Structure};
use crate::vector;
use crate::{Error, Result};

/// `V ⊕ M` with the product `(a_z b, a_z v + u_z b + ψ_z(a,b))`.
#[derive(Clone, Debug)]
pub struct SquareZeroExtension {
    pub base: FiniteVertexAlgebra,
    pub fiber: ModuleStructure,
    pub cocycle: TwoCochain,
    /// Basis `e_0..e_{n-1}` of `V` followed by the basis of `M`.
    pub total: FiniteVertexAlgebra,
    pub report: AxiomReport,
}

impl SquareZeroExtension {
    /// Wraps a total algebra read from elsewhere; its first `dim V` basis
    /// vectors lie over `V` and the rest span `M`. The recorded cocycle is
    /// zero and only fixes the tail depth used for extraction.
    pub fn from_total(fiber: &ModuleStructure, total: FiniteVertexAlgebra, settings: &Settings) -> Result<Self> {
        let base = fiber.algebra().clone();
        let (n, m) = (base.dim(), fiber.dim());
        if total.dim() != n + m {
            return Err(Error::Dimension(format!(
                "total has dimension {}, expected {n} + {m}",
                total.dim()
            )));
        }
        let tail = total.pole_order().max(fiber.pole_order()) as usize;
        let report = check_all(&total, settings);
        Ok(Self {
            cocycle: TwoCochain::zero(n, m, tail),
            base,
            fiber: fiber.clone(),
            total,
            report,
        })
    }

    /// Indices of the total basis lying over `V`.
    pub fn projection(&self) -> std::ops::Range<usize> {
        0..self.base.dim()
    }

    /// Indices of the total basis spanning the kernel `M`.
    pub fn inclusion(&self) -> std::ops::Range<usize> {
        self.base.dim()..self.total.dim()
    }

    pub fn canonical_section(&self) -> QMatrix {
        canonical_section(self.base.dim(), self.fiber.dim())
    }

    /// Whether `(0,u) ⊙_z (0,v) = 0` on all basis pairs.
    pub fn kernel_is_square_zero(&self, trunc: i64) -> bool {
        let k = self.total.dim();
        self.inclusion().all(|i| {
            self.inclusion().all(|j| {
                self.total
                    .zproduct(&vector::unit(k, i), &vector::unit(k, j), trunc)
                    .is_zero()
            })
        })
    }
}

fn canonical_section(n: usize, m: usize) -> QMatrix {
    let mut g = QMatrix::zeros(n + m, n);
    for i in 0..n {
        g.set(i, i, Rational::from_integer(1.into()));
    }
    g
}

/// Pads a series in `V` or `M` into `V ⊕ M`.
fn embed(s: &VecSeries1, offset: usize, total: usize) -> VecSeries1 {
    s.map_linear(total, |v| {
        let mut out = vector::zeros(total);
        for (i, x) in v.iter().enumerate() {
            out[offset + i] = x.clone();
        }
        out
    })
}

/// The extension of `V` by `M` with cocycle `ψ`, and the axiom verdicts of
/// its total algebra.
pub fn build_extension(module: &ModuleStructure, psi: &TwoCochain, settings: &Settings) -> Result<SquareZeroExtension> {
    let alg = module.algebra();
    let (n, m) = (alg.dim(), module.dim());
    if psi.dim_v() != n || psi.dim_m() != m {
        return Err(Error::Dimension(format!(
            "cochain maps {}×{} → {}, module needs {n}×{n} → {m}",
            psi.dim_v(),
            psi.dim_v(),
            psi.dim_m()
        )));
    }
    let ctx = Context::new(module, settings, Some(psi.tail_depth()));
    let fs = ctx.series_of(psi);
    let k = n + m;
    let mut products = BTreeMap::new();
    let mut put = |i: usize, j: usize, s: VecSeries1| {
        if !s.is_zero() || !s.is_exact() {
            products.insert((i, j), s);
        }
    };
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (vector::unit(n, i), vector::unit(n, j));
            let top = embed(ctx.products().entry(i, j), 0, k);
            put(i, j, top.add(&embed(&fs.apply(&a, &b), n, k)));
        }
        for u in 0..m {
            put(i, n + u, embed(ctx.actions().entry(i, u), n, k));
            put(n + u, i, embed(ctx.right_actions().entry(u, i), n, k));
        }
    }
    let mut names: Vec<String> = alg.names().to_vec();
    names.extend(module.names().iter().map(|s| format!("{s}'")));
    let mut vacuum = alg.vacuum().to_vec();
    vacuum.extend(vector::zeros(m));
    let total = FiniteVertexAlgebra::new(
        names,
        vacuum,
        alg.derivation().block_diag(module.d()),
        Structure::Explicit { products },
    )?;
    let report = check_all(&total, settings);
    Ok(SquareZeroExtension {
        base: alg.clone(),
        fiber: module.clone(),
        cocycle: psi.clone(),
        total,
        report,
    })
}

/// A section `Γ = (1; G)` of the projection onto the first `dim V`
/// coordinates that preserves the vacuum and intertwines the derivations.
pub fn find_section(base: &FiniteVertexAlgebra, total: &FiniteVertexAlgebra) -> Result<QMatrix> {
    let (n, k) = (base.dim(), total.dim());
    if k < n {
        return Err(Error::Section(format!("total has dimension {k} < {n}")));
    }
    let m = k - n;
    if total.vacuum()[..n] != *base.vacuum() {
        return Err(Error::Section(
            "the projection does not map the vacuum to the vacuum".into(),
        ));
    }
    let dl = total.derivation();
    let d = base.derivation();
    for r in 0..n {
        for c in 0..n {
            if m == 0 && dl.get(r, c) != d.get(r, c) {
                return Err(Error::Section(
                    "the projection does not intertwine the derivations".into(),
                ));
            }
        }
    }
    // unknowns G[r][c] at r*n + c
    let unknowns = m * n;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..m {
        let mut row = vector::zeros(unknowns);
        for c in 0..n {
            row[r * n + c] = base.vacuum()[c].clone();
        }
        rows.push(row);
        rhs.push(total.vacuum()[n + r].clone());
    }
    // D_Λ (1; G) = (1; G) D, row blocks over V and over M
    for r in 0..k {
        for c in 0..n {
            let mut row = vector::zeros(unknowns);
            let mut constant = dl.get(r, c).clone();
            for s in 0..m {
                row[s * n + c] = &row[s * n + c] + dl.get(r, n + s);
            }
            if r < n {
                constant -= d.get(r, c);
            } else {
                for j in 0..n {
                    row[(r - n) * n + j] = &row[(r - n) * n + j] - d.get(j, c);
                }
            }
            rows.push(row);
            rhs.push(-constant);
        }
    }
    let matrix = QMatrix::from_rows(unknowns, rows)?;
    let g = solve(&matrix, &rhs)
        .ok_or_else(|| Error::Section("no section preserves the vacuum and intertwines the derivations".into()))?;
    let mut section = canonical_section(n, m);
    for r in 0..m {
        for c in 0..n {
            section.set(n + r, c, g[r * n + c].clone());
        }
    }
    Ok(section)
}

/// Checks the section conditions, listing every one that fails.
pub fn check_section(base: &FiniteVertexAlgebra, total: &FiniteVertexAlgebra, gamma: &QMatrix) -> Result<()> {
    let (n, k) = (base.dim(), total.dim());
    if gamma.rows() != k || gamma.cols() != n {
        return Err(Error::Section(format!("section must be {k} × {n}")));
    }
    let mut failed = Vec::new();
    if (0..n).any(|r| (0..n).any(|c| gamma.get(r, c) != QMatrix::identity(n).get(r, c))) {
        failed.push("p∘Γ ≠ 1");
    }
    if gamma.apply(base.vacuum()) != total.vacuum() {
        failed.push("Γ(1) ≠ 1");
    }
    if total.derivation().mul(gamma) != gamma.mul(base.derivation()) {
        failed.push("Γ∘D ≠ D∘Γ");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Section(failed.join("; ")))
    }
}

/// `ψ_z(a,b) = Γ(a) ⊙_z Γ(b) − Γ(a ⊙_z b)`, read in the kernel coordinates.
pub fn extract_cocycle(ext: &SquareZeroExtension, gamma: &QMatrix, settings: &Settings) -> Result<TwoCochain> {
    check_section(&ext.base, &ext.total, gamma)?;
    let n = ext.base.dim();
    let m = ext.fiber.dim();
    let trunc = settings.trunc;
    let tail = ext.cocycle.tail_depth().max(ext.fiber.pole_order() as usize);
    let ctx = Context::new(&ext.fiber, settings, Some(tail));
    let mut lower = QMatrix::zeros(m, n + m);
    let mut upper = QMatrix::zeros(n, n + m);
    for r in 0..m {
        lower.set(r, n + r, Rational::from_integer(1.into()));
    }
    for r in 0..n {
        upper.set(r, r, Rational::from_integer(1.into()));
    }
    let defect = |i: usize, j: usize| {
        let (ga, gb) = (gamma.column(i), gamma.column(j));
        ext.total.zproduct(&ga, &gb, trunc).sub(
            &ext.base
                .zproduct(&vector::unit(n, i), &vector::unit(n, j), trunc)
                .map_matrix(gamma),
        )
    };
    for i in 0..n {
        for j in 0..n {
            let top = defect(i, j).map_matrix(&upper);
            if !top.is_zero() {
                return Err(Error::Section(format!(
                    "the projection is not multiplicative on ({}, {})",
                    ext.base.names()[i],
                    ext.base.names()[j]
                )));
            }
        }
    }
    ctx.from_series(tail, |i, j| defect(i, j).map_matrix(&lower))
}

/// A 1-cochain `g` whose map `h(a,u) = (a, u + g(a))` is an isomorphism
/// from the extension by `ψ` to the extension by `φ`, verified on the
/// totals; `None` if the classes differ.
pub fn extensions_equivalent(
    psi: &TwoCochain,
    phi: &TwoCochain,
    module: &ModuleStructure,
    settings: &Settings,
) -> Result<Option<OneCochain>> {
    let tail = psi.tail_depth().max(phi.tail_depth());
    let ctx = Context::new(module, settings, Some(tail));
    let Some(g) = same_class(psi, phi, &ctx)? else {
        return Ok(None);
    };
    let (n, m) = (module.algebra().dim(), module.dim());
    let mut h = QMatrix::identity(n + m);
    for r in 0..m {
        for c in 0..n {
            h.set(n + r, c, g.map().get(r, c).clone());
        }
    }
    let from = build_extension(module, psi, settings)?.total;
    let to = build_extension(module, phi, settings)?.total;
    verify_isomorphism(&from, &to, &h, settings.trunc)?;
    Ok(Some(g))
}

fn verify_isomorphism(from: &FiniteVertexAlgebra, to: &FiniteVertexAlgebra, h: &QMatrix, trunc: i64) -> Result<()> {
    if h.apply(from.vacuum()) != to.vacuum() || h.mul(from.derivation()) != to.derivation().mul(h) {
        return Err(Error::Invalid("h does not preserve the vacuum and derivation".into()));
    }
    let k = from.dim();
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (vector::unit(k, i), vector::unit(k, j));
            let lhs = from.zproduct(&a, &b, trunc).map_matrix(h);
            let rhs = to.zproduct(&h.apply(&a), &h.apply(&b), trunc);
            if let Some(e) = lhs.compare(&rhs).first_mismatch {
                return Err(Error::Invalid(format!(
                    "h fails to intertwine the products on ({}, {}) at z^{e}",
                    from.names()[i],
                    from.names()[j]
                )));
            }
        }
    }
    Ok(())
}

/// `a ⋆_z b = a ⊙_z b + t·f_z(a,b)` over dual scalars.
#[derive(Clone, Debug)]
pub struct FirstOrderDeformation {
    pub base: FiniteVertexAlgebra,
    pub cocycle: TwoCochain,
    pub deformed: FiniteVertexAlgebra<DualScalar>,
    pub report: AxiomReport,
}

impl FirstOrderDeformation {
    /// The coefficient of `t` in every basis product.
    pub fn first_order_table(&self) -> BTreeMap<(usize, usize), VecSeries1> {
        let Structure::Explicit { products } = self.deformed.structure() else {
            unreachable!("deformations are tabulated")
        };
        products
            .iter()
            .map(|(&key, s)| {
                (
                    key,
                    s.map_linear(s.dim(), |v| v.iter().map(|x| x.infinitesimal.clone()).collect()),
                )
            })
            .filter(|(_, s)| !s.is_zero() || !s.is_exact())
            .collect()
    }
}

fn lift_dual(s: &VecSeries1, layer: usize) -> VecSeries1<DualScalar> {
    s.map_linear(s.dim(), |v| {
        v.iter()
            .map(|x| match layer {
                0 => DualScalar::real(x.clone()),
                _ => DualScalar::new(Rational::zero(), x.clone()),
            })
            .collect()
    })
}

fn deformed_algebra(
    alg: &FiniteVertexAlgebra,
    f: &TwoCochain,
    settings: &Settings,
) -> Result<FiniteVertexAlgebra<DualScalar>> {
    let n = alg.dim();
    if f.dim_v() != n || f.dim_m() != n {
        return Err(Error::Dimension(format!(
            "a deformation cochain must map {n}×{n} → {n}"
        )));
    }
    let module = ModuleStructure::regular(alg);
    let ctx = Context::new(&module, settings, Some(f.tail_depth()));
    let fs = ctx.series_of(f);
    let mut products = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let s = lift_dual(ctx.products().entry(i, j), 0)
                .add(&lift_dual(&fs.apply(&vector::unit(n, i), &vector::unit(n, j)), 1));
            if !s.is_zero() || !s.is_exact() {
                products.insert((i, j), s);
            }
        }
    }
    FiniteVertexAlgebra::new(
        alg.names().to_vec(),
        alg.vacuum().to_vec(),
        alg.derivation().clone(),
        Structure::Explicit { products },
    )
}

/// The first-order deformation by `f` with its axiom verdicts modulo `t²`.
/// The `t⁰` layer is compared against the base algebra's own witnesses.
pub fn build_deformation(
    alg: &FiniteVertexAlgebra,
    f: &TwoCochain,
    settings: &Settings,
) -> Result<FirstOrderDeformation> {
    let deformed = deformed_algebra(alg, f, settings)?;
    let mut report = check_all(&deformed, settings);
    let base = check_all(alg, settings);
    let reduced = deformed_algebra(alg, &TwoCochain::zero(alg.dim(), alg.dim(), f.tail_depth()), settings)?;
    let layer0 = check_all(&reduced, settings);
    for check in [Check::Associativity, Check::Associator] {
        let exponents =
            |r: &AxiomReport| -> Vec<_> { r.witnesses(check).into_iter().map(|(i, w)| (i, w.exponent)).collect() };
        let (a, b) = (exponents(&base), exponents(&layer0));
        if a != b {
            report.notes.push(format!(
                "{}: the t⁰ layer finds witnesses {:?}, the base algebra {:?}",
                check.name(),
                b.iter().map(|(_, e)| e).collect::<Vec<_>>(),
                a.iter().map(|(_, e)| e).collect::<Vec<_>>()
            ));
        }
    }
    if !base.passed() {
        report
            .notes
            .push("the base algebra itself fails the axiom checks".into());
    }
    Ok(FirstOrderDeformation {
        base: alg.clone(),
        cocycle: f.clone(),
        deformed,
        report,
    })
}

/// `φ_t(v) = v + t·g(v)` on a dual vector.
fn phi_t(g: &OneCochain, v: &[DualScalar]) -> Vec<DualScalar> {
    let real: Vec<Rational> = v.iter().map(|x| x.real.clone()).collect();
    let shift = g.apply(&real);
    v.iter()
        .zip(shift)
        .map(|(x, s)| DualScalar::new(x.real.clone(), &x.infinitesimal + s))
        .collect()
}

/// A 1-cochain `g` with `φ_t = 1 + t·g` intertwining `⋆¹` and `⋆²` modulo
/// `t²`, verified on the deformed products; `None` if the classes differ.
pub fn deformations_equivalent(
    f1: &TwoCochain,
    f2: &TwoCochain,
    alg: &FiniteVertexAlgebra,
    settings: &Settings,
) -> Result<Option<OneCochain>> {
    let module = ModuleStructure::regular(alg);
    let tail = f1.tail_depth().max(f2.tail_depth());
    let ctx = Context::new(&module, settings, Some(tail));
    let Some(g) = same_class(f1, f2, &ctx)? else {
        return Ok(None);
    };
    let star1 = deformed_algebra(alg, f1, settings)?;
    let star2 = deformed_algebra(alg, f2, settings)?;
    let n = alg.dim();
    let trunc = settings.trunc;
    for i in 0..n {
        for j in 0..n {
            let (a, b): (Vec<DualScalar>, Vec<DualScalar>) = (vector::unit(n, i), vector::unit(n, j));
            let lhs = star1.zproduct(&a, &b, trunc).map_linear(n, |v| phi_t(&g, v));
            let rhs = star2.zproduct(&phi_t(&g, &a), &phi_t(&g, &b), trunc);
            if let Some(e) = lhs.compare(&rhs).first_mismatch {
                return Err(Error::Invalid(format!(
                    "φ_t fails to intertwine the products on ({}, {}) at z^{e}",
                    alg.names()[i],
                    alg.names()[j]
                )));
            }
        }
    }
    Ok(Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{one_cochain_basis, Bilinear};
    use crate::fixtures;
    use crate::scalars::q;

    fn xx_one() -> TwoCochain {
        let mut b = Bilinear::zeros(2, 2);
        b.set(1, 1, vec![q(1), q(0)]);
        TwoCochain::from_zero_coeff(b)
    }

    #[test]
    fn dual_numbers_extension() {
        let module = ModuleStructure::regular(&fixtures::dual_numbers());
        let s = Settings::default();
        let ext = build_extension(&module, &xx_one(), &s).unwrap();
        assert_eq!(ext.total.dim(), 4);
        assert!(ext.report.passed(), "{}", ext.report);
        assert!(ext.report.exact());
        assert!(ext.kernel_is_square_zero(s.trunc));
        assert_eq!(extract_cocycle(&ext, &ext.canonical_section(), &s).unwrap(), xx_one());
        assert_eq!(find_section(&ext.base, &ext.total).unwrap(), ext.canonical_section());
    }

    #[test]
    fn section_change_is_a_coboundary() {
        let module = ModuleStructure::regular(&fixtures::dual_numbers());
        let s = Settings::default();
        let ext = build_extension(&module, &xx_one(), &s).unwrap();
        let g = &one_cochain_basis(&module)[0];
        let mut gamma = ext.canonical_section();
        for r in 0..2 {
            for c in 0..2 {
                gamma.set(2 + r, c, g.map().get(r, c).clone());
            }
        }
        let moved = extract_cocycle(&ext, &gamma, &s).unwrap();
        let ctx = Context::new(&module, &s, Some(0));
        assert_eq!(moved, xx_one().add(&ctx.delta1(g).unwrap()));
        assert!(same_class(&moved, &xx_one(), &ctx).unwrap().is_some());
    }

    #[test]
    fn bad_section_is_rejected() {
        let module = ModuleStructure::regular(&fixtures::dual_numbers());
        let s = Settings::default();
        let ext = build_extension(&module, &xx_one(), &s).unwrap();
        let mut gamma = ext.canonical_section();
        gamma.set(2, 0, q(1));
        let err = extract_cocycle(&ext, &gamma, &s).unwrap_err();
        assert!(err.to_string().contains("Γ(1) ≠ 1"), "{err}");
    }

    #[test]
    fn asymmetric_cochain_breaks_commutativity() {
        let module = ModuleStructure::regular(&fixtures::dual_numbers());
        let mut b = Bilinear::zeros(2, 2);
        b.set(1, 0, vec![q(0), q(1)]);
        b.set(0, 1, vec![q(0), q(0)]);
        let f = TwoCochain::from_zero_coeff(b);
        let ext = build_extension(&module, &f, &Settings::default()).unwrap();
        assert!(!ext.report.axiom_passed(Check::Commutativity));
        let def = build_deformation(module.algebra(), &f, &Settings::default()).unwrap();
        let line = def
            .report
            .failures()
            .find(|l| l.axiom == Check::Commutativity)
            .expect("commutativity fails");
        assert!(
            matches!(line.verdict, crate::valg::Verdict::Fail { layer: Some(1), .. }),
            "{line}"
        );
    }

    #[test]
    fn dual_numbers_deformation() {
        let alg = fixtures::dual_numbers();
        let s = Settings::default();
        let def = build_deformation(&alg, &xx_one(), &s).unwrap();
        assert!(def.report.passed(), "{}", def.report);
        assert!(def.report.notes.is_empty(), "{:?}", def.report.notes);
        let zero = TwoCochain::zero(2, 2, 0);
        assert!(deformations_equivalent(&xx_one(), &zero, &alg, &s).unwrap().is_none());
        assert!(
            extensions_equivalent(&xx_one(), &zero, &ModuleStructure::regular(&alg), &s)
                .unwrap()
                .is_none()
        );
        assert_eq!(
            deformations_equivalent(&xx_one(), &xx_one(), &alg, &s).unwrap(),
            Some(OneCochain::zero(2, 2))
        );
    }

    #[test]
    fn coboundary_shift_is_equivalent() {
        let alg = fixtures::truncated_cube();
        let module = ModuleStructure::regular(&alg);
        let s = Settings::default();
        let ctx = Context::new(&module, &s, Some(0));
        let basis = one_cochain_basis(&module);
        let g0 = basis[0].add(&basis[1].scale(&q(-3)));
        let f = crate::cohomology::h2(&module, &s, None).unwrap().two_cochains()[0].clone();
        let shifted = f.add(&ctx.delta1(&g0).unwrap());
        assert!(extensions_equivalent(&shifted, &f, &module, &s).unwrap().is_some());
        assert!(deformations_equivalent(&shifted, &f, &alg, &s).unwrap().is_some());
    }
}
