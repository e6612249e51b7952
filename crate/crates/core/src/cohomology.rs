//! `H⁰`, `H¹` and `H²` of a vertex algebra with coefficients in a module,
//! by exact elimination over the generator coordinates of the cochains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::cochain::{
    c2_residuals, cocycle_rows, delta2_rows, is_cocycle, one_cochain_basis, Context, OneCochain, Residual, TwoCochain,
};
use crate::formal::{fmt_vector, Window};
use crate::harrison::{harrison_h2, CommAlgebra, CommModule};
use crate::linalg::{assemble_columns, complement_basis, kernel_basis, quotient_dim, solve, span_rank, QMatrix};
use crate::scalars::Rational;
use crate::valg::{Check, ModuleStructure, Settings};
use crate::vector;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Representative {
    Element(Vec<Rational>),
    One(OneCochain),
    Two(TwoCochain),
}

/// A computed cohomology group with the data that qualifies it.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyReport {
    pub degree: u8,
    pub dimension: usize,
    pub representatives: Vec<Representative>,
    pub tail_bound: usize,
    pub n_max: Option<usize>,
    pub window: Window,
    pub exact: bool,
    /// Largest cocycle witness over each representative's basis triples.
    pub witnesses: Vec<Option<usize>>,
    pub notes: Vec<String>,
}

impl CohomologyReport {
    pub fn two_cochains(&self) -> Vec<TwoCochain> {
        self.representatives
            .iter()
            .filter_map(|r| match r {
                Representative::Two(f) => Some(f.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn one_cochains(&self) -> Vec<OneCochain> {
        self.representatives
            .iter()
            .filter_map(|r| match r {
                Representative::One(g) => Some(g.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn render(&self, module: &ModuleStructure) -> String {
        let mut out = format!("dim H^{} = {}\n", self.degree, self.dimension);
        out.push_str(&format!(
            "{}; tail bound {}; n_max {}; window {}\n",
            if self.exact {
                "exact"
            } else {
                "verified to truncation order"
            },
            self.tail_bound,
            self.n_max.map_or("-".to_string(), |n| n.to_string()),
            self.window
        ));
        for (i, r) in self.representatives.iter().enumerate() {
            out.push_str(&format!("representative {}:\n", i + 1));
            out.push_str(&render_representative(r, module));
            if let Some(Some(w)) = self.witnesses.get(i) {
                out.push_str(&format!("  cocycle witness n = {w}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    pub fn to_json(&self, module: &ModuleStructure) -> Value {
        let reps: Vec<Value> = self
            .representatives
            .iter()
            .map(|r| Value::String(render_representative(r, module).trim_end().to_string()))
            .collect();
        json!({
            "degree": self.degree,
            "dimension": self.dimension,
            "representatives": reps,
            "tail_bound": self.tail_bound,
            "n_max": self.n_max,
            "window": {
                "low_x": self.window.low_x,
                "high_x": self.window.high_x,
                "low_z": self.window.low_z,
                "high_z": self.window.high_z,
            },
            "exact": self.exact,
            "witnesses": self.witnesses,
            "notes": self.notes,
        })
    }
}

pub fn render_representative(r: &Representative, module: &ModuleStructure) -> String {
    let v_names = module.algebra().names();
    let m_names = module.names();
    let combo = |v: &[Rational]| named_vector(v, m_names);
    match r {
        Representative::Element(v) => format!("  {}\n", combo(v)),
        Representative::One(g) => {
            let mut out = String::new();
            for (a, name) in v_names.iter().enumerate() {
                let image = g.apply(&vector::unit(v_names.len(), a));
                if !vector::is_zero(&image) {
                    out.push_str(&format!("  g({name}) = {}\n", combo(&image)));
                }
            }
            if out.is_empty() {
                out.push_str("  g = 0\n");
            }
            out
        }
        Representative::Two(f) => {
            let mut out = String::new();
            let mut blocks = vec![(0i64, f.zero_coeff())];
            if let Some(t) = f.tail_gen() {
                blocks.insert(0, (-(f.tail_depth() as i64), t));
            }
            for (k, block) in blocks {
                for (a, na) in v_names.iter().enumerate() {
                    for (b, nb) in v_names.iter().enumerate() {
                        let v = block.get(a, b);
                        if !vector::is_zero(v) {
                            out.push_str(&format!("  f^({k})({na}, {nb}) = {}\n", combo(v)));
                        }
                    }
                }
            }
            if out.is_empty() {
                out.push_str("  f = 0\n");
            }
            out
        }
    }
}

/// `2 x - 1/2 y` style rendering in named coordinates.
pub fn named_vector(v: &[Rational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in v.iter().zip(names) {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let negative = c < &Rational::from_integer(0.into());
        let abs = if negative { -c.clone() } else { c.clone() };
        let term = if num_traits::One::is_one(&abs) {
            name.clone()
        } else {
            format!("{abs} {name}")
        };
        match (out.is_empty(), negative) {
            (true, false) => out.push_str(&term),
            (true, true) => out.push_str(&format!("-{term}")),
            (false, false) => out.push_str(&format!(" + {term}")),
            (false, true) => out.push_str(&format!(" - {term}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representative::Element(v) => write!(f, "{}", fmt_vector(v)),
            Representative::One(g) => write!(f, "{g}"),
            Representative::Two(c) => write!(f, "f^(0): {}", c.zero_coeff()),
        }
    }
}

/// `H⁰(V,M) = M`.
pub fn h0(module: &ModuleStructure, settings: &Settings) -> CohomologyReport {
    let m = module.dim();
    CohomologyReport {
        degree: 0,
        dimension: m,
        representatives: (0..m).map(|i| Representative::Element(vector::unit(m, i))).collect(),
        tail_bound: 0,
        n_max: None,
        window: settings.window_for(module.pole_order()),
        exact: true,
        witnesses: Vec::new(),
        notes: Vec::new(),
    }
}

/// Restricts sampled residual columns to the cells every column determines.
fn assemble(columns: Vec<(Residual, Option<BTreeSet<Vec<i64>>>)>) -> (QMatrix, bool) {
    let mut common: Option<BTreeSet<Vec<i64>>> = None;
    for (_, known) in &columns {
        if let Some(k) = known {
            common = Some(match common {
                None => k.clone(),
                Some(c) => c.intersection(k).cloned().collect(),
            });
        }
    }
    let sampled = common.is_some();
    let residuals: Vec<Residual> = columns
        .into_iter()
        .map(|(mut r, _)| {
            if let Some(c) = &common {
                r.retain(|k, _| !is_sampled_tag(k) || c.contains(k));
            }
            r
        })
        .collect();
    (assemble_columns(&residuals), sampled)
}

// only identity rows (cocycle, δ₂, derivation law) are sampled; the
// per-coefficient cochain conditions are always evaluated in full
fn is_sampled_tag(key: &[i64]) -> bool {
    key[0] >= crate::cochain::TAG_COCYCLE
}

/// `δ₁ g` series residuals on all basis pairs, keyed `[tag, a, b, k, m]`.
fn delta1_rows(ctx: &Context, g: &OneCochain) -> (Residual, Option<BTreeSet<Vec<i64>>>) {
    let n = ctx.dim_v();
    let mut res = Residual::new();
    let mut known: Option<BTreeSet<Vec<i64>>> = None;
    for a in 0..n {
        for b in 0..n {
            let s = ctx.delta1_series(g, &vector::unit(n, a), &vector::unit(n, b));
            if let Some(t) = s.trunc() {
                let cells = known.get_or_insert_with(BTreeSet::new);
                for k in s.low().min(0)..=t {
                    for c in 0..ctx.dim_m() {
                        cells.insert(vec![crate::cochain::TAG_COCYCLE, a as i64, b as i64, k, c as i64]);
                    }
                }
            }
            for (k, v) in s.terms() {
                for (c, x) in v.iter().enumerate() {
                    if !num_traits::Zero::is_zero(x) {
                        res.insert(
                            vec![crate::cochain::TAG_COCYCLE, a as i64, b as i64, k, c as i64],
                            x.clone(),
                        );
                    }
                }
            }
        }
    }
    (res, known)
}

/// `H¹(V,M)`: vertex derivations vanishing on the vacuum and intertwining
/// `D` with `d`.
pub fn h1(module: &ModuleStructure, settings: &Settings) -> CohomologyReport {
    let ctx = Context::new(module, settings, Some(0));
    let basis = one_cochain_basis(module);
    let (matrix, sampled) = assemble(basis.iter().map(|g| delta1_rows(&ctx, g)).collect());
    let (n, m) = (ctx.dim_v(), ctx.dim_m());
    let representatives: Vec<Representative> = kernel_basis(&matrix)
        .iter()
        .map(|c| Representative::One(combine_one(&basis, c, n, m)))
        .collect();
    CohomologyReport {
        degree: 1,
        dimension: representatives.len(),
        representatives,
        tail_bound: 0,
        n_max: None,
        window: ctx.window(),
        exact: ctx.exact() && !sampled,
        witnesses: Vec::new(),
        notes: Vec::new(),
    }
}

fn combine_one(basis: &[OneCochain], coeffs: &[Rational], n: usize, m: usize) -> OneCochain {
    let mut g = OneCochain::zero(n, m);
    for (c, b) in coeffs.iter().zip(basis) {
        g = g.add(&b.scale(c));
    }
    g
}

fn unit_cochain(ctx: &Context, t: usize, tail: usize) -> TwoCochain {
    let (n, m) = (ctx.dim_v(), ctx.dim_m());
    let len = TwoCochain::coordinate_count(n, m, tail);
    TwoCochain::from_coords(n, m, tail, &vector::unit(len, t))
}

/// Coordinates of `δ₁` over a basis of `C¹`, padded to the context's tail.
fn coboundaries(ctx: &Context, basis: &[OneCochain]) -> Result<Vec<Vec<Rational>>> {
    basis.iter().map(|g| Ok(ctx.delta1(g)?.coords())).collect()
}

/// Cocycle space under the given condition rows.
fn cocycle_space(
    ctx: &Context,
    tail: usize,
    rows: impl Fn(&TwoCochain) -> (Residual, Option<BTreeSet<Vec<i64>>>),
) -> (Vec<Vec<Rational>>, bool) {
    let count = TwoCochain::coordinate_count(ctx.dim_v(), ctx.dim_m(), tail);
    let columns = (0..count).map(|t| rows(&unit_cochain(ctx, t, tail))).collect();
    let (matrix, sampled) = assemble(columns);
    if count == 0 {
        return (Vec::new(), sampled);
    }
    (kernel_basis(&matrix), sampled)
}

fn merge(
    mut a: (Residual, Option<BTreeSet<Vec<i64>>>),
    b: (Residual, Option<BTreeSet<Vec<i64>>>),
) -> (Residual, Option<BTreeSet<Vec<i64>>>) {
    a.0.extend(b.0);
    let known = match (a.1, b.1) {
        (Some(mut x), Some(y)) => {
            x.extend(y);
            Some(x)
        }
        (x, None) => x,
        (None, y) => y,
    };
    (a.0, known)
}

/// `H²(V,M) = Z²/Im δ₁` relative to the tail bound, with `Z²` solved at the
/// single multiplier exponent `n_max`.
pub fn h2(module: &ModuleStructure, settings: &Settings, tail: Option<usize>) -> Result<CohomologyReport> {
    let ctx = Context::new(module, settings, tail);
    let tail = ctx.tail();
    let n_max = settings.cocycle_bound(ctx.dim_v());
    let (n, m) = (ctx.dim_v(), ctx.dim_m());
    let len = TwoCochain::coordinate_count(n, m, tail);

    let (z, sampled) = cocycle_space(&ctx, tail, |f| {
        let base = (c2_residuals(f, &ctx, None), None);
        merge(base, cocycle_rows(&ctx, f, n_max))
    });
    let basis = one_cochain_basis(module);
    let b = coboundaries(&ctx, &basis)?;
    let dimension = quotient_dim(&z, &b)?;
    let reps_coords = complement_basis(&z, &b);
    let mut all = b.clone();
    all.extend(reps_coords.iter().cloned());
    if span_rank(len, &all) - span_rank(len, &b) != dimension {
        return Err(Error::Containment(
            "representatives are dependent modulo coboundaries".into(),
        ));
    }
    let reps: Vec<TwoCochain> = reps_coords
        .iter()
        .map(|c| TwoCochain::from_coords(n, m, tail, c))
        .collect();

    let mut notes = Vec::new();
    let mut witnesses = Vec::new();
    for (i, f) in reps.iter().enumerate() {
        let report = is_cocycle(f, &ctx);
        if !report.passed() {
            notes.push(format!(
                "representative {} fails the cocycle search: {}",
                i + 1,
                report.summary().trim_end()
            ));
        }
        witnesses.push(report.max_witness(Check::Cocycle));
    }

    let (k2, _) = cocycle_space(&ctx, tail, |f| {
        merge((c2_residuals(f, &ctx, None), None), delta2_rows(&ctx, f))
    });
    match quotient_dim(&k2, &b) {
        Ok(d2) if d2 != dimension || span_rank(len, &k2) != span_rank(len, &z) => notes.push(format!(
            "the δ₂ form gives dim Ker δ₂ = {}, quotient {d2}; the multiplier form gives dim Z² = {}",
            k2.len(),
            z.len()
        )),
        Ok(_) => {
            let mut joint = z.clone();
            joint.extend(k2.iter().cloned());
            if span_rank(len, &joint) != span_rank(len, &z) {
                notes.push("Ker δ₂ and Z² have equal dimension but differ".into());
            }
        }
        Err(e) => notes.push(format!("δ₂ form: {e}")),
    }

    let (z_gen, _) = cocycle_space(&ctx, tail, |f| {
        merge((c2_residuals(f, &ctx, Some(0)), None), cocycle_rows(&ctx, f, n_max))
    });
    if z_gen.len() == z.len() {
        notes.push("symmetry imposed only on generator coefficients k ≤ 0 gives the same Z²".into());
    } else {
        notes.push(format!(
            "symmetry imposed only on generator coefficients k ≤ 0 gives dim Z² = {} instead of {}",
            z_gen.len(),
            z.len()
        ));
    }

    Ok(CohomologyReport {
        degree: 2,
        dimension,
        representatives: reps.into_iter().map(Representative::Two).collect(),
        tail_bound: tail,
        n_max: Some(n_max),
        window: ctx.window(),
        exact: ctx.exact() && !sampled,
        witnesses,
        notes,
    })
}

/// Some `g ∈ C¹` with `δ₁ g = f1 − f2`, or `None` when the classes differ.
pub fn same_class(f1: &TwoCochain, f2: &TwoCochain, ctx: &Context) -> Result<Option<OneCochain>> {
    let module = ctx.module();
    let (n, m) = (ctx.dim_v(), ctx.dim_m());
    let depth = ctx.tail().max(f1.tail_depth()).max(f2.tail_depth());
    let pad = |f: &TwoCochain| {
        f.with_tail_depth(depth)
            .ok_or_else(|| Error::Usage("cochains carry tail generators at different depths".into()))
    };
    let target = pad(f1)?.sub(&pad(f2)?).coords();
    let basis = one_cochain_basis(module);
    let images: Vec<Vec<Rational>> = basis
        .iter()
        .map(|g| Ok(pad(&ctx.delta1(g)?)?.coords()))
        .collect::<Result<_>>()?;
    let matrix = QMatrix::from_columns(target.len(), &images);
    let Some(x) = solve(&matrix, &target) else {
        return Ok(None);
    };
    let g = combine_one(&basis, &x, n, m);
    let check = pad(&ctx.delta1(&g)?)?.coords();
    debug_assert_eq!(check, target);
    Ok(Some(g))
}

/// Coordinates of the class of `f` in the basis given by `reps`, or `None`
/// when `f` is not in their span modulo coboundaries.
pub fn class_coordinates(f: &TwoCochain, reps: &[TwoCochain], ctx: &Context) -> Result<Option<Vec<Rational>>> {
    let depth = reps
        .iter()
        .map(TwoCochain::tail_depth)
        .chain([ctx.tail(), f.tail_depth()])
        .max()
        .unwrap_or(0);
    let pad = |f: &TwoCochain| {
        f.with_tail_depth(depth)
            .ok_or_else(|| Error::Usage("cochains carry tail generators at different depths".into()))
    };
    let target = pad(f)?.coords();
    let mut columns: Vec<Vec<Rational>> = reps.iter().map(|r| pad(r).map(|r| r.coords())).collect::<Result<_>>()?;
    for g in one_cochain_basis(ctx.module()) {
        columns.push(pad(&ctx.delta1(&g)?)?.coords());
    }
    let matrix = QMatrix::from_columns(target.len(), &columns);
    Ok(solve(&matrix, &target).map(|x| x[..reps.len()].to_vec()))
}

/// Agreement between `h2` and the Harrison oracle for a `D = 0`, `d = 0`
/// structure.
#[derive(Clone, Debug, PartialEq)]
pub struct HarrisonComparison {
    pub vertex_dim: usize,
    pub harrison_dim: usize,
    /// For each Harrison representative, its class in the basis of vertex
    /// representatives (`None` if it is not a vertex class).
    pub matches: Vec<Option<Vec<Rational>>>,
    pub agree: bool,
}

impl HarrisonComparison {
    pub fn render(&self) -> String {
        let mut out = format!(
            "dim H^2 (vertex) = {}\ndim H^2 (Harrison) = {}\n",
            self.vertex_dim, self.harrison_dim
        );
        for (i, m) in self.matches.iter().enumerate() {
            match m {
                Some(c) => out.push_str(&format!(
                    "Harrison representative {} = {} in the vertex basis\n",
                    i + 1,
                    fmt_vector(c)
                )),
                None => out.push_str(&format!("Harrison representative {} has no vertex class\n", i + 1)),
            }
        }
        out.push_str(if self.agree { "agree\n" } else { "DISAGREE\n" });
        out
    }
}

pub fn compare_harrison(module: &ModuleStructure, settings: &Settings) -> Result<HarrisonComparison> {
    let comm = CommAlgebra::from_preset(module.algebra())?;
    let comm_module = CommModule::from_module(module, &comm)?;
    let oracle = harrison_h2(&comm, &comm_module)?;
    let vertex = h2(module, settings, Some(0))?;
    let reps = vertex.two_cochains();
    let ctx = Context::new(module, settings, Some(0));
    let (n, m) = (ctx.dim_v(), ctx.dim_m());
    let mut matches = Vec::new();
    for h in &oracle.representatives {
        let f = TwoCochain::from_coords(n, m, 0, h);
        let is_vertex_cocycle = is_cocycle(&f, &ctx).passed();
        matches.push(if is_vertex_cocycle {
            class_coordinates(&f, &reps, &ctx)?
        } else {
            None
        });
    }
    let found: Vec<Vec<Rational>> = matches.iter().flatten().cloned().collect();
    let injective = found.len() == matches.len() && span_rank(reps.len(), &found) == found.len();
    Ok(HarrisonComparison {
        vertex_dim: vertex.dimension,
        harrison_dim: oracle.dimension,
        agree: vertex.dimension == oracle.dimension && injective,
        matches,
    })
}

/// Pairs of basis indices at which two cochain coefficient maps differ.
pub fn differing_pairs(f1: &TwoCochain, f2: &TwoCochain) -> BTreeMap<(usize, usize), (Vec<Rational>, Vec<Rational>)> {
    let mut out = BTreeMap::new();
    let n = f1.dim_v();
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (f1.zero_coeff().get(a, b), f2.zero_coeff().get(a, b));
            if x != y {
                out.insert((a, b), (x.to_vec(), y.to_vec()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Bilinear;
    use crate::fixtures;
    use crate::scalars::q;

    fn regular_h2(alg: &crate::FiniteVertexAlgebra) -> CohomologyReport {
        h2(&ModuleStructure::regular(alg), &Settings::default(), None).unwrap()
    }

    #[test]
    fn h0_examples() {
        let dual = fixtures::dual_numbers();
        assert_eq!(h0(&ModuleStructure::regular(&dual), &Settings::default()).dimension, 2);
        assert_eq!(h0(&ModuleStructure::zero(&dual), &Settings::default()).dimension, 0);
    }

    #[test]
    fn h1_examples() {
        let s = Settings::default();
        assert_eq!(h1(&ModuleStructure::regular(&fixtures::base_field()), &s).dimension, 0);
        assert_eq!(
            h1(&ModuleStructure::regular(&fixtures::dual_numbers()), &s).dimension,
            1
        );
        assert_eq!(
            h1(&ModuleStructure::regular(&fixtures::product_field()), &s).dimension,
            0
        );
    }

    #[test]
    fn h2_dual_numbers() {
        let report = regular_h2(&fixtures::dual_numbers());
        assert_eq!(report.dimension, 1);
        assert!(report.exact);
        let mut expected = Bilinear::zeros(2, 2);
        expected.set(1, 1, vec![q(1), q(0)]);
        assert_eq!(report.two_cochains(), vec![TwoCochain::from_zero_coeff(expected)]);
        assert_eq!(report.witnesses, vec![Some(0)]);
    }

    #[test]
    fn h2_small_cases() {
        assert_eq!(regular_h2(&fixtures::product_field()).dimension, 0);
        assert_eq!(regular_h2(&fixtures::base_field()).dimension, 0);
        let zero = ModuleStructure::zero(&fixtures::truncated_cube_with_derivation());
        assert_eq!(h2(&zero, &Settings::default(), None).unwrap().dimension, 0);
    }

    #[test]
    fn same_class_examples() {
        let dual = fixtures::dual_numbers();
        let module = ModuleStructure::regular(&dual);
        let ctx = Context::new(&module, &Settings::default(), None);
        let mut b = Bilinear::zeros(2, 2);
        b.set(1, 1, vec![q(1), q(0)]);
        let f = TwoCochain::from_zero_coeff(b);
        let zero = TwoCochain::zero(2, 2, 0);
        assert_eq!(same_class(&f, &f, &ctx).unwrap(), Some(OneCochain::zero(2, 2)));
        assert_eq!(same_class(&f, &zero, &ctx).unwrap(), None);
    }
}
