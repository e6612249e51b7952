//! Finite-dimensional vertex algebras and modules, their `z`-products, the
//! right action, and the axiom checkers.
//!
//! A structure is either a holomorphic preset `a ⊙_z b = (e^{zD}a)·b` given
//! by a multiplication table, or an explicit table of Laurent polynomials
//! `e_i ⊙_z e_j`. Checks run over basis triples; bilinearity extends every
//! verdict to arbitrary vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::formal::{
    apply_exp, compare_bivariate, fmt_vector, Bivariate, Expansion, SeriesComparison, Validity, VecSeries1, Window,
    ZeroCheck,
};
use crate::linalg::QMatrix;
use crate::scalars::{binom_unchecked, sign, Rational, Scalar};
use crate::vector;
use crate::{Error, Result};

/// Search bounds and expansion orders shared by all checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Associativity / locality witness bound; default `2·dim + 4`.
    pub l_max: Option<usize>,
    /// Cocycle witness bound; defaults to the associativity bound.
    pub n_max: Option<usize>,
    /// Truncation order for non-nilpotent exponentials.
    pub trunc: i64,
    /// Sampling window for checks that are not exhaustive.
    pub window: Option<Window>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            l_max: None,
            n_max: None,
            trunc: 8,
            window: None,
        }
    }
}

impl Settings {
    pub fn witness_bound(&self, dim: usize) -> usize {
        self.l_max.unwrap_or(2 * dim + 4)
    }

    pub fn cocycle_bound(&self, dim: usize) -> usize {
        self.n_max.unwrap_or_else(|| self.witness_bound(dim))
    }

    /// The configured window, or a symmetric one wide enough for the pole
    /// order at hand.
    pub fn window_for(&self, pole: i64) -> Window {
        self.window.unwrap_or_else(|| {
            let r = self.trunc + 2 * pole + 2;
            Window::symmetric(r, r)
        })
    }
}

/// How basis products are given.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure<S = Rational> {
    /// `mult[i][j] = e_i · e_j`; the product is `(e^{zD}a)·b`.
    Holomorphic { mult: Vec<Vec<Vec<S>>> },
    /// `e_i ⊙_z e_j` for the listed pairs; unlisted pairs are zero.
    Explicit {
        products: BTreeMap<(usize, usize), VecSeries1<S>>,
    },
}

impl<S: Scalar> Structure<S> {
    /// Largest pole order among the tabulated series (0 for presets).
    pub fn pole_order(&self) -> i64 {
        match self {
            Structure::Holomorphic { .. } => 0,
            Structure::Explicit { products } => products
                .values()
                .filter_map(VecSeries1::order)
                .map(|k| -k)
                .max()
                .unwrap_or(0)
                .max(0),
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        matches!(self, Structure::Holomorphic { .. })
    }

    fn check_shape(&self, left: usize, right: usize, out: usize) -> Result<()> {
        match self {
            Structure::Holomorphic { mult } => {
                if mult.len() != left || mult.iter().any(|row| row.len() != right) {
                    return Err(Error::Dimension(format!(
                        "multiplication table must be {left} × {right}"
                    )));
                }
                if mult.iter().flatten().any(|v| v.len() != out) {
                    return Err(Error::Dimension(format!("table entries must have length {out}")));
                }
            }
            Structure::Explicit { products } => {
                for (&(i, j), s) in products {
                    if i >= left || j >= right || s.dim() != out {
                        return Err(Error::Dimension(format!(
                            "product entry ({i}, {j}) outside a {left} × {right} table of {out}-vectors"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `a ⊙_z b` where `t` acts on the left factor.
    fn product(&self, t: &QMatrix, out: usize, a: &[S], b: &[S], trunc: i64) -> VecSeries1<S> {
        match self {
            Structure::Holomorphic { mult } => apply_exp(t, a, trunc).map_linear(out, |u| table_mul(mult, out, u, b)),
            Structure::Explicit { products } => {
                let mut acc: BTreeMap<i64, Vec<S>> = BTreeMap::new();
                let mut trunc = None;
                let mut low = 0;
                for (&(i, j), s) in products {
                    let c = a[i].clone() * b[j].clone();
                    if c.is_zero() {
                        continue;
                    }
                    trunc = crate::formal::min_opt(trunc, s.trunc());
                    low = low.min(s.low());
                    for (k, v) in s.terms() {
                        let e = acc.entry(k).or_insert_with(|| vector::zeros(out));
                        vector::add_scaled(e, v, &c);
                    }
                }
                VecSeries1::from_map(out, acc, low, trunc)
            }
        }
    }
}

fn table_mul<S: Scalar>(mult: &[Vec<Vec<S>>], out: usize, a: &[S], b: &[S]) -> Vec<S> {
    let mut acc = vector::zeros(out);
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            vector::add_scaled(&mut acc, &mult[i][j], &(ai.clone() * bj.clone()));
        }
    }
    acc
}

/// A finite-dimensional vertex algebra: vacuum, derivation `D`, and a
/// `z`-product with coefficients in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVertexAlgebra<S = Rational> {
    names: Vec<String>,
    vacuum: Vec<Rational>,
    derivation: QMatrix,
    structure: Structure<S>,
}

impl<S: Scalar> FiniteVertexAlgebra<S> {
    /// Checks shapes only; see [`FiniteVertexAlgebra::validate_preset`] and
    /// [`check_axioms`] for the algebraic conditions.
    pub fn new(
        names: Vec<String>,
        vacuum: Vec<Rational>,
        derivation: QMatrix,
        structure: Structure<S>,
    ) -> Result<Self> {
        let dim = names.len();
        if dim == 0 {
            return Err(Error::Dimension("a vertex algebra needs a nonempty basis".into()));
        }
        if vacuum.len() != dim {
            return Err(Error::Dimension(format!(
                "vacuum has {} coordinates, basis has {dim}",
                vacuum.len()
            )));
        }
        if derivation.rows() != dim || derivation.cols() != dim {
            return Err(Error::Dimension(format!("derivation must be {dim} × {dim}")));
        }
        structure.check_shape(dim, dim, dim)?;
        Ok(Self {
            names,
            vacuum,
            derivation,
            structure,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vacuum(&self) -> &[Rational] {
        &self.vacuum
    }

    pub fn derivation(&self) -> &QMatrix {
        &self.derivation
    }

    pub fn structure(&self) -> &Structure<S> {
        &self.structure
    }

    pub fn pole_order(&self) -> i64 {
        self.structure.pole_order()
    }

    /// Whether `D` is nilpotent and the tables are exact, so that every
    /// product is a Laurent polynomial.
    pub fn is_exact(&self) -> bool {
        let tables_exact = match &self.structure {
            Structure::Holomorphic { .. } => true,
            Structure::Explicit { products } => products.values().all(VecSeries1::is_exact),
        };
        tables_exact && self.derivation.nilpotency_index().is_some()
    }

    /// `a ⊙_z b`.
    pub fn zproduct(&self, a: &[S], b: &[S], trunc: i64) -> VecSeries1<S> {
        self.structure.product(&self.derivation, self.dim(), a, b, trunc)
    }

    /// `e_i ⊙_z e_j` for all basis pairs.
    pub fn products(&self, trunc: i64) -> ProductTable<S> {
        let n = self.dim();
        ProductTable::build(n, n, n, |i, j| {
            self.zproduct(&vector::unit(n, i), &vector::unit(n, j), trunc)
        })
    }

    pub fn basis(&self, i: usize) -> Vec<S> {
        vector::unit(self.dim(), i)
    }

    pub fn vacuum_vector(&self) -> Vec<S> {
        vector::lift(&self.vacuum)
    }

    /// Finite table scans for a holomorphic preset: commutative,
    /// associative, unital, and `D` a derivation of the product.
    pub fn validate_preset(&self) -> Result<()> {
        let Structure::Holomorphic { mult } = &self.structure else {
            return Ok(());
        };
        let n = self.dim();
        let one = self.vacuum_vector();
        let name = |i: usize| &self.names[i];
        for i in 0..n {
            for j in 0..n {
                if mult[i][j] != mult[j][i] {
                    return Err(Error::Invalid(format!(
                        "multiplication is not commutative at ({}, {})",
                        name(i),
                        name(j)
                    )));
                }
            }
        }
        for i in 0..n {
            let e = self.basis(i);
            if table_mul(mult, n, &one, &e) != e {
                return Err(Error::Invalid(format!(
                    "vacuum is not a unit: 1·{} ≠ {}",
                    name(i),
                    name(i)
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = table_mul(mult, n, &mult[i][j], &self.basis(k));
                    let rhs = table_mul(mult, n, &self.basis(i), &mult[j][k]);
                    if lhs != rhs {
                        return Err(Error::Invalid(format!(
                            "multiplication is not associative at ({}, {}, {})",
                            name(i),
                            name(j),
                            name(k)
                        )));
                    }
                }
            }
        }
        let d = &self.derivation;
        for i in 0..n {
            for j in 0..n {
                let lhs = d.apply(&mult[i][j]);
                let mut rhs = table_mul(mult, n, &d.apply(&self.basis(i)), &self.basis(j));
                vector::add_assign(&mut rhs, &table_mul(mult, n, &self.basis(i), &d.apply(&self.basis(j))));
                if lhs != rhs {
                    return Err(Error::Invalid(format!(
                        "D violates the Leibniz rule at ({}, {})",
                        name(i),
                        name(j)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A module `M` over a rational vertex algebra, with endomorphism `d` and
/// action `a ⊙_z u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleStructure {
    algebra: FiniteVertexAlgebra,
    names: Vec<String>,
    d: QMatrix,
    action: Structure,
}

impl ModuleStructure {
    pub fn new(algebra: FiniteVertexAlgebra, names: Vec<String>, d: QMatrix, action: Structure) -> Result<Self> {
        let m = names.len();
        if d.rows() != m || d.cols() != m {
            return Err(Error::Dimension(format!("module endomorphism must be {m} × {m}")));
        }
        action.check_shape(algebra.dim(), m, m)?;
        Ok(Self {
            algebra,
            names,
            d,
            action,
        })
    }

    /// `V` acting on itself.
    pub fn regular(algebra: &FiniteVertexAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            names: algebra.names().to_vec(),
            d: algebra.derivation().clone(),
            action: algebra.structure().clone(),
        }
    }

    pub fn zero(algebra: &FiniteVertexAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            names: Vec::new(),
            d: QMatrix::zeros(0, 0),
            action: Structure::Holomorphic {
                mult: vec![Vec::new(); algebra.dim()],
            },
        }
    }

    pub fn algebra(&self) -> &FiniteVertexAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn d(&self) -> &QMatrix {
        &self.d
    }

    pub fn action(&self) -> &Structure {
        &self.action
    }

    pub fn pole_order(&self) -> i64 {
        self.algebra.pole_order().max(self.action.pole_order())
    }

    pub fn is_exact(&self) -> bool {
        let action_exact = match &self.action {
            Structure::Holomorphic { .. } => true,
            Structure::Explicit { products } => products.values().all(VecSeries1::is_exact),
        };
        action_exact && self.algebra.is_exact() && self.d.nilpotency_index().is_some()
    }

    /// `a ⊙_z u`.
    pub fn module_action(&self, a: &[Rational], u: &[Rational], trunc: i64) -> VecSeries1 {
        self.action.product(self.algebra.derivation(), self.dim(), a, u, trunc)
    }

    /// `m ⊙_z a = e^{zd}(a ⊙_{-z} m)`.
    pub fn right_action(&self, m: &[Rational], a: &[Rational], trunc: i64) -> VecSeries1 {
        self.module_action(a, m, trunc)
            .negate_variable()
            .exp_mul(&self.d, trunc)
    }

    pub fn actions(&self, trunc: i64) -> ProductTable {
        let (n, m) = (self.algebra.dim(), self.dim());
        ProductTable::build(n, m, m, |i, j| {
            self.module_action(&vector::unit(n, i), &vector::unit(m, j), trunc)
        })
    }

    /// `e_m ⊙_z e_a` in the right action, indexed `(module, algebra)`.
    pub fn right_actions(&self, trunc: i64) -> ProductTable {
        let (n, m) = (self.algebra.dim(), self.dim());
        ProductTable::build(m, n, m, |i, j| {
            self.right_action(&vector::unit(m, i), &vector::unit(n, j), trunc)
        })
    }

    /// Table scans for a holomorphic action: unital, associative and
    /// compatible with `d`.
    pub fn validate_preset(&self) -> Result<()> {
        let (Structure::Holomorphic { mult: act }, Structure::Holomorphic { mult }) =
            (&self.action, self.algebra.structure())
        else {
            return Ok(());
        };
        let (n, m) = (self.algebra.dim(), self.dim());
        let one = self.algebra.vacuum_vector();
        let unit = |k: usize| vector::unit::<Rational>(m, k);
        let alg = |k: usize| vector::unit::<Rational>(n, k);
        for u in 0..m {
            if table_mul(act, m, &one, &unit(u)) != unit(u) {
                return Err(Error::Invalid(format!(
                    "vacuum does not act as the identity on {}",
                    self.names[u]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for u in 0..m {
                    let lhs = table_mul(act, m, &mult[i][j], &unit(u));
                    let rhs = table_mul(act, m, &alg(i), &act[j][u]);
                    if lhs != rhs {
                        return Err(Error::Invalid(format!(
                            "action is not associative at ({}, {}, {})",
                            self.algebra.names()[i],
                            self.algebra.names()[j],
                            self.names[u]
                        )));
                    }
                }
            }
        }
        let big_d = self.algebra.derivation();
        for i in 0..n {
            for u in 0..m {
                let lhs = self.d.apply(&act[i][u]);
                let mut rhs = table_mul(act, m, &big_d.apply(&alg(i)), &unit(u));
                vector::add_assign(&mut rhs, &table_mul(act, m, &alg(i), &self.d.apply(&unit(u))));
                if lhs != rhs {
                    return Err(Error::Invalid(format!(
                        "d is not compatible with the action at ({}, {})",
                        self.algebra.names()[i],
                        self.names[u]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Basis-level products `e_i ⊙_z f_j`, extended bilinearly.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTable<S = Rational> {
    left: usize,
    right: usize,
    out: usize,
    entries: Vec<VecSeries1<S>>,
}

impl<S: Scalar> ProductTable<S> {
    fn build(left: usize, right: usize, out: usize, f: impl Fn(usize, usize) -> VecSeries1<S>) -> Self {
        let mut entries = Vec::with_capacity(left * right);
        for i in 0..left {
            for j in 0..right {
                entries.push(f(i, j));
            }
        }
        Self {
            left,
            right,
            out,
            entries,
        }
    }

    pub fn out_dim(&self) -> usize {
        self.out
    }

    pub fn entry(&self, i: usize, j: usize) -> &VecSeries1<S> {
        &self.entries[i * self.right + j]
    }

    /// Lowest exponent any product can carry.
    pub fn low(&self) -> i64 {
        self.entries.iter().map(VecSeries1::low).min().unwrap_or(0)
    }

    pub fn apply(&self, a: &[S], b: &[S]) -> VecSeries1<S> {
        debug_assert_eq!(a.len(), self.left);
        debug_assert_eq!(b.len(), self.right);
        let mut acc: BTreeMap<i64, Vec<S>> = BTreeMap::new();
        let mut trunc = None;
        let mut low = 0;
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai.clone() * bj.clone();
                let e = self.entry(i, j);
                trunc = crate::formal::min_opt(trunc, e.trunc());
                low = low.min(e.low());
                for (k, v) in e.terms() {
                    let slot = acc.entry(k).or_insert_with(|| vector::zeros(self.out));
                    vector::add_scaled(slot, v, &c);
                }
            }
        }
        VecSeries1::from_map(self.out, acc, low, trunc)
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    UnitLeft,
    UnitRight,
    Translation,
    Derivation,
    Commutativity,
    Associativity,
    Associator,
    ModuleUnit,
    ModuleTranslation,
    ModuleDerivation,
    ModuleAssociativity,
    Locality,
    CochainUnit,
    CochainLowerEdge,
    CochainTerminal,
    CochainLeibniz,
    CochainSymmetry,
    Cocycle,
    Delta2,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::UnitLeft => "unit-left",
            Check::UnitRight => "unit-right",
            Check::Translation => "translation",
            Check::Derivation => "derivation",
            Check::Commutativity => "commutativity",
            Check::Associativity => "associativity",
            Check::Associator => "associator",
            Check::ModuleUnit => "module-unit",
            Check::ModuleTranslation => "module-translation",
            Check::ModuleDerivation => "module-derivation",
            Check::ModuleAssociativity => "module-associativity",
            Check::Locality => "locality",
            Check::CochainUnit => "cochain-unit",
            Check::CochainLowerEdge => "cochain-lower-edge",
            Check::CochainTerminal => "cochain-terminal",
            Check::CochainLeibniz => "cochain-leibniz",
            Check::CochainSymmetry => "cochain-symmetry",
            Check::Cocycle => "cocycle",
            Check::Delta2 => "delta2",
        }
    }
}

/// Existential exponent found for a multiplier identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalityWitness {
    pub exponent: usize,
    pub window: Window,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PassExact,
    /// Holds on every coefficient the truncated data determines.
    PassTruncated {
        detail: String,
    },
    /// A coefficient mismatch; `layer` is the order in `t` of the offending
    /// coefficient for deformed products.
    Fail {
        at: String,
        layer: Option<usize>,
    },
    /// No multiplier exponent up to `bound` works.
    NoWitness {
        bound: usize,
        at: Option<String>,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::PassExact | Verdict::PassTruncated { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PassExact => write!(f, "pass exact"),
            Verdict::PassTruncated { detail } => write!(f, "pass to truncation ({detail})"),
            Verdict::Fail { at, layer } => {
                write!(f, "FAIL at {at}")?;
                if let Some(l) = layer {
                    write!(f, " (t^{l} layer)")?;
                }
                Ok(())
            }
            Verdict::NoWitness { bound, at } => {
                write!(f, "FAIL no witness ≤ {bound}")?;
                if let Some(at) = at {
                    write!(f, " (nonzero at {at})")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub axiom: Check,
    pub indices: Vec<usize>,
    pub labels: Vec<String>,
    pub verdict: Verdict,
    pub witness: Option<LocalityWitness>,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}): {}",
            self.axiom.name(),
            self.labels.join(", "),
            self.verdict
        )?;
        if let Some(w) = &self.witness {
            write!(
                f,
                "; witness {} on {}{}",
                w.exponent,
                w.window,
                if w.exact { "" } else { " (truncated)" }
            )?;
        }
        Ok(())
    }
}

/// Per-axiom, per-triple verdicts, sorted by axiom then indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub lines: Vec<CheckLine>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.verdict.passed())
    }

    pub fn exact(&self) -> bool {
        self.lines.iter().all(|l| l.verdict == Verdict::PassExact)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.verdict.passed())
    }

    pub fn axiom_passed(&self, axiom: Check) -> bool {
        self.lines
            .iter()
            .filter(|l| l.axiom == axiom)
            .all(|l| l.verdict.passed())
    }

    pub fn failed_axioms(&self) -> Vec<Check> {
        let mut out: Vec<Check> = self.failures().map(|l| l.axiom).collect();
        out.dedup();
        out
    }

    /// Largest witness exponent recorded for `axiom`.
    pub fn max_witness(&self, axiom: Check) -> Option<usize> {
        self.lines
            .iter()
            .filter(|l| l.axiom == axiom)
            .filter_map(|l| l.witness.map(|w| w.exponent))
            .max()
    }

    pub fn witnesses(&self, axiom: Check) -> Vec<(Vec<usize>, LocalityWitness)> {
        self.lines
            .iter()
            .filter(|l| l.axiom == axiom)
            .filter_map(|l| l.witness.map(|w| (l.indices.clone(), w)))
            .collect()
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.lines.extend(other.lines);
        self.notes.extend(other.notes);
        self.sort();
    }

    pub(crate) fn sort(&mut self) {
        self.lines
            .sort_by(|a, b| (a.axiom, &a.indices).cmp(&(b.axiom, &b.indices)));
    }

    /// One line per axiom with counts, followed by every failing line.
    pub fn summary(&self) -> String {
        let mut by_axiom: BTreeMap<Check, (usize, usize, bool)> = BTreeMap::new();
        for l in &self.lines {
            let e = by_axiom.entry(l.axiom).or_insert((0, 0, true));
            e.0 += 1;
            if l.verdict.passed() {
                e.1 += 1;
            }
            if l.verdict != Verdict::PassExact {
                e.2 = false;
            }
        }
        let mut out = String::new();
        for (axiom, (total, passed, exact)) in by_axiom {
            let status = if passed < total {
                "FAIL"
            } else if exact {
                "pass exact"
            } else {
                "pass to truncation"
            };
            let wit = self
                .max_witness(axiom)
                .map(|w| format!(", max witness {w}"))
                .unwrap_or_default();
            out.push_str(&format!("{}: {status} ({passed}/{total}{wit})\n", axiom.name()));
        }
        for l in self.failures() {
            out.push_str(&format!("  {l}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Verdict helpers
// ---------------------------------------------------------------------------

pub(crate) fn layer_of<S: Scalar>(v: &[S]) -> Option<usize> {
    if !S::LAYERED {
        return None;
    }
    v.iter().filter_map(Scalar::lowest_layer).min()
}

/// Verdict for a one-variable identity `lhs = rhs`.
pub(crate) fn series_verdict<S: Scalar>(lhs: &VecSeries1<S>, rhs: &VecSeries1<S>) -> Verdict {
    let cmp: SeriesComparison = lhs.compare(rhs);
    match cmp.first_mismatch {
        None if cmp.exact => Verdict::PassExact,
        None => Verdict::PassTruncated {
            detail: format!("through z^{}", cmp.checked_up_to.unwrap_or(0)),
        },
        Some(k) => {
            let diff = vector::sub(&lhs.coeff(k).unwrap(), &rhs.coeff(k).unwrap());
            Verdict::Fail {
                at: format!("z^{k}: {}", fmt_vector(&diff)),
                layer: layer_of(&diff),
            }
        }
    }
}

pub(crate) fn monomial_at<S: Scalar>(at: &((i64, i64), Vec<S>)) -> String {
    let ((i, j), v) = at;
    format!("x^{i} z^{j}: {}", fmt_vector(v))
}

/// Verdict for a two-variable zero test without multiplier.
pub(crate) fn zero_verdict<S: Scalar>(check: &ZeroCheck<S>) -> Verdict {
    match (&check.first_nonzero, check.zero, check.exact) {
        (_, true, true) => Verdict::PassExact,
        (_, true, false) => Verdict::PassTruncated {
            detail: truncation_detail(&check.window, &check.validity),
        },
        (Some(at), false, _) => Verdict::Fail {
            at: monomial_at(at),
            layer: layer_of(&at.1),
        },
        (None, false, _) => Verdict::NoWitness {
            bound: 0,
            at: Some(format!("no determined coefficient in {}", check.window)),
        },
    }
}

fn truncation_detail(window: &Window, validity: &Validity) -> String {
    format!("on {window}, {validity}")
}

/// Searches the least exponent `e ≤ bound` with `step^e · diff = 0`.
///
/// A nonzero finite (exact) expression stays nonzero under the multipliers
/// used here, so that case fails immediately.
pub(crate) fn witness_search<S: Scalar>(
    diff: &Bivariate<S>,
    bound: usize,
    window: &Window,
    step: impl Fn(&Bivariate<S>) -> Bivariate<S>,
) -> (Verdict, Option<LocalityWitness>) {
    let mut current = diff.clone();
    let mut last = None;
    for e in 0..=bound {
        let check = current.check_zero(window);
        if check.zero {
            let witness = LocalityWitness {
                exponent: e,
                window: check.window,
                exact: check.exact,
            };
            let verdict = if check.exact {
                Verdict::PassExact
            } else {
                Verdict::PassTruncated {
                    detail: truncation_detail(&check.window, &check.validity),
                }
            };
            return (verdict, Some(witness));
        }
        if check.exact {
            let at = check.first_nonzero.expect("nonzero exact check has a monomial");
            return (
                Verdict::Fail {
                    at: monomial_at(&at),
                    layer: layer_of(&at.1),
                },
                None,
            );
        }
        last = check.first_nonzero;
        if e < bound {
            current = step(&current);
        }
    }
    (
        Verdict::NoWitness {
            bound,
            at: last.as_ref().map(monomial_at),
        },
        None,
    )
}

/// `(x - z)` as a polynomial for [`Bivariate::mul_poly`].
fn x_minus_z() -> Vec<(i64, i64, Rational)> {
    vec![(1, 0, Rational::from_integer(1.into())), (0, 1, sign(1))]
}

/// `(x+z)^n` multiplier step.
pub(crate) fn binomial_step<S: Scalar>(b: &Bivariate<S>) -> Bivariate<S> {
    b.mul_binomial(1)
}

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

pub(crate) struct LineSink<'a> {
    pub(crate) report: AxiomReport,
    pub(crate) names: Vec<&'a [String]>,
}

impl<'a> LineSink<'a> {
    pub(crate) fn push(&mut self, axiom: Check, indices: &[usize], verdict: Verdict, witness: Option<LocalityWitness>) {
        let labels = indices
            .iter()
            .zip(&self.names)
            .map(|(i, names)| names[*i].clone())
            .collect();
        self.report.lines.push(CheckLine {
            axiom,
            indices: indices.to_vec(),
            labels,
            verdict,
            witness,
        });
    }
}

/// `(a ⊙_x b) ⊙_z c` and `a ⊙_{x+z} (b ⊙_z c)` for a product `first` on the
/// left pair and `second` acting on the result.
pub(crate) fn associativity_sides<S: Scalar>(
    first: &ProductTable<S>,
    second: &ProductTable<S>,
    a: &[S],
    b: &[S],
    c: &[S],
) -> (Bivariate<S>, Bivariate<S>) {
    let out = second.out_dim();
    let lhs = Bivariate::nested_first(&first.apply(a, b), out, |v| second.apply(v, c));
    let rhs = Bivariate::shifted(&second.apply(b, c), out, |v| second.apply(a, v));
    (lhs, rhs)
}

/// Every axiom of a vertex algebra on all basis triples.
pub fn check_axioms<S: Scalar>(alg: &FiniteVertexAlgebra<S>, settings: &Settings) -> AxiomReport {
    let n = alg.dim();
    let trunc = settings.trunc;
    let window = settings.window_for(alg.pole_order());
    let bound = settings.witness_bound(n);
    let table = alg.products(trunc);
    let d = alg.derivation();
    let one = alg.vacuum_vector();
    let e = |i: usize| alg.basis(i);
    let de = |i: usize| d.apply(&e(i));
    let mut sink = LineSink {
        report: AxiomReport::default(),
        names: vec![alg.names(), alg.names(), alg.names()],
    };

    for i in 0..n {
        let lhs = table.apply(&one, &e(i));
        sink.push(
            Check::UnitLeft,
            &[i],
            series_verdict(&lhs, &VecSeries1::constant(e(i))),
            None,
        );
        let lhs = table.apply(&e(i), &one);
        let rhs = apply_exp(d, &e(i), trunc);
        sink.push(Check::UnitRight, &[i], series_verdict(&lhs, &rhs), None);
    }
    for i in 0..n {
        for j in 0..n {
            let ab = table.entry(i, j);
            let v = series_verdict(&table.apply(&de(i), &e(j)), &ab.ddz());
            sink.push(Check::Translation, &[i, j], v, None);
            let rhs = table.apply(&de(i), &e(j)).add(&table.apply(&e(i), &de(j)));
            let v = series_verdict(&ab.map_matrix(d), &rhs);
            sink.push(Check::Derivation, &[i, j], v, None);
            let rhs = table.entry(j, i).negate_variable().exp_mul(d, trunc);
            sink.push(Check::Commutativity, &[i, j], series_verdict(ab, &rhs), None);
        }
    }
    sink.report
        .merge(associativity_report(alg, &table, settings, bound, &window));
    sink.report.sort();
    sink.report
}

fn associativity_report<S: Scalar>(
    alg: &FiniteVertexAlgebra<S>,
    table: &ProductTable<S>,
    _settings: &Settings,
    bound: usize,
    window: &Window,
) -> AxiomReport {
    let n = alg.dim();
    let mut sink = LineSink {
        report: AxiomReport::default(),
        names: vec![alg.names(), alg.names(), alg.names()],
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (alg.basis(i), alg.basis(j), alg.basis(k));
                let (lhs, rhs) = associativity_sides(table, table, &a, &b, &c);
                let diff = lhs.sub(&rhs);
                let (verdict, witness) = witness_search(&diff, bound, window, binomial_step);
                sink.push(Check::Associativity, &[i, j, k], verdict, witness);
            }
        }
    }
    sink.report
}

/// The multiplier-free associator formula
/// `(a ⊙_x b) ⊙_z c − a ⊙_{x+z} (b ⊙_z c) = b ⊙_z (a ⊙_{z+x} c − a ⊙_{x+z} c)`.
pub fn check_associator<S: Scalar>(alg: &FiniteVertexAlgebra<S>, settings: &Settings) -> AxiomReport {
    let n = alg.dim();
    let window = settings.window_for(alg.pole_order());
    let table = alg.products(settings.trunc);
    let mut sink = LineSink {
        report: AxiomReport::default(),
        names: vec![alg.names(), alg.names(), alg.names()],
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (alg.basis(i), alg.basis(j), alg.basis(k));
                let (lhs, rhs) = associativity_sides(&table, &table, &a, &b, &c);
                let correction = associator_correction(&table, &table, &a, &b, &c);
                let check = compare_bivariate(&lhs.sub(&rhs), &correction, &window);
                sink.push(Check::Associator, &[i, j, k], zero_verdict(&check), None);
            }
        }
    }
    sink.report
}

/// `b ⊙_z (a ⊙_{z+x} c − a ⊙_{x+z} c)`, with the difference formed first.
pub(crate) fn associator_correction<S: Scalar>(
    ac_table: &ProductTable<S>,
    b_table: &ProductTable<S>,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Bivariate<S> {
    let ac = ac_table.apply(a, c);
    let delta =
        Bivariate::substituted(&ac, Expansion::FirstNonneg).sub(&Bivariate::substituted(&ac, Expansion::SecondNonneg));
    delta.act_second(b_table.out_dim(), |v| b_table.apply(b, v))
}

/// Axioms plus the associator formula, noting any triple on which the two
/// formulations disagree.
pub fn check_all<S: Scalar>(alg: &FiniteVertexAlgebra<S>, settings: &Settings) -> AxiomReport {
    let mut report = check_axioms(alg, settings);
    let associator = check_associator(alg, settings);
    let assoc_verdicts: BTreeMap<Vec<usize>, bool> = report
        .lines
        .iter()
        .filter(|l| l.axiom == Check::Associativity)
        .map(|l| (l.indices.clone(), l.verdict.passed()))
        .collect();
    for l in &associator.lines {
        if assoc_verdicts.get(&l.indices) != Some(&l.verdict.passed()) {
            report.notes.push(format!(
                "associativity and associator formula disagree on ({})",
                l.labels.join(", ")
            ));
        }
    }
    report.merge(associator);
    report
}

/// Module axioms and locality on all basis triples `(a, b, u)`.
pub fn check_module(module: &ModuleStructure, settings: &Settings) -> AxiomReport {
    let alg = module.algebra();
    let (n, m) = (alg.dim(), module.dim());
    let trunc = settings.trunc;
    let window = settings.window_for(module.pole_order());
    let bound = settings.witness_bound(n.max(m));
    let products = alg.products(trunc);
    let actions = module.actions(trunc);
    let big_d = alg.derivation();
    let d = module.d();
    let one = alg.vacuum_vector();
    let ea = |i: usize| vector::unit::<Rational>(n, i);
    let eu = |i: usize| vector::unit::<Rational>(m, i);
    let mut sink = LineSink {
        report: AxiomReport::default(),
        names: vec![alg.names(), alg.names(), module.names()],
    };
    let mut unit_sink = LineSink {
        report: AxiomReport::default(),
        names: vec![module.names()],
    };
    for u in 0..m {
        let v = series_verdict(&actions.apply(&one, &eu(u)), &VecSeries1::constant(eu(u)));
        unit_sink.push(Check::ModuleUnit, &[u], v, None);
    }
    let mut pair_sink = LineSink {
        report: AxiomReport::default(),
        names: vec![alg.names(), module.names()],
    };
    for i in 0..n {
        for u in 0..m {
            let au = actions.entry(i, u);
            let v = series_verdict(&actions.apply(&big_d.apply(&ea(i)), &eu(u)), &au.ddz());
            pair_sink.push(Check::ModuleTranslation, &[i, u], v, None);
            let rhs = actions
                .apply(&big_d.apply(&ea(i)), &eu(u))
                .add(&actions.apply(&ea(i), &d.apply(&eu(u))));
            let v = series_verdict(&au.map_matrix(d), &rhs);
            pair_sink.push(Check::ModuleDerivation, &[i, u], v, None);
        }
    }
    for i in 0..n {
        for j in 0..n {
            for u in 0..m {
                let (a, b, w) = (ea(i), ea(j), eu(u));
                let (lhs, rhs) = associativity_sides(&products, &actions, &a, &b, &w);
                let (verdict, witness) = witness_search(&lhs.sub(&rhs), bound, &window, binomial_step);
                sink.push(Check::ModuleAssociativity, &[i, j, u], verdict, witness);

                // a ⊙_x (b ⊙_z u) and b ⊙_z (a ⊙_x u)
                let ab = Bivariate::nested_second(&actions.apply(&b, &w), m, |v| actions.apply(&a, v));
                let ba = Bivariate::nested_first(&actions.apply(&a, &w), m, |v| actions.apply(&b, v));
                let step = |e: &Bivariate| e.mul_poly(&x_minus_z());
                let (verdict, witness) = witness_search(&ab.sub(&ba), bound, &window, step);
                sink.push(Check::Locality, &[i, j, u], verdict, witness);
            }
        }
    }
    sink.report.merge(pair_sink.report);
    sink.report.merge(unit_sink.report);
    sink.report
}

/// `(x+z)^n` as scalar coefficients for tests and the browser demo.
pub fn binomial_coefficients(n: i64, count: u64) -> Vec<Rational> {
    (0..count).map(|k| binom_unchecked(n, k)).collect()
}
