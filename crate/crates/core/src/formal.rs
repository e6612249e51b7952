//! Vector-valued formal Laurent expansions in one and two variables.
//!
//! Two conventions govern everything here:
//!
//! * `(x+z)^n` is expanded in nonnegative powers of the *second* variable,
//!   `Σ_{k≥0} binom(n,k) x^{n-k} z^k`; `(z+x)^n` in nonnegative powers of `x`.
//! * A series carries its validity. A one-variable series is either exact or
//!   known up to a truncation order; a two-variable quantity records which
//!   coefficients are determined by the data that produced it.
//!
//! Two-variable quantities are first built as [`Bivariate`] sums of terms
//! `x^i z^j (x+z)^k v`. Multiplying by `(x+z)^n` is then just a shift of
//! `k`, and coefficients are read off exactly at the end, so identities
//! multiplied by a binomial never lose coefficients at the window edges.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::linalg::QMatrix;
use crate::scalars::{binom_unchecked, sign, Rational, Scalar};
use crate::vector;
use crate::{Error, Result};

/// Rectangle of exponents `low_x..=high_x` × `low_z..=high_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub low_x: i64,
    pub high_x: i64,
    pub low_z: i64,
    pub high_z: i64,
}

impl Window {
    pub fn new(low_x: i64, high_x: i64, low_z: i64, high_z: i64) -> Result<Self> {
        if low_x > high_x || low_z > high_z {
            return Err(Error::Usage(format!(
                "window bounds out of order: x {low_x}..{high_x}, z {low_z}..{high_z}"
            )));
        }
        Ok(Self {
            low_x,
            high_x,
            low_z,
            high_z,
        })
    }

    /// `[-rx, rx] × [-rz, rz]`.
    pub fn symmetric(rx: i64, rz: i64) -> Self {
        Self {
            low_x: -rx.abs(),
            high_x: rx.abs(),
            low_z: -rz.abs(),
            high_z: rz.abs(),
        }
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        (self.low_x..=self.high_x).contains(&i) && (self.low_z..=self.high_z).contains(&j)
    }

    pub fn hull(&self, other: &Window) -> Window {
        Window {
            low_x: self.low_x.min(other.low_x),
            high_x: self.high_x.max(other.high_x),
            low_z: self.low_z.min(other.low_z),
            high_z: self.high_z.max(other.high_z),
        }
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        Window::new(
            self.low_x.max(other.low_x),
            self.high_x.min(other.high_x),
            self.low_z.max(other.low_z),
            self.high_z.min(other.high_z),
        )
        .ok()
    }

    fn point(i: i64, j: i64) -> Window {
        Window {
            low_x: i,
            high_x: i,
            low_z: j,
            high_z: j,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[x {}..{}, z {}..{}]",
            self.low_x, self.high_x, self.low_z, self.high_z
        )
    }
}

// ---------------------------------------------------------------------------
// One variable
// ---------------------------------------------------------------------------

/// `Σ_k z^k v_k` with `v_k` in a space of dimension `dim`.
///
/// Only nonzero coefficients are stored. With `trunc = Some(t)` the
/// coefficients of `z^k` for `k > t` are unknown; with `None` the series is
/// an exact Laurent polynomial.
#[derive(Clone, Debug)]
pub struct VecSeries1<S = Rational> {
    dim: usize,
    coeffs: BTreeMap<i64, Vec<S>>,
    low: i64,
    trunc: Option<i64>,
}

/// Outcome of comparing two one-variable series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesComparison {
    pub equal: bool,
    /// Both sides exact, so the comparison covered every coefficient.
    pub exact: bool,
    /// Highest exponent compared when not exact.
    pub checked_up_to: Option<i64>,
    pub first_mismatch: Option<i64>,
}

impl<S: PartialEq> PartialEq for VecSeries1<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> VecSeries1<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
            low: 0,
            trunc: None,
        }
    }

    pub fn constant(v: Vec<S>) -> Self {
        Self::monomial(0, v)
    }

    pub fn monomial(k: i64, v: Vec<S>) -> Self {
        let dim = v.len();
        let mut s = Self::zero(dim);
        s.low = k;
        if !vector::is_zero(&v) {
            s.coeffs.insert(k, v);
        }
        s
    }

    /// Collects terms, summing repeated exponents and dropping zeros and
    /// anything beyond `trunc`.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (i64, Vec<S>)>, trunc: Option<i64>) -> Self {
        let mut s = Self::zero(dim);
        s.trunc = trunc;
        let mut low: Option<i64> = None;
        for (k, v) in terms {
            assert_eq!(v.len(), dim, "coefficient has wrong dimension");
            low = Some(low.map_or(k, |l| l.min(k)));
            s.accumulate(k, &v);
        }
        s.low = low.unwrap_or(0).min(s.coeffs.keys().next().copied().unwrap_or(0));
        if let Some(t) = trunc {
            s.low = s.low.min(t);
        }
        s
    }

    /// Builds from already-collected coefficients; `low` must bound them.
    pub(crate) fn from_map(dim: usize, mut coeffs: BTreeMap<i64, Vec<S>>, low: i64, trunc: Option<i64>) -> Self {
        coeffs.retain(|k, v| !vector::is_zero(v) && trunc.is_none_or(|t| *k <= t));
        let low = coeffs.keys().next().map_or(low, |k| low.min(*k));
        Self {
            dim,
            coeffs,
            low,
            trunc,
        }
    }

    fn accumulate(&mut self, k: i64, v: &[S]) {
        if self.trunc.is_some_and(|t| k > t) || vector::is_zero(v) {
            return;
        }
        let entry = self.coeffs.entry(k).or_insert_with(|| vector::zeros(self.dim));
        vector::add_assign(entry, v);
        if vector::is_zero(entry) {
            self.coeffs.remove(&k);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower bound on the exponents that may carry a nonzero coefficient.
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored (nonzero) coefficients in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Vec<S>)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Coefficient of `z^k`, or `None` when it lies beyond the truncation.
    pub fn coeff(&self, k: i64) -> Option<Vec<S>> {
        if self.trunc.is_some_and(|t| k > t) {
            return None;
        }
        Some(self.coeffs.get(&k).cloned().unwrap_or_else(|| vector::zeros(self.dim)))
    }

    pub fn with_trunc(mut self, trunc: Option<i64>) -> Self {
        if let Some(t) = trunc {
            self.coeffs.retain(|k, _| *k <= t);
            self.trunc = Some(self.trunc.map_or(t, |old| old.min(t)));
            self.low = self.low.min(t);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "adding series of different dimension");
        let mut out = self.clone();
        out.trunc = min_opt(self.trunc, other.trunc);
        out.low = self.low.min(other.low);
        if let Some(t) = out.trunc {
            out.coeffs.retain(|k, _| *k <= t);
        }
        for (k, v) in &other.coeffs {
            out.accumulate(*k, v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|v| v.iter().map(|x| -x.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|v| vector::scaled(v, c))
    }

    fn map_coeffs(&self, f: impl Fn(&[S]) -> Vec<S>) -> Self {
        let mut out = Self {
            dim: self.dim,
            coeffs: BTreeMap::new(),
            low: self.low,
            trunc: self.trunc,
        };
        for (k, v) in &self.coeffs {
            out.accumulate(*k, &f(v));
        }
        out
    }

    /// Applies a linear map coefficient-wise.
    pub fn map_linear<T: Scalar>(&self, out_dim: usize, f: impl Fn(&[S]) -> Vec<T>) -> VecSeries1<T> {
        let mut out = VecSeries1 {
            dim: out_dim,
            coeffs: BTreeMap::new(),
            low: self.low,
            trunc: self.trunc,
        };
        for (k, v) in &self.coeffs {
            out.accumulate(*k, &f(v));
        }
        out
    }

    /// Applies a matrix to every coefficient.
    pub fn map_matrix(&self, m: &QMatrix) -> Self {
        self.map_linear(m.rows(), |v| m.apply(v))
    }

    /// Multiplication by `z^n`.
    pub fn mul_pow(&self, n: i64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, v)| (k + n, v.clone())).collect(),
            low: self.low + n,
            trunc: self.trunc.map(|t| t + n),
        }
    }

    /// The substitution `z ↦ -z`.
    pub fn negate_variable(&self) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, vector::scaled(v, &sign(*k))))
                .collect(),
            low: self.low,
            trunc: self.trunc,
        }
    }

    /// `Σ_k z^k F(v_k)` where `F(v)` is itself a series in `z`.
    pub fn compose_series(&self, out_dim: usize, f: impl Fn(&[S]) -> VecSeries1<S>) -> VecSeries1<S> {
        let mut out = VecSeries1::zero(out_dim);
        out.low = i64::MAX;
        out.trunc = self.trunc;
        let mut pieces = Vec::new();
        for (k, v) in &self.coeffs {
            let piece = f(v).mul_pow(*k);
            out.trunc = min_opt(out.trunc, piece.trunc);
            out.low = out.low.min(piece.low);
            pieces.push(piece);
        }
        if out.low == i64::MAX {
            out.low = self.low;
        }
        for piece in pieces {
            for (k, v) in &piece.coeffs {
                out.accumulate(*k, v);
            }
        }
        out
    }

    /// Formal derivative `d/dz`.
    pub fn ddz(&self) -> Self {
        let mut out = Self {
            dim: self.dim,
            coeffs: BTreeMap::new(),
            low: self.low - 1,
            trunc: self.trunc.map(|t| t - 1),
        };
        for (k, v) in &self.coeffs {
            if *k != 0 {
                out.accumulate(k - 1, &vector::scaled(v, &Rational::from_integer((*k).into())));
            }
        }
        out
    }

    /// `e^{zT}` applied to the series: `Σ_k z^k T^k f(z) / k!`.
    pub fn exp_mul(&self, t: &QMatrix, trunc: i64) -> Self {
        self.compose_series(self.dim, |v| apply_exp(t, v, trunc))
    }

    pub fn compare(&self, other: &Self) -> SeriesComparison {
        let bound = min_opt(self.trunc, other.trunc);
        let keys: std::collections::BTreeSet<i64> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        let mismatch = keys
            .into_iter()
            .filter(|k| bound.is_none_or(|b| *k <= b))
            .find(|k| self.coeff(*k) != other.coeff(*k));
        SeriesComparison {
            equal: mismatch.is_none(),
            exact: bound.is_none(),
            checked_up_to: bound,
            first_mismatch: mismatch,
        }
    }
}

impl<S: Scalar> fmt::Display for VecSeries1<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, v) in &self.coeffs {
            let c = fmt_vector(v);
            parts.push(match *k {
                0 => c,
                1 => format!("{c} z"),
                _ => format!("{c} z^{k}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))?;
        if let Some(t) = self.trunc {
            write!(f, " + O(z^{})", t + 1)?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_vector<S: Scalar>(v: &[S]) -> String {
    if v.len() == 1 {
        return v[0].to_string();
    }
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<i64>, d: i64) -> Option<i64> {
    a.map(|x| x.saturating_add(d))
}

/// `e^{zT} v = Σ_k z^k T^k v / k!`.
///
/// Exact when the orbit `v, Tv, T²v, …` reaches zero by step `trunc + 1`;
/// otherwise truncated at `z^trunc`.
pub fn apply_exp<S: Scalar>(t: &QMatrix, v: &[S], trunc: i64) -> VecSeries1<S> {
    let dim = v.len();
    let mut terms = Vec::new();
    let mut current = v.to_vec();
    let mut k: i64 = 0;
    loop {
        if vector::is_zero(&current) {
            return VecSeries1::from_terms(dim, terms, None);
        }
        if k > trunc {
            return VecSeries1::from_terms(dim, terms, Some(trunc));
        }
        terms.push((k, current.clone()));
        k += 1;
        let inv = Rational::one() / Rational::from_integer(k.into());
        current = vector::scaled(&t.apply(&current), &inv);
    }
}

// ---------------------------------------------------------------------------
// Two variables
// ---------------------------------------------------------------------------

/// Which variable carries the nonnegative powers in `(x+z)^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expansion {
    /// `(x+z)^k = Σ_{m≥0} binom(k,m) x^{k-m} z^m`.
    SecondNonneg,
    /// `(z+x)^k = Σ_{m≥0} binom(k,m) z^{k-m} x^m`.
    FirstNonneg,
}

/// Upper bounds describing which coefficients `x^I z^J` are determined:
/// `I ≤ max_x`, `J ≤ max_z`, `I + J ≤ max_sum` (absent bounds are infinite).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Validity {
    pub max_x: Option<i64>,
    pub max_z: Option<i64>,
    pub max_sum: Option<i64>,
}

impl Validity {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn is_exact(&self) -> bool {
        self.max_x.is_none() && self.max_z.is_none() && self.max_sum.is_none()
    }

    pub fn allows(&self, i: i64, j: i64) -> bool {
        self.max_x.is_none_or(|a| i <= a)
            && self.max_z.is_none_or(|b| j <= b)
            && self.max_sum.is_none_or(|c| i + j <= c)
    }

    pub fn meet(&self, other: &Validity) -> Validity {
        Validity {
            max_x: min_opt(self.max_x, other.max_x),
            max_z: min_opt(self.max_z, other.max_z),
            max_sum: min_opt(self.max_sum, other.max_sum),
        }
    }

    fn clip(&self, w: &Window) -> Window {
        Window {
            low_x: w.low_x,
            high_x: self.max_x.map_or(w.high_x, |a| a.min(w.high_x)),
            low_z: w.low_z,
            high_z: self.max_z.map_or(w.high_z, |b| b.min(w.high_z)),
        }
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(a) = self.max_x {
            parts.push(format!("x ≤ {a}"));
        }
        if let Some(b) = self.max_z {
            parts.push(format!("z ≤ {b}"));
        }
        if let Some(c) = self.max_sum {
            parts.push(format!("x+z ≤ {c}"));
        }
        if parts.is_empty() {
            write!(f, "exact")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermKey {
    // i + j + k; every monomial of the term has this total degree
    degree: i64,
    i: i64,
    j: i64,
    k: i64,
    expansion: Expansion,
}

/// Finite sum of terms `x^i z^j (x+z)^k v`, with each binomial expanded
/// according to its [`Expansion`].
#[derive(Clone, Debug, PartialEq)]
pub struct Bivariate<S = Rational> {
    dim: usize,
    terms: BTreeMap<TermKey, Vec<S>>,
    validity: Validity,
}

/// Support of a two-variable expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Empty,
    Finite(Window),
    Infinite,
}

/// Outcome of testing a two-variable quantity for zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCheck<S = Rational> {
    pub zero: bool,
    /// Every coefficient was examined (finite support, exact data).
    pub exact: bool,
    /// Region examined: the full support when exact, otherwise the
    /// requested window clipped to the validity bounds.
    pub window: Window,
    pub validity: Validity,
    pub first_nonzero: Option<((i64, i64), Vec<S>)>,
}

impl<S: Scalar> Bivariate<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
            validity: Validity::exact(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn is_zero_expression(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `x^i z^j (x+z)^k v`.
    pub fn add_term(&mut self, i: i64, j: i64, k: i64, expansion: Expansion, v: &[S]) {
        if vector::is_zero(v) {
            return;
        }
        // nonnegative powers are polynomials: both expansions agree
        let expansion = if k >= 0 { Expansion::SecondNonneg } else { expansion };
        let key = TermKey {
            degree: i + j + k,
            i,
            j,
            k,
            expansion,
        };
        let entry = self.terms.entry(key).or_insert_with(|| vector::zeros(self.dim));
        vector::add_assign(entry, v);
        if vector::is_zero(entry) {
            self.terms.remove(&key);
        }
    }

    /// `Σ_i x^i inner(v_i)(z)` for `outer = Σ_i x^i v_i`.
    pub fn nested_first(outer: &VecSeries1<S>, out_dim: usize, inner: impl Fn(&[S]) -> VecSeries1<S>) -> Self {
        let mut out = Self::zero(out_dim);
        out.validity.max_x = outer.trunc();
        for (i, v) in outer.terms() {
            let s = inner(v);
            out.validity.max_z = min_opt(out.validity.max_z, s.trunc());
            for (j, w) in s.terms() {
                out.add_term(i, j, 0, Expansion::SecondNonneg, w);
            }
        }
        out
    }

    /// `Σ_j z^j inner(v_j)(x)` for `outer = Σ_j z^j v_j`.
    pub fn nested_second(outer: &VecSeries1<S>, out_dim: usize, inner: impl Fn(&[S]) -> VecSeries1<S>) -> Self {
        let mut out = Self::zero(out_dim);
        out.validity.max_z = outer.trunc();
        for (j, v) in outer.terms() {
            let s = inner(v);
            out.validity.max_x = min_opt(out.validity.max_x, s.trunc());
            for (i, w) in s.terms() {
                out.add_term(i, j, 0, Expansion::SecondNonneg, w);
            }
        }
        out
    }

    /// `f(x+z)` (or `f(z+x)`) for a one-variable series `f`.
    pub fn substituted(f: &VecSeries1<S>, expansion: Expansion) -> Self {
        let mut out = Self::zero(f.dim());
        out.validity.max_sum = f.trunc();
        for (k, v) in f.terms() {
            out.add_term(0, 0, k, expansion, v);
        }
        out
    }

    /// `Σ_j z^j inner(v_j)(x+z)` for `outer = Σ_j z^j v_j`, the shape of
    /// `a ⊙_{x+z} (b ⊙_z c)`.
    pub fn shifted(outer: &VecSeries1<S>, out_dim: usize, inner: impl Fn(&[S]) -> VecSeries1<S>) -> Self {
        let mut out = Self::zero(out_dim);
        out.validity.max_z = outer.trunc();
        for (j, v) in outer.terms() {
            let s = inner(v);
            out.validity.max_sum = min_opt(out.validity.max_sum, add_opt(s.trunc(), j));
            for (k, w) in s.terms() {
                out.add_term(0, j, k, Expansion::SecondNonneg, w);
            }
        }
        out
    }

    /// Applies a series-valued linear map in the second variable to every
    /// coefficient: `Σ x^I z^J e_{IJ} ↦ Σ x^I z^J q(e_{IJ})(z)`.
    pub fn act_second(&self, out_dim: usize, q: impl Fn(&[S]) -> VecSeries1<S>) -> Self {
        let mut out = Self::zero(out_dim);
        // lowest power q can produce on any input, including the unknown
        // coefficients excluded by the validity bounds
        let low = (0..self.dim)
            .map(|m| q(&vector::unit(self.dim, m)).low())
            .min()
            .unwrap_or(0);
        out.validity = Validity {
            max_x: self.validity.max_x,
            max_z: add_opt(self.validity.max_z, low),
            max_sum: add_opt(self.validity.max_sum, low),
        };
        for (key, v) in &self.terms {
            let s = q(v);
            if let Some(t) = s.trunc() {
                out.validity.max_sum = min_opt(out.validity.max_sum, Some(key.degree + t));
            }
            for (r, w) in s.terms() {
                out.add_term(key.i, key.j + r, key.k, key.expansion, w);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "adding expressions of different dimension");
        let mut out = self.clone();
        out.validity = self.validity.meet(&other.validity);
        for (key, v) in &other.terms {
            out.add_term(key.i, key.j, key.k, key.expansion, v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.iter().map(|x| -x.clone()).collect()))
                .collect(),
            validity: self.validity,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by `(x+z)^n`, `n ≥ 0`.
    pub fn mul_binomial(&self, n: i64) -> Self {
        assert!(n >= 0, "multiplier exponent must be nonnegative");
        let mut out = Self::zero(self.dim);
        out.validity = Validity {
            max_sum: add_opt(self.validity.max_sum, n),
            ..self.validity
        };
        for (key, v) in &self.terms {
            out.add_term(key.i, key.j, key.k + n, key.expansion, v);
        }
        out
    }

    /// Multiplication by a polynomial `Σ c x^p z^q` with `p, q ≥ 0`.
    pub fn mul_poly(&self, poly: &[(i64, i64, Rational)]) -> Self {
        let mut out = Self::zero(self.dim);
        let min_p = poly.iter().map(|m| m.0).min().unwrap_or(0);
        let min_q = poly.iter().map(|m| m.1).min().unwrap_or(0);
        let min_s = poly.iter().map(|m| m.0 + m.1).min().unwrap_or(0);
        out.validity = Validity {
            max_x: add_opt(self.validity.max_x, min_p),
            max_z: add_opt(self.validity.max_z, min_q),
            max_sum: add_opt(self.validity.max_sum, min_s),
        };
        for (key, v) in &self.terms {
            for (p, q, c) in poly {
                out.add_term(key.i + p, key.j + q, key.k, key.expansion, &vector::scaled(v, c));
            }
        }
        out
    }

    /// Coefficient of `x^I z^J`, or `None` when undetermined.
    pub fn coefficient(&self, i: i64, j: i64) -> Option<Vec<S>> {
        if !self.validity.allows(i, j) {
            return None;
        }
        let degree = i + j;
        let lo = TermKey {
            degree,
            i: i64::MIN,
            j: i64::MIN,
            k: i64::MIN,
            expansion: Expansion::SecondNonneg,
        };
        let hi = TermKey {
            degree,
            i: i64::MAX,
            j: i64::MAX,
            k: i64::MAX,
            expansion: Expansion::FirstNonneg,
        };
        let mut acc = vector::zeros(self.dim);
        for (key, v) in self.terms.range(lo..=hi) {
            let m = match key.expansion {
                Expansion::SecondNonneg => j - key.j,
                Expansion::FirstNonneg => i - key.i,
            };
            if m < 0 || (key.k >= 0 && m > key.k) {
                continue;
            }
            let c = binom_unchecked(key.k, m as u64);
            vector::add_scaled_q(&mut acc, v, &c);
        }
        Some(acc)
    }

    /// Exact data and only polynomial binomials: finitely many monomials.
    pub fn is_finite(&self) -> bool {
        self.validity.is_exact() && self.terms.keys().all(|k| k.k >= 0)
    }

    pub fn support(&self) -> Support {
        if !self.is_finite() {
            return Support::Infinite;
        }
        let mut hull: Option<Window> = None;
        for key in self.terms.keys() {
            let w = Window {
                low_x: key.i,
                high_x: key.i + key.k,
                low_z: key.j,
                high_z: key.j + key.k,
            };
            hull = Some(hull.map_or(w, |h| h.hull(&w)));
        }
        hull.map_or(Support::Empty, Support::Finite)
    }

    /// All monomials of a finite expression.
    pub fn expand_all(&self) -> Option<BTreeMap<(i64, i64), Vec<S>>> {
        if !self.is_finite() {
            return None;
        }
        let mut out: BTreeMap<(i64, i64), Vec<S>> = BTreeMap::new();
        for (key, v) in &self.terms {
            for m in 0..=key.k {
                let c = binom_unchecked(key.k, m as u64);
                let at = (key.i + key.k - m, key.j + m);
                let entry = out.entry(at).or_insert_with(|| vector::zeros(self.dim));
                vector::add_scaled_q(entry, v, &c);
            }
        }
        out.retain(|_, v| !vector::is_zero(v));
        Some(out)
    }

    /// Coefficients on `window` (those the validity bounds determine).
    pub fn to_series(&self, window: &Window) -> VecSeries2<S> {
        let mut coeffs = BTreeMap::new();
        for i in window.low_x..=window.high_x {
            for j in window.low_z..=window.high_z {
                if let Some(v) = self.coefficient(i, j) {
                    if !vector::is_zero(&v) {
                        coeffs.insert((i, j), v);
                    }
                }
            }
        }
        VecSeries2 {
            dim: self.dim,
            coeffs,
            window: *window,
            validity: self.validity,
        }
    }

    /// Zero test: exhaustive on finite expressions, otherwise on the
    /// determined part of `window`.
    pub fn check_zero(&self, window: &Window) -> ZeroCheck<S> {
        if let Some(all) = self.expand_all() {
            let region = match self.support() {
                Support::Finite(w) => w,
                _ => Window::point(0, 0),
            };
            return ZeroCheck {
                zero: all.is_empty(),
                exact: true,
                window: region,
                validity: self.validity,
                first_nonzero: all.into_iter().next(),
            };
        }
        let mut checked = 0usize;
        let mut first = None;
        'scan: for j in window.low_z..=window.high_z {
            for i in window.low_x..=window.high_x {
                if let Some(v) = self.coefficient(i, j) {
                    checked += 1;
                    if !vector::is_zero(&v) {
                        first = Some(((i, j), v));
                        break 'scan;
                    }
                }
            }
        }
        ZeroCheck {
            zero: first.is_none() && checked > 0,
            exact: false,
            window: self.validity.clip(window),
            validity: self.validity,
            first_nonzero: first,
        }
    }
}

/// Compares `lhs` and `rhs`; the reported window covers both supports when
/// they are finite.
pub fn compare_bivariate<S: Scalar>(lhs: &Bivariate<S>, rhs: &Bivariate<S>, window: &Window) -> ZeroCheck<S> {
    let mut check = lhs.sub(rhs).check_zero(window);
    if check.exact {
        let boxes = [lhs.support(), rhs.support()];
        let mut hull: Option<Window> = None;
        for s in boxes {
            if let Support::Finite(w) = s {
                hull = Some(hull.map_or(w, |h| h.hull(&w)));
            }
        }
        if let Some(h) = hull {
            check.window = h;
        }
    }
    check
}

/// Two-variable coefficients `x^I z^J` restricted to a window.
#[derive(Clone, Debug, PartialEq)]
pub struct VecSeries2<S = Rational> {
    dim: usize,
    coeffs: BTreeMap<(i64, i64), Vec<S>>,
    window: Window,
    validity: Validity,
}

impl<S: Scalar> VecSeries2<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn is_known(&self, i: i64, j: i64) -> bool {
        self.window.contains(i, j) && self.validity.allows(i, j)
    }

    pub fn coeff(&self, i: i64, j: i64) -> Option<Vec<S>> {
        if !self.is_known(i, j) {
            return None;
        }
        Some(
            self.coeffs
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| vector::zeros(self.dim)),
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Vec<S>)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn known_count(&self) -> usize {
        let w = &self.window;
        (w.low_x..=w.high_x)
            .flat_map(|i| (w.low_z..=w.high_z).map(move |j| (i, j)))
            .filter(|&(i, j)| self.validity.allows(i, j))
            .count()
    }

    /// Formal `∂/∂x`; the window loses its top `x` row.
    pub fn ddx(&self) -> Self {
        let window = Window {
            high_x: self.window.high_x - 1,
            ..self.window
        };
        let validity = Validity {
            max_x: add_opt(self.validity.max_x, -1),
            max_z: self.validity.max_z,
            max_sum: add_opt(self.validity.max_sum, -1),
        };
        let mut coeffs = BTreeMap::new();
        for ((i, j), v) in &self.coeffs {
            let di = i - 1;
            if *i != 0 && window.contains(di, *j) {
                coeffs.insert((di, *j), vector::scaled(v, &Rational::from_integer((*i).into())));
            }
        }
        Self {
            dim: self.dim,
            coeffs,
            window,
            validity,
        }
    }

    /// Compares on the cells known to both sides. Returns the number of
    /// cells compared and the first disagreement.
    pub fn compare(&self, other: &Self) -> (usize, Option<(i64, i64)>) {
        let Some(w) = self.window.intersect(&other.window) else {
            return (0, None);
        };
        let mut checked = 0;
        for j in w.low_z..=w.high_z {
            for i in w.low_x..=w.high_x {
                if let (Some(a), Some(b)) = (self.coeff(i, j), other.coeff(i, j)) {
                    checked += 1;
                    if a != b {
                        return (checked, Some((i, j)));
                    }
                }
            }
        }
        (checked, None)
    }
}

impl<S: Scalar> fmt::Display for VecSeries2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ordered: Vec<(&(i64, i64), &Vec<S>)> = self.coeffs.iter().collect();
        ordered.sort_by_key(|((i, j), _)| (*j, -*i));
        let mut out = String::new();
        for (n, ((i, j), v)) in ordered.into_iter().enumerate() {
            let mono = monomial_text(*i, *j);
            let (negative, coeff) = if v.len() == 1 {
                let c = &v[0];
                let neg = c.to_string().starts_with('-');
                let abs = if neg { (-c.clone()).to_string() } else { c.to_string() };
                (neg, abs)
            } else {
                (false, fmt_vector(v))
            };
            let body = match (coeff.as_str(), mono.as_str()) {
                (c, "") => c.to_string(),
                ("1", m) if v.len() == 1 => m.to_string(),
                (c, m) => format!("{c} {m}"),
            };
            match (n, negative) {
                (0, false) => out.push_str(&body),
                (0, true) => out.push_str(&format!("-{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        if self.validity.is_exact() {
            write!(f, "{out} (on {})", self.window)
        } else {
            write!(f, "{out} ... valid on {} with {}", self.window, self.validity)
        }
    }
}

fn monomial_text(i: i64, j: i64) -> String {
    let x = match i {
        0 => String::new(),
        1 => "x".into(),
        _ => format!("x^{i}"),
    };
    let z = match j {
        0 => String::new(),
        1 => "z".into(),
        _ => format!("z^{j}"),
    };
    match (x.is_empty(), z.is_empty()) {
        (true, _) => z,
        (_, true) => x,
        _ => format!("{x} {z}"),
    }
}

/// Scalar expansion of `(x+z)^n` on a window.
pub fn expand_binomial(n: i64, window: &Window) -> VecSeries2<Rational> {
    let mut b = Bivariate::zero(1);
    b.add_term(0, 0, n, Expansion::SecondNonneg, &[Rational::one()]);
    b.to_series(window)
}

/// `Σ_k f_k (x+z)^k` on a window.
pub fn substitute_shift<S: Scalar>(f: &VecSeries1<S>, window: &Window) -> Result<VecSeries2<S>> {
    let series = Bivariate::substituted(f, Expansion::SecondNonneg).to_series(window);
    if series.known_count() == 0 {
        return Err(Error::EmptyWindow(*window));
    }
    Ok(series)
}

/// Formal `d/dz` on a one-variable series.
pub fn ddz<S: Scalar>(f: &VecSeries1<S>) -> VecSeries1<S> {
    f.ddz()
}
