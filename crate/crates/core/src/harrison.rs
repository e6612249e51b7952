//! Harrison cohomology of commutative associative algebras in low degree,
//! computed directly from multiplication tables.
//!
//! This module only uses [`crate::linalg`]; it serves as an oracle for the
//! `D = 0` case of the vertex-algebra computation.

use num_traits::{One, Zero};

use crate::linalg::{complement_basis, kernel_basis, quotient_dim, QMatrix};
use crate::scalars::Rational;
use crate::valg::{FiniteVertexAlgebra, ModuleStructure, Structure};
use crate::{Error, Result};

type Table = Vec<Vec<Vec<Rational>>>;

/// A commutative associative unital algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct CommAlgebra {
    unit: Vec<Rational>,
    mult: Table,
}

/// A module over a [`CommAlgebra`]: `action[a][u] = e_a · f_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommModule {
    dim: usize,
    action: Table,
}

fn bilinear(table: &Table, out: usize, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); out];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let c = xi * yj;
            for (slot, v) in acc.iter_mut().zip(&table[i][j]) {
                *slot += &c * v;
            }
        }
    }
    acc
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

impl CommAlgebra {
    pub fn new(unit: Vec<Rational>, mult: Table) -> Result<Self> {
        let n = unit.len();
        if mult.len() != n || mult.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return Err(Error::Dimension(format!("multiplication table must be {n} × {n}")));
        }
        let alg = Self { unit, mult };
        for i in 0..n {
            if alg.mul(&alg.unit, &alg.e(i)) != alg.e(i) {
                return Err(Error::Invalid(format!(
                    "unit does not act trivially on basis vector {i}"
                )));
            }
            for j in 0..n {
                if alg.mult[i][j] != alg.mult[j][i] {
                    return Err(Error::Invalid(format!("not commutative at ({i}, {j})")));
                }
                for k in 0..n {
                    let lhs = alg.mul(&alg.mult[i][j], &alg.e(k));
                    let rhs = alg.mul(&alg.e(i), &alg.mult[j][k]);
                    if lhs != rhs {
                        return Err(Error::Invalid(format!("not associative at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// The underlying algebra of a holomorphic preset with `D = 0`.
    pub fn from_preset(alg: &FiniteVertexAlgebra) -> Result<Self> {
        let Structure::Holomorphic { mult } = alg.structure() else {
            return Err(Error::Usage("the Harrison oracle needs a holomorphic preset".into()));
        };
        if !alg.derivation().is_zero() {
            return Err(Error::Usage("the Harrison oracle needs D = 0".into()));
        }
        Self::new(alg.vacuum().to_vec(), mult.clone())
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    fn e(&self, i: usize) -> Vec<Rational> {
        unit(self.dim(), i)
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        bilinear(&self.mult, self.dim(), x, y)
    }

    pub fn regular_module(&self) -> CommModule {
        CommModule {
            dim: self.dim(),
            action: self.mult.clone(),
        }
    }
}

impl CommModule {
    pub fn new(alg: &CommAlgebra, dim: usize, action: Table) -> Result<Self> {
        let n = alg.dim();
        if action.len() != n
            || action
                .iter()
                .any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim))
        {
            return Err(Error::Dimension(format!("action table must be {n} × {dim}")));
        }
        let module = Self { dim, action };
        for u in 0..dim {
            if module.act(&alg.unit, &unit(dim, u)) != unit(dim, u) {
                return Err(Error::Invalid(format!("unit does not act as the identity on {u}")));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = module.act(&alg.mult[i][j], &unit(dim, u));
                    let rhs = module.act(&alg.e(i), &module.action[j][u]);
                    if lhs != rhs {
                        return Err(Error::Invalid(format!("action not associative at ({i}, {j}, {u})")));
                    }
                }
            }
        }
        Ok(module)
    }

    /// The module underlying a holomorphic action with `d = 0`.
    pub fn from_module(module: &ModuleStructure, alg: &CommAlgebra) -> Result<Self> {
        let Structure::Holomorphic { mult } = module.action() else {
            return Err(Error::Usage("the Harrison oracle needs a holomorphic action".into()));
        };
        if !module.d().is_zero() {
            return Err(Error::Usage("the Harrison oracle needs d = 0".into()));
        }
        Self::new(alg, module.dim(), mult.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn act(&self, a: &[Rational], u: &[Rational]) -> Vec<Rational> {
        bilinear(&self.action, self.dim, a, u)
    }
}

/// Dimension and representatives of a Harrison cohomology group.
///
/// Degree-1 representatives are maps `A → M` (row-major `dim M × dim A`
/// coordinates); degree-2 representatives are bilinear maps with
/// coordinates ordered by `(a, b, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarrisonReport {
    pub degree: u8,
    pub dimension: usize,
    pub representatives: Vec<Vec<Rational>>,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
}

/// `f(a, b)` for a coordinate vector ordered by `(a, b, m)`.
fn eval2(f: &[Rational], n: usize, m: usize, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); m];
    for (a, xa) in x.iter().enumerate() {
        for (b, yb) in y.iter().enumerate() {
            let c = xa * yb;
            if c.is_zero() {
                continue;
            }
            for k in 0..m {
                acc[k] += &c * &f[(a * n + b) * m + k];
            }
        }
    }
    acc
}

/// `g(a)` for row-major `dim M × dim A` coordinates.
fn eval1(g: &[Rational], n: usize, m: usize, x: &[Rational]) -> Vec<Rational> {
    (0..m).map(|k| (0..n).map(|a| &g[k * n + a] * &x[a]).sum()).collect()
}

fn sub_assign(acc: &mut [Rational], v: &[Rational]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a -= b;
    }
}

fn add_assign(acc: &mut [Rational], v: &[Rational]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// `(δg)(a, b) = a·g(b) − g(ab) + g(a)·b` on all basis pairs.
fn coboundary(alg: &CommAlgebra, module: &CommModule, g: &[Rational]) -> Vec<Rational> {
    let (n, m) = (alg.dim(), module.dim());
    let mut out = Vec::with_capacity(n * n * m);
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (alg.e(a), alg.e(b));
            let mut v = module.act(&ea, &eval1(g, n, m, &eb));
            sub_assign(&mut v, &eval1(g, n, m, &alg.mul(&ea, &eb)));
            add_assign(&mut v, &module.act(&eb, &eval1(g, n, m, &ea)));
            out.extend(v);
        }
    }
    out
}

/// Normalized maps `g: A → M` with `g(1) = 0`.
fn normalized_one_cochains(alg: &CommAlgebra, module: &CommModule) -> Vec<Vec<Rational>> {
    let (n, m) = (alg.dim(), module.dim());
    let mut rows = Vec::new();
    for k in 0..m {
        let mut row = vec![Rational::zero(); n * m];
        for a in 0..n {
            row[k * n + a] = alg.unit[a].clone();
        }
        rows.push(row);
    }
    kernel_basis(&QMatrix::from_rows(n * m, rows).expect("row length is the unknown count"))
}

/// Residuals of symmetry, normalization and the Harrison cocycle identity.
fn two_cocycle_conditions(alg: &CommAlgebra, module: &CommModule, f: &[Rational]) -> Vec<Rational> {
    let (n, m) = (alg.dim(), module.dim());
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut v = eval2(f, n, m, &alg.e(a), &alg.e(b));
            sub_assign(&mut v, &eval2(f, n, m, &alg.e(b), &alg.e(a)));
            out.extend(v);
        }
        out.extend(eval2(f, n, m, &alg.unit, &alg.e(a)));
        out.extend(eval2(f, n, m, &alg.e(a), &alg.unit));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ea, eb, ec) = (alg.e(a), alg.e(b), alg.e(c));
                let mut v = module.act(&ea, &eval2(f, n, m, &eb, &ec));
                sub_assign(&mut v, &eval2(f, n, m, &alg.mul(&ea, &eb), &ec));
                add_assign(&mut v, &eval2(f, n, m, &ea, &alg.mul(&eb, &ec)));
                sub_assign(&mut v, &module.act(&ec, &eval2(f, n, m, &ea, &eb)));
                out.extend(v);
            }
        }
    }
    out
}

fn matrix_of(unknowns: usize, f: impl Fn(&[Rational]) -> Vec<Rational>) -> QMatrix {
    let columns: Vec<Vec<Rational>> = (0..unknowns).map(|t| f(&unit(unknowns, t))).collect();
    let rows = columns.first().map_or(0, Vec::len);
    QMatrix::from_columns(rows, &columns)
}

/// Second Harrison cohomology: symmetric normalized 2-cocycles modulo
/// coboundaries of normalized 1-cochains.
pub fn harrison_h2(alg: &CommAlgebra, module: &CommModule) -> Result<HarrisonReport> {
    let (n, m) = (alg.dim(), module.dim());
    let unknowns = n * n * m;
    let z = kernel_basis(&matrix_of(unknowns, |f| two_cocycle_conditions(alg, module, f)));
    let b: Vec<Vec<Rational>> = normalized_one_cochains(alg, module)
        .iter()
        .map(|g| coboundary(alg, module, g))
        .collect();
    let dimension = quotient_dim(&z, &b)?;
    Ok(HarrisonReport {
        degree: 2,
        dimension,
        representatives: complement_basis(&z, &b),
        cocycle_dim: z.len(),
        coboundary_dim: crate::linalg::span_rank(unknowns, &b),
    })
}

/// First Harrison cohomology: derivations `A → M` vanishing on the unit.
pub fn harrison_h1(alg: &CommAlgebra, module: &CommModule) -> HarrisonReport {
    let (n, m) = (alg.dim(), module.dim());
    let basis = normalized_one_cochains(alg, module);
    let images: Vec<Vec<Rational>> = basis.iter().map(|g| coboundary(alg, module, g)).collect();
    let rows = n * n * m;
    let kernel = kernel_basis(&QMatrix::from_columns(rows, &images));
    let representatives: Vec<Vec<Rational>> = kernel
        .iter()
        .map(|c| {
            let mut g = vec![Rational::zero(); n * m];
            for (ci, gi) in c.iter().zip(&basis) {
                for (slot, v) in g.iter_mut().zip(gi) {
                    *slot += ci * v;
                }
            }
            g
        })
        .collect();
    HarrisonReport {
        degree: 1,
        dimension: representatives.len(),
        representatives,
        cocycle_dim: kernel.len(),
        coboundary_dim: 0,
    }
}

/// Whether `f` (coordinates `(a, b, m)`) satisfies the Harrison cocycle
/// conditions.
pub fn is_harrison_cocycle(alg: &CommAlgebra, module: &CommModule, f: &[Rational]) -> bool {
    two_cocycle_conditions(alg, module, f).iter().all(Zero::is_zero)
}

/// `δg` for `g` given by row-major `dim M × dim A` coordinates.
pub fn harrison_coboundary(alg: &CommAlgebra, module: &CommModule, g: &[Rational]) -> Vec<Rational> {
    coboundary(alg, module, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalars::q;

    fn regular(alg: &FiniteVertexAlgebra) -> (CommAlgebra, CommModule) {
        let a = CommAlgebra::from_preset(alg).unwrap();
        let m = a.regular_module();
        (a, m)
    }

    #[test]
    fn known_dimensions() {
        let (a, m) = regular(&fixtures::base_field());
        assert_eq!(harrison_h2(&a, &m).unwrap().dimension, 0);
        let (a, m) = regular(&fixtures::product_field());
        assert_eq!(harrison_h2(&a, &m).unwrap().dimension, 0);
        assert_eq!(harrison_h1(&a, &m).dimension, 0);

        let (a, m) = regular(&fixtures::dual_numbers());
        let r = harrison_h2(&a, &m).unwrap();
        assert_eq!((r.dimension, r.cocycle_dim, r.coboundary_dim), (1, 2, 1));
        // f(x, x) = 1
        assert_eq!(
            r.representatives,
            vec![vec![q(0), q(0), q(0), q(0), q(0), q(0), q(1), q(0)]]
        );
        assert_eq!(harrison_h1(&a, &m).dimension, 1);
    }

    #[test]
    fn rejects_non_module() {
        let a = CommAlgebra::from_preset(&fixtures::dual_numbers()).unwrap();
        let action = vec![vec![vec![q(1)]], vec![vec![q(1)]]];
        assert!(CommModule::new(&a, 1, action).is_err());
    }
}
