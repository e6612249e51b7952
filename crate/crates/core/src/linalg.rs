//! Dense linear algebra over `ℚ`.
//!
//! Elimination always pivots on the first nonzero entry in column order, so
//! kernel bases and particular solutions are reproducible bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::scalars::{Rational, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from row vectors; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self { rows: n, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Matrix-vector product over any scalar ring.
    pub fn apply<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + x.scale(a);
                    }
                }
                acc
            })
            .collect()
    }

    /// Smallest `p ≥ 1` with `Aᵖ = 0`, if the matrix is nilpotent.
    pub fn nilpotency_index(&self) -> Option<usize> {
        assert_eq!(self.rows, self.cols);
        if self.rows == 0 || self.is_zero() {
            return Some(1);
        }
        let mut power = self.clone();
        for p in 2..=self.rows {
            power = power.mul(self);
            if power.is_zero() {
                return Some(p);
            }
        }
        None
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn block_diag(&self, other: &QMatrix) -> QMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| self.row(i).to_vec())
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Rational::one() / &rows[r][c];
            for x in rows[r].iter_mut().skip(c) {
                *x = &*x * &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !p.is_zero() {
                        *x = &*x - &factor * p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        let reduced = QMatrix::from_rows(self.cols, rows).expect("rows keep their width");
        (reduced, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Basis of `{x : Ax = 0}`, one vector per free column in increasing order.
pub fn kernel_basis(a: &QMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = a.rref();
    let mut is_pivot = vec![false; a.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..a.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![Rational::zero(); a.cols()];
            x[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r.get(i, free).clone();
            }
            x
        })
        .collect()
}

/// Some solution of `Ax = b` (free variables set to zero), or `None` when
/// the system is inconsistent.
pub fn solve(a: &QMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(b.len(), a.rows(), "right-hand side has wrong length");
    let mut augmented = QMatrix::zeros(a.rows(), a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            augmented.set(i, j, a.get(i, j).clone());
        }
        augmented.set(i, a.cols(), b[i].clone());
    }
    let (r, pivots) = augmented.rref();
    if pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = vec![Rational::zero(); a.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, a.cols()).clone();
    }
    Some(x)
}

/// Dimension of the span of `vectors` (all of length `len`).
pub fn span_rank(len: usize, vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    QMatrix::from_rows(len, vectors.to_vec())
        .expect("vectors share a length")
        .rank()
}

/// `dim span(Z) − dim span(B)`, after checking `span(B) ⊆ span(Z)`.
pub fn quotient_dim(z: &[Vec<Rational>], b: &[Vec<Rational>]) -> Result<usize> {
    let len = z.first().or(b.first()).map_or(0, Vec::len);
    let rz = span_rank(len, z);
    let rb = span_rank(len, b);
    let mut both = z.to_vec();
    both.extend_from_slice(b);
    let rboth = span_rank(len, &both);
    if rboth != rz {
        return Err(Error::Containment(format!(
            "rank of Z is {rz}, rank of Z + B is {rboth}"
        )));
    }
    Ok(rz - rb)
}

/// Greedy complement: the vectors of `z`, in order, that are independent of
/// `b` and of the previously chosen ones.
pub fn complement_basis(z: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let len = z.first().or(b.first()).map_or(0, Vec::len);
    let mut chosen: Vec<Vec<Rational>> = b.to_vec();
    let mut rank = span_rank(len, &chosen);
    let mut out = Vec::new();
    for v in z {
        chosen.push(v.clone());
        let r = span_rank(len, &chosen);
        if r > rank {
            rank = r;
            out.push(v.clone());
        } else {
            chosen.pop();
        }
    }
    out
}

/// Assembles sparse columns into a dense matrix with rows in key order.
pub fn assemble_columns<K: Ord + Clone>(columns: &[BTreeMap<K, Rational>]) -> QMatrix {
    let mut keys: BTreeMap<K, usize> = BTreeMap::new();
    for col in columns {
        for k in col.keys() {
            keys.entry(k.clone()).or_insert(0);
        }
    }
    for (i, slot) in keys.values_mut().enumerate() {
        *slot = i;
    }
    let mut m = QMatrix::zeros(keys.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (k, v) in col {
            m.set(keys[k], j, v.clone());
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qf};
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> QMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        QMatrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&QMatrix::identity(3)).is_empty());
        assert_eq!(kernel_basis(&QMatrix::zeros(2, 3)).len(), 3);
        assert_eq!(kernel_basis(&mat(&[&[1, 1]])), vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(1), q(2), q(3)];
        assert_eq!(solve(&QMatrix::identity(3), &b), Some(b.clone()));
        assert_eq!(solve(&mat(&[&[1], &[1]]), &[q(0), q(1)]), None);
        assert_eq!(solve(&mat(&[&[2]]), &[q(1)]), Some(vec![qf(1, 2)]));
    }

    #[test]
    fn quotient_examples() {
        let e = |i: usize| (0..3).map(|j| if i == j { q(1) } else { q(0) }).collect::<Vec<_>>();
        let z = vec![e(0), e(1), e(2)];
        assert_eq!(quotient_dim(&z, &[e(0)]).unwrap(), 2);
        assert_eq!(quotient_dim(&z, &z).unwrap(), 0);
        assert_eq!(quotient_dim(&z, &[]).unwrap(), 3);
        assert!(quotient_dim(&[e(0)], &[e(1)]).is_err());
    }

    #[test]
    fn complement_is_deterministic() {
        let z = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let b = vec![vec![q(0), q(2)]];
        assert_eq!(complement_basis(&z, &b), vec![vec![q(1), q(0)]]);
    }

    #[test]
    fn nilpotency() {
        assert_eq!(mat(&[&[0, 1], &[0, 0]]).nilpotency_index(), Some(2));
        assert_eq!(QMatrix::zeros(2, 2).nilpotency_index(), Some(1));
        assert_eq!(mat(&[&[0, 0], &[0, 1]]).nilpotency_index(), None);
    }

    fn arb_matrix() -> impl Strategy<Value = QMatrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |xs| {
                QMatrix::from_rows(c, xs.chunks(c).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_kernel_solve(a in arb_matrix(), seed in proptest::collection::vec(-3i64..4, 6)) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
            let ker = kernel_basis(&a);
            prop_assert_eq!(ker.len(), a.cols() - a.rank());
            for x in &ker {
                prop_assert!(a.apply(x).iter().all(Zero::is_zero));
            }
            let x0: Vec<Rational> = seed.iter().take(a.cols()).map(|&v| q(v)).collect();
            let b = a.apply(&x0);
            let x = solve(&a, &b).expect("consistent by construction");
            prop_assert_eq!(a.apply(&x), b);
        }
    }
}
