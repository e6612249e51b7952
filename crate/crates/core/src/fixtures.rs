//! The finite-dimensional test algebras: commutative associative unital
//! algebras with a derivation, presented as holomorphic presets.

use crate::linalg::QMatrix;
use crate::scalars::{q, Rational};
use crate::valg::{FiniteVertexAlgebra, Structure};

/// Builds a preset with vacuum `e_0` from `mult(i, j) = e_i · e_j`.
pub fn holomorphic(
    names: &[&str],
    derivation: QMatrix,
    mult: impl Fn(usize, usize) -> Vec<i64>,
) -> FiniteVertexAlgebra {
    let n = names.len();
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| mult(i, j).into_iter().map(q).collect::<Vec<Rational>>())
                .collect()
        })
        .collect();
    let mut vacuum = vec![q(0); n];
    vacuum[0] = q(1);
    FiniteVertexAlgebra::new(
        names.iter().map(|s| s.to_string()).collect(),
        vacuum,
        derivation,
        Structure::Holomorphic { mult: table },
    )
    .expect("fixture shapes are consistent")
}

fn unit_vec(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Monomial algebra with basis indexed by exponent vectors; products of
/// basis monomials outside the basis vanish.
fn monomial_algebra(names: &[&str], exponents: &[Vec<u32>], derivation: QMatrix) -> FiniteVertexAlgebra {
    let n = names.len();
    holomorphic(names, derivation, |i, j| {
        let sum: Vec<u32> = exponents[i].iter().zip(&exponents[j]).map(|(a, b)| a + b).collect();
        match exponents.iter().position(|e| *e == sum) {
            Some(k) => unit_vec(n, k),
            None => vec![0; n],
        }
    })
}

/// The ground field `k`.
pub fn base_field() -> FiniteVertexAlgebra {
    holomorphic(&["1"], QMatrix::zeros(1, 1), |_, _| vec![1])
}

/// `k[x]/(x²)`.
pub fn dual_numbers() -> FiniteVertexAlgebra {
    monomial_algebra(&["1", "x"], &[vec![0], vec![1]], QMatrix::zeros(2, 2))
}

/// `k[x]/(x³)`.
pub fn truncated_cube() -> FiniteVertexAlgebra {
    monomial_algebra(&["1", "x", "x2"], &[vec![0], vec![1], vec![2]], QMatrix::zeros(3, 3))
}

/// `k × k` with basis `1 = (1,1)` and the idempotent `e = (1,0)`.
pub fn product_field() -> FiniteVertexAlgebra {
    holomorphic(&["1", "e"], QMatrix::zeros(2, 2), |i, j| {
        if i == 0 && j == 0 {
            vec![1, 0]
        } else {
            vec![0, 1]
        }
    })
}

/// `k[x,y]/(x², xy, y²)`.
pub fn square_zero_plane() -> FiniteVertexAlgebra {
    monomial_algebra(
        &["1", "x", "y"],
        &[vec![0, 0], vec![1, 0], vec![0, 1]],
        QMatrix::zeros(3, 3),
    )
}

/// `k[x]/(x³)` with the nilpotent derivation `D(x) = x²`.
pub fn truncated_cube_with_derivation() -> FiniteVertexAlgebra {
    let mut d = QMatrix::zeros(3, 3);
    d.set(2, 1, q(1));
    monomial_algebra(&["1", "x", "x2"], &[vec![0], vec![1], vec![2]], d)
}

/// `k[x]/(x²)` with the non-nilpotent derivation `D(x) = x`; every product
/// involving `x` is an infinite series and checks are truncated.
pub fn dual_numbers_scaling() -> FiniteVertexAlgebra {
    let mut d = QMatrix::zeros(2, 2);
    d.set(1, 1, q(1));
    monomial_algebra(&["1", "x"], &[vec![0], vec![1]], d)
}

/// The five commutative fixtures with `D = 0`.
pub fn commutative() -> Vec<FiniteVertexAlgebra> {
    vec![
        base_field(),
        dual_numbers(),
        truncated_cube(),
        product_field(),
        square_zero_plane(),
    ]
}

/// Every exact fixture: the commutative ones and `k[x]/(x³)` with
/// `D(x) = x²`.
pub fn all() -> Vec<FiniteVertexAlgebra> {
    let mut out = commutative();
    out.push(truncated_cube_with_derivation());
    out
}

/// Short identifiers used by the command line and the test reports.
pub fn by_name(name: &str) -> Option<FiniteVertexAlgebra> {
    Some(match name {
        "field" => base_field(),
        "dual" => dual_numbers(),
        "cube" => truncated_cube(),
        "product" => product_field(),
        "plane" => square_zero_plane(),
        "cube-derivation" => truncated_cube_with_derivation(),
        "dual-scaling" => dual_numbers_scaling(),
        _ => return None,
    })
}

pub const NAMES: [&str; 7] = [
    "field",
    "dual",
    "cube",
    "product",
    "plane",
    "cube-derivation",
    "dual-scaling",
];
