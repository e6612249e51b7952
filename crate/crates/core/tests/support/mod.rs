//! Shared test helpers: seeded random cochains and a brute-force oracle for
//! commutative algebra tables that does not go through the formal calculus.

#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vertexcoh::cochain::{one_cochain_basis, Bilinear};
use vertexcoh::valg::Structure;
use vertexcoh::{FiniteVertexAlgebra, ModuleStructure, OneCochain, QMatrix, Rational, TwoCochain};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-4..=4);
    let den: i64 = rng.gen_range(1..=3);
    Rational::new(num.into(), den.into())
}

pub fn random_one_cochain(module: &ModuleStructure, rng: &mut ChaCha8Rng) -> OneCochain {
    let (n, m) = (module.algebra().dim(), module.dim());
    let mut g = OneCochain::zero(n, m);
    for b in one_cochain_basis(module) {
        g = g.add(&b.scale(&small_rational(rng)));
    }
    g
}

pub fn random_bilinear(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Bilinear {
    let mut b = Bilinear::zeros(n, m);
    for i in 0..n {
        for j in 0..n {
            b.set(i, j, (0..m).map(|_| small_rational(rng)).collect());
        }
    }
    b
}

/// A random constant-coefficient 2-cochain, almost never a cocycle.
pub fn random_two_cochain(n: usize, m: usize, rng: &mut ChaCha8Rng) -> TwoCochain {
    TwoCochain::from_zero_coeff(random_bilinear(n, m, rng))
}

/// The names shorthand used by the fixture list.
pub const COMMUTATIVE: [&str; 5] = ["field", "dual", "cube", "product", "plane"];

/// A commutative algebra given by raw tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub unit: Vec<Rational>,
    pub mult: Vec<Vec<Vec<Rational>>>,
    /// `deriv[i]` is the image of `e_i`.
    pub deriv: Vec<Vec<Rational>>,
}

impl Table {
    pub fn of(alg: &FiniteVertexAlgebra) -> Table {
        let Structure::Holomorphic { mult } = alg.structure() else {
            panic!("fixture tables are holomorphic")
        };
        let n = alg.dim();
        Table {
            names: alg.names().to_vec(),
            unit: alg.vacuum().to_vec(),
            mult: mult.clone(),
            deriv: (0..n).map(|i| alg.derivation().column(i)).collect(),
        }
    }

    pub fn to_algebra(&self) -> FiniteVertexAlgebra {
        let n = self.names.len();
        let mut d = QMatrix::zeros(n, n);
        for (c, col) in self.deriv.iter().enumerate() {
            for (r, x) in col.iter().enumerate() {
                d.set(r, c, x.clone());
            }
        }
        FiniteVertexAlgebra::new(
            self.names.clone(),
            self.unit.clone(),
            d,
            Structure::Holomorphic {
                mult: self.mult.clone(),
            },
        )
        .unwrap()
    }

    fn mul(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = x.len();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let c = &x[i] * &y[j];
                if c.is_zero() {
                    continue;
                }
                for k in 0..n {
                    out[k] += &c * &self.mult[i][j][k];
                }
            }
        }
        out
    }

    fn d(&self, x: &[Rational]) -> Vec<Rational> {
        let n = x.len();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            for k in 0..n {
                out[k] += &x[i] * &self.deriv[i][k];
            }
        }
        out
    }

    /// Whether the table is a commutative associative unital algebra with
    /// `D` a derivation killing the unit, i.e. a holomorphic vertex algebra.
    pub fn is_valid(&self) -> bool {
        let n = self.names.len();
        let e = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        };
        for i in 0..n {
            if self.mul(&self.unit, &e(i)) != e(i) {
                return false;
            }
            for j in 0..n {
                if self.mult[i][j] != self.mult[j][i] {
                    return false;
                }
                let lhs = self.d(&self.mult[i][j]);
                let a = self.mul(&self.d(&e(i)), &e(j));
                let b = self.mul(&e(i), &self.d(&e(j)));
                let rhs: Vec<Rational> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
                if lhs != rhs {
                    return false;
                }
                for k in 0..n {
                    if self.mul(&self.mult[i][j], &e(k)) != self.mul(&e(i), &self.mult[j][k]) {
                        return false;
                    }
                }
            }
        }
        self.d(&self.unit).iter().all(Zero::is_zero)
    }

    /// Every table obtained by adding 1 to a single coordinate of a single
    /// product entry or derivation image.
    pub fn single_entry_mutations(&self) -> Vec<(String, Table)> {
        let n = self.names.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut t = self.clone();
                    t.mult[i][j][k] += Rational::one();
                    out.push((
                        format!("{}·{} [{}] += 1", self.names[i], self.names[j], self.names[k]),
                        t,
                    ));
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                let mut t = self.clone();
                t.deriv[i][k] += Rational::one();
                out.push((format!("D({}) [{}] += 1", self.names[i], self.names[k]), t));
            }
        }
        out
    }
}
