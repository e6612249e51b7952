//! Exact scalars: arbitrary-precision rationals and dual numbers `a + t·b`
//! with `t² = 0`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// The base field. Always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Coefficient ring of series and structure tables.
///
/// Structure constants, derivations and cochains are rational; the scalar
/// type only varies for deformed products, which carry a first-order
/// infinitesimal.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn scale(&self, q: &Rational) -> Self;

    /// Whether values carry a `t`-adic layer worth reporting.
    const LAYERED: bool = false;

    /// Lowest order in `t` at which the value is nonzero (`None` for zero).
    fn lowest_layer(&self) -> Option<usize>;
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn scale(&self, q: &Rational) -> Self {
        self * q
    }

    fn lowest_layer(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(0)
        }
    }
}

/// Shorthand for an integer rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q` or `p`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse {
        line: 0,
        message: format!("not a rational number: `{text}`"),
    };
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => BigInt::from_str(text).map(Rational::from_integer).map_err(|_| bad()),
    }
}

/// Generalized binomial coefficient `n(n-1)···(n-k+1)/k!`, valid for any
/// integer `n`.
pub fn binom(n: i64, k: i64) -> Result<Rational, Error> {
    if k < 0 {
        return Err(Error::Usage(format!(
            "binomial coefficient with negative lower index {k}"
        )));
    }
    Ok(binom_unchecked(n, k as u64))
}

pub(crate) fn binom_unchecked(n: i64, k: u64) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n) - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

pub(crate) fn factorial(k: u64) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    Rational::from_integer(acc)
}

/// `(-1)^k`.
pub(crate) fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// `a + t·b` modulo `t²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualScalar {
    pub real: Rational,
    pub infinitesimal: Rational,
}

impl DualScalar {
    pub fn new(real: Rational, infinitesimal: Rational) -> Self {
        Self { real, infinitesimal }
    }

    pub fn real(real: Rational) -> Self {
        Self::new(real, Rational::zero())
    }

    /// The infinitesimal `t`.
    pub fn t() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    /// The ring map `a + t·b ↦ a`.
    pub fn reduce(&self) -> Rational {
        self.real.clone()
    }
}

/// `(a + t·b)(c + t·d) = ac + t(ad + bc)`.
pub fn dual_mul(x: &DualScalar, y: &DualScalar) -> DualScalar {
    DualScalar {
        real: &x.real * &y.real,
        infinitesimal: &x.real * &y.infinitesimal + &x.infinitesimal * &y.real,
    }
}

impl Add for DualScalar {
    type Output = DualScalar;
    fn add(self, rhs: DualScalar) -> DualScalar {
        DualScalar::new(self.real + rhs.real, self.infinitesimal + rhs.infinitesimal)
    }
}

impl Sub for DualScalar {
    type Output = DualScalar;
    fn sub(self, rhs: DualScalar) -> DualScalar {
        DualScalar::new(self.real - rhs.real, self.infinitesimal - rhs.infinitesimal)
    }
}

impl Mul for DualScalar {
    type Output = DualScalar;
    fn mul(self, rhs: DualScalar) -> DualScalar {
        dual_mul(&self, &rhs)
    }
}

impl Neg for DualScalar {
    type Output = DualScalar;
    fn neg(self) -> DualScalar {
        DualScalar::new(-self.real, -self.infinitesimal)
    }
}

impl Zero for DualScalar {
    fn zero() -> Self {
        DualScalar::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.real.is_zero() && self.infinitesimal.is_zero()
    }
}

impl One for DualScalar {
    fn one() -> Self {
        DualScalar::real(Rational::one())
    }
}

impl Scalar for DualScalar {
    const LAYERED: bool = true;

    fn from_rational(q: &Rational) -> Self {
        DualScalar::real(q.clone())
    }

    fn scale(&self, q: &Rational) -> Self {
        DualScalar::new(&self.real * q, &self.infinitesimal * q)
    }

    fn lowest_layer(&self) -> Option<usize> {
        if !self.real.is_zero() {
            Some(0)
        } else if !self.infinitesimal.is_zero() {
            Some(1)
        } else {
            None
        }
    }
}

impl fmt::Display for DualScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.real.is_zero(), self.infinitesimal.is_zero()) {
            (_, true) => write!(f, "{}", self.real),
            (true, false) => write!(f, "{}t", self.infinitesimal),
            (false, false) => {
                if self.infinitesimal.is_negative() {
                    write!(f, "{} - {}t", self.real, -self.infinitesimal.clone())
                } else {
                    write!(f, "{} + {}t", self.real, self.infinitesimal)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| qf(n, d))
    }

    fn arb_dual() -> impl Strategy<Value = DualScalar> {
        (arb_rational(), arb_rational()).prop_map(|(a, b)| DualScalar::new(a, b))
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(3, 2).unwrap(), q(3));
        assert_eq!(binom(-1, 2).unwrap(), q(1));
        for n in -5..5 {
            assert_eq!(binom(n, 0).unwrap(), q(1));
        }
        assert!(binom(4, -1).is_err());
    }

    #[test]
    fn binom_pascal() {
        for n in -10..=10 {
            for k in 1..=10 {
                assert_eq!(
                    binom(n, k).unwrap(),
                    binom(n - 1, k).unwrap() + binom(n - 1, k - 1).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn dual_examples() {
        let c = DualScalar::new(q(4), q(9));
        assert_eq!(dual_mul(&DualScalar::one(), &c), c);
        assert_eq!(dual_mul(&DualScalar::t(), &DualScalar::t()), DualScalar::zero());
        assert_eq!(
            dual_mul(&DualScalar::new(q(2), q(3)), &DualScalar::new(q(5), q(7))),
            DualScalar::new(q(10), q(29))
        );
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(qf(-3, 2).to_string(), "-3/2");
        assert_eq!(q(5).to_string(), "5");
        assert_eq!(DualScalar::new(q(2), q(-1)).to_string(), "2 - 1t");
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !a.is_zero() {
                prop_assert_eq!(&a / &a, q(1));
            }
            let s = &a + &b;
            prop_assert!(num_integer::Integer::gcd(s.numer(), s.denom()).is_one());
            prop_assert!(s.denom().is_positive());
        }

        #[test]
        fn dual_ring_laws(x in arb_dual(), y in arb_dual(), z in arb_dual()) {
            prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
            prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
            prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
            // reduction mod t is a ring homomorphism
            prop_assert_eq!((x.clone() * y.clone()).reduce(), x.reduce() * y.reduce());
            prop_assert_eq!((x.clone() + y.clone()).reduce(), x.reduce() + y.reduce());
        }
    }
}
