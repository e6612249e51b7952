//! Small helpers for coordinate vectors.

use crate::scalars::{Rational, Scalar};

pub(crate) fn zeros<S: Scalar>(dim: usize) -> Vec<S> {
    vec![S::zero(); dim]
}

pub(crate) fn unit<S: Scalar>(dim: usize, i: usize) -> Vec<S> {
    let mut v = zeros(dim);
    v[i] = S::one();
    v
}

pub(crate) fn is_zero<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub(crate) fn add_assign<S: Scalar>(acc: &mut [S], v: &[S]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.clone() + b.clone();
    }
}

pub(crate) fn sub_assign<S: Scalar>(acc: &mut [S], v: &[S]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.clone() - b.clone();
    }
}

pub(crate) fn add_scaled<S: Scalar>(acc: &mut [S], v: &[S], c: &S) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.clone() + c.clone() * b.clone();
    }
}

pub(crate) fn add_scaled_q<S: Scalar>(acc: &mut [S], v: &[S], c: &Rational) {
    if num_traits::Zero::is_zero(c) {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.clone() + b.scale(c);
    }
}

pub(crate) fn scaled<S: Scalar>(v: &[S], c: &Rational) -> Vec<S> {
    v.iter().map(|x| x.scale(c)).collect()
}

pub(crate) fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = a.to_vec();
    sub_assign(&mut out, b);
    out
}

pub(crate) fn lift<S: Scalar>(v: &[Rational]) -> Vec<S> {
    v.iter().map(S::from_rational).collect()
}
