//! Exact coefficient domains and dense linear algebra over them.
//!
//! Every domain is a commutative algebra over a finite field `GF(p^n)`. Ring
//! objects carry the context (characteristic, modulus, variable names) and
//! elements are plain values, so a single generic code path serves point
//! evaluation, symbolic charts, truncated curve rings and function fields.

mod finite;
mod function_field;
mod matrix;
pub mod parse;
mod poly;
mod truncated;
mod unipoly;

pub use finite::{Fe, FiniteField, MAX_CHARACTERISTIC, MAX_DEGREE};
pub use function_field::{RatFn, RationalFunctionField};
pub use matrix::{
    bareiss_rank, combinations, determinant, inverse, kernel_basis, minors, rank, rref, Matrix,
};
pub use poly::{Monomial, PolyRing, Polynomial};
pub use truncated::{TruncElem, TruncatedCurveRing};
pub use unipoly::{UniPoly, UniPolyRing};

use std::fmt;

/// A commutative algebra over a finite field of characteristic `p`.
pub trait Ring: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn characteristic(&self) -> u32 {
        self.base_field().characteristic()
    }

    /// The finite field of constants.
    fn base_field(&self) -> &FiniteField;

    /// Image of a constant from `base_field()`.
    fn embed(&self, c: Fe) -> Self::Elem;

    fn scale(&self, c: Fe, a: &Self::Elem) -> Self::Elem {
        self.mul(&self.embed(c), a)
    }

    /// `a^(p^e)`; a ring endomorphism in characteristic `p`.
    fn frobenius(&self, a: &Self::Elem, e: u32) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn fmt_elem(&self, a: &Self::Elem, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn display<'a>(&'a self, a: &'a Self::Elem) -> DisplayElem<'a, Self> {
        DisplayElem { ring: self, elem: a }
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Rank of a matrix over this field. Fields whose elements are
    /// fractions override this with a fraction-free route.
    fn matrix_rank(&self, m: &Matrix<Self::Elem>) -> usize {
        matrix::gaussian_rank(self, m)
    }
}

/// An integral domain with exact division, as needed by Bareiss elimination.
pub trait IntegralDomain: Ring {
    /// `a / b` when `b` divides `a` exactly.
    fn exact_div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
}

pub struct DisplayElem<'a, R: Ring + ?Sized> {
    ring: &'a R,
    elem: &'a R::Elem,
}

impl<R: Ring> fmt::Display for DisplayElem<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ring.fmt_elem(self.elem, f)
    }
}
