use std::fmt;

use super::matrix::{bareiss_rank, Matrix};
use super::{Fe, Field, FiniteField, Ring, UniPoly, UniPolyRing};

/// A reduced fraction `num / den` with `den` monic and `gcd(num, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: UniPoly,
    den: UniPoly,
}

impl RatFn {
    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }
}

/// The univariate function field `GF(q)(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunctionField {
    polys: UniPolyRing,
}

impl RationalFunctionField {
    pub fn new(field: FiniteField, var: &str) -> Self {
        RationalFunctionField {
            polys: UniPolyRing::new(field, var),
        }
    }

    pub fn poly_ring(&self) -> &UniPolyRing {
        &self.polys
    }

    pub fn from_poly(&self, p: UniPoly) -> RatFn {
        RatFn {
            num: p,
            den: self.polys.one(),
        }
    }

    /// `num / den`, reduced; `None` if `den` is zero.
    pub fn fraction(&self, num: UniPoly, den: UniPoly) -> Option<RatFn> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(self.zero());
        }
        let g = self.polys.gcd(&num, &den);
        let (n, _) = self.polys.divmod(&num, &g)?;
        let (d, _) = self.polys.divmod(&den, &g)?;
        let lead = self.polys.field().inv(d.leading()?)?;
        Some(RatFn {
            num: self.polys.scale(lead, &n),
            den: self.polys.scale(lead, &d),
        })
    }

    /// Multiply each row by the lcm of its denominators, giving a matrix over
    /// `GF(q)[x]` with the same rank.
    pub fn clear_denominators(&self, m: &Matrix<RatFn>) -> Matrix<UniPoly> {
        let pr = &self.polys;
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            let mut l = pr.one();
            for j in 0..m.cols() {
                let d = &m[(i, j)].den;
                let g = pr.gcd(&l, d);
                let (q, _) = pr.divmod(d, &g).unwrap();
                l = pr.mul(&l, &q);
            }
            for j in 0..m.cols() {
                let e = &m[(i, j)];
                let (q, _) = pr.divmod(&l, &e.den).unwrap();
                data.push(pr.mul(&e.num, &q));
            }
        }
        Matrix::from_vec(m.rows(), m.cols(), data)
    }
}

impl Ring for RationalFunctionField {
    type Elem = RatFn;

    fn zero(&self) -> RatFn {
        RatFn {
            num: self.polys.zero(),
            den: self.polys.one(),
        }
    }
    fn one(&self) -> RatFn {
        self.from_poly(self.polys.one())
    }
    fn is_zero(&self, a: &RatFn) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        let pr = &self.polys;
        if a.den == b.den {
            return self.fraction(pr.add(&a.num, &b.num), a.den.clone()).unwrap();
        }
        let num = pr.add(&pr.mul(&a.num, &b.den), &pr.mul(&b.num, &a.den));
        self.fraction(num, pr.mul(&a.den, &b.den)).unwrap()
    }
    fn neg(&self, a: &RatFn) -> RatFn {
        RatFn {
            num: self.polys.neg(&a.num),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        let pr = &self.polys;
        self.fraction(pr.mul(&a.num, &b.num), pr.mul(&a.den, &b.den))
            .unwrap()
    }
    fn base_field(&self) -> &FiniteField {
        self.polys.field()
    }
    fn embed(&self, c: Fe) -> RatFn {
        self.from_poly(self.polys.constant(c))
    }
    fn frobenius(&self, a: &RatFn, e: u32) -> RatFn {
        RatFn {
            num: self.polys.frobenius(&a.num, e),
            den: self.polys.frobenius(&a.den, e),
        }
    }
    fn fmt_elem(&self, a: &RatFn, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.den == self.polys.one() {
            return self.polys.fmt_elem(&a.num, f);
        }
        write!(
            f,
            "({}) / ({})",
            self.polys.display(&a.num),
            self.polys.display(&a.den)
        )
    }
}

impl Field for RationalFunctionField {
    fn inv(&self, a: &RatFn) -> Option<RatFn> {
        self.fraction(a.den.clone(), a.num.clone())
    }

    fn matrix_rank(&self, m: &Matrix<RatFn>) -> usize {
        bareiss_rank(&self.polys, &self.clear_denominators(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::matrix::gaussian_rank;

    fn ff() -> RationalFunctionField {
        RationalFunctionField::new(FiniteField::prime(3).unwrap(), "t")
    }

    #[test]
    fn fractions_reduce() {
        let k = ff();
        let pr = k.poly_ring().clone();
        let t = pr.variable();
        let t2 = pr.mul(&t, &t);
        let x = k.fraction(t2.clone(), pr.scale(Fe(2), &t)).unwrap();
        // t^2 / 2t = t / 2 = 2t over GF(3)
        assert_eq!(x.denominator(), &pr.one());
        assert_eq!(x.numerator(), &pr.scale(Fe(2), &t));
        assert!(k.fraction(t, pr.zero()).is_none());
        let y = k.inv(&x).unwrap();
        assert_eq!(k.mul(&x, &y), k.one());
    }

    #[test]
    fn rank_by_fraction_free_route_matches_gaussian() {
        // [[t, 1], [t^2, t]] has rank 1: row 2 = t * row 1
        let k = ff();
        let pr = k.poly_ring().clone();
        let t = pr.variable();
        let e = |p: UniPoly| k.from_poly(p);
        let m = Matrix::from_vec(
            2,
            2,
            vec![e(t.clone()), e(pr.one()), e(pr.mul(&t, &t)), e(t.clone())],
        );
        assert_eq!(k.matrix_rank(&m), 1);
        assert_eq!(gaussian_rank(&k, &m), 1);
        let with_fraction = Matrix::from_vec(
            2,
            2,
            vec![
                k.fraction(pr.one(), t.clone()).unwrap(),
                e(pr.one()),
                e(pr.one()),
                e(t.clone()),
            ],
        );
        assert_eq!(k.matrix_rank(&with_fraction), 1);
    }
}
