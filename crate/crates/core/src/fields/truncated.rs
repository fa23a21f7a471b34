use std::fmt;

use super::{Fe, FiniteField, Ring};

/// Sparse element of `R[t]/t^N`: `(exponent, coefficient)` pairs sorted by
/// exponent, all exponents `< N`, no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncElem<E>(Vec<(u32, E)>);

impl<E> TruncElem<E> {
    pub fn terms(&self) -> &[(u32, E)] {
        &self.0
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.last().map(|(k, _)| *k)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.0.first().map(|(k, _)| *k)
    }
}

/// The truncated curve ring `R[t]/t^N` over a coefficient ring `R`.
/// With `N = p^r` this is the coordinate ring of `G_{a(r)}` over `R`.
#[derive(Clone, Debug)]
pub struct TruncatedCurveRing<R: Ring> {
    base: R,
    order: u32,
}

impl<R: Ring> TruncatedCurveRing<R> {
    pub fn new(base: R, order: u32) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        TruncatedCurveRing { base, order }
    }

    /// `R[t]/t^(p^r)`.
    pub fn of_height(base: R, r: u32) -> Self {
        let p = base.characteristic();
        Self::new(base, p.pow(r))
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `c * t^k`, zero if `k >= N`.
    pub fn monomial(&self, c: R::Elem, k: u32) -> TruncElem<R::Elem> {
        if k >= self.order || self.base.is_zero(&c) {
            TruncElem(Vec::new())
        } else {
            TruncElem(vec![(k, c)])
        }
    }

    pub fn t(&self) -> TruncElem<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    pub fn lift(&self, c: R::Elem) -> TruncElem<R::Elem> {
        self.monomial(c, 0)
    }

    pub fn coefficient(&self, a: &TruncElem<R::Elem>, k: u32) -> R::Elem {
        a.0.iter()
            .find(|(e, _)| *e == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.base.zero())
    }

    /// Substitute `t -> c t`.
    pub fn rescale_t(&self, a: &TruncElem<R::Elem>, c: &R::Elem) -> TruncElem<R::Elem> {
        let mut out = Vec::with_capacity(a.0.len());
        for (k, x) in &a.0 {
            let v = self.base.mul(x, &self.base.pow(c, *k as u64));
            if !self.base.is_zero(&v) {
                out.push((*k, v));
            }
        }
        TruncElem(out)
    }

    /// Substitute `t -> t^m` (truncating).
    pub fn compose_power(&self, a: &TruncElem<R::Elem>, m: u32) -> TruncElem<R::Elem> {
        TruncElem(
            a.0.iter()
                .filter_map(|(k, x)| {
                    let e = (*k as u64) * m as u64;
                    (e < self.order as u64).then(|| (e as u32, x.clone()))
                })
                .collect(),
        )
    }

    fn from_pairs(&self, mut pairs: Vec<(u32, R::Elem)>) -> TruncElem<R::Elem> {
        pairs.sort_by_key(|(k, _)| *k);
        let mut out: Vec<(u32, R::Elem)> = Vec::with_capacity(pairs.len());
        for (k, c) in pairs {
            if k >= self.order {
                continue;
            }
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc = self.base.add(lc, &c),
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| !self.base.is_zero(c));
        TruncElem(out)
    }
}

impl<R: Ring> Ring for TruncatedCurveRing<R> {
    type Elem = TruncElem<R::Elem>;

    fn zero(&self) -> Self::Elem {
        TruncElem(Vec::new())
    }
    fn one(&self) -> Self::Elem {
        self.lift(self.base.one())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.is_empty()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = Vec::with_capacity(a.0.len() + b.0.len());
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            let ka = a.0.get(i).map(|x| x.0).unwrap_or(u32::MAX);
            let kb = b.0.get(j).map(|x| x.0).unwrap_or(u32::MAX);
            if ka < kb {
                out.push(a.0[i].clone());
                i += 1;
            } else if kb < ka {
                out.push(b.0[j].clone());
                j += 1;
            } else {
                let s = self.base.add(&a.0[i].1, &b.0[j].1);
                if !self.base.is_zero(&s) {
                    out.push((ka, s));
                }
                i += 1;
                j += 1;
            }
        }
        TruncElem(out)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        TruncElem(a.0.iter().map(|(k, c)| (*k, self.base.neg(c))).collect())
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.0.is_empty() || b.0.is_empty() {
            return self.zero();
        }
        let mut pairs = Vec::with_capacity(a.0.len() * b.0.len());
        for (ka, ca) in &a.0 {
            for (kb, cb) in &b.0 {
                let k = ka + kb;
                if k >= self.order {
                    break;
                }
                pairs.push((k, self.base.mul(ca, cb)));
            }
        }
        self.from_pairs(pairs)
    }
    fn base_field(&self) -> &FiniteField {
        self.base.base_field()
    }
    fn embed(&self, c: Fe) -> Self::Elem {
        self.lift(self.base.embed(c))
    }
    fn scale(&self, c: Fe, a: &Self::Elem) -> Self::Elem {
        if c.is_zero() {
            return self.zero();
        }
        TruncElem(a.0.iter().map(|(k, x)| (*k, self.base.scale(c, x))).collect())
    }
    fn frobenius(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        if e == 0 {
            return a.clone();
        }
        let step = (self.characteristic() as u64).pow(e);
        TruncElem(
            a.0.iter()
                .filter_map(|(k, c)| {
                    let ex = *k as u64 * step;
                    (ex < self.order as u64).then(|| (ex as u32, self.base.frobenius(c, e)))
                })
                .filter(|(_, c)| !self.base.is_zero(c))
                .collect(),
        )
    }
    fn fmt_elem(&self, a: &Self::Elem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in a.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})", self.base.display(c))?;
            match k {
                0 => {}
                1 => f.write_str(" t")?,
                _ => write!(f, " t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, r: u32) -> TruncatedCurveRing<FiniteField> {
        TruncatedCurveRing::of_height(FiniteField::prime(p).unwrap(), r)
    }

    fn elem(rg: &TruncatedCurveRing<FiniteField>, coeffs: &[u32]) -> TruncElem<Fe> {
        let mut acc = rg.zero();
        for (k, &c) in coeffs.iter().enumerate() {
            acc = rg.add(&acc, &rg.monomial(Fe(c % rg.characteristic()), k as u32));
        }
        acc
    }

    #[test]
    fn t_power_vanishes_at_truncation() {
        let rg = ring(3, 2);
        let t = rg.t();
        assert!(!rg.is_zero(&rg.pow(&t, 8)));
        assert!(rg.is_zero(&rg.pow(&t, 9)));
        assert!(rg.is_zero(&rg.frobenius(&rg.pow(&t, 3), 1)));
    }

    proptest! {
        #[test]
        fn products_respect_degree_bound(a in prop::collection::vec(0u32..5, 0..30),
                                         b in prop::collection::vec(0u32..5, 0..30)) {
            let rg = ring(5, 2);
            let x = elem(&rg, &a);
            let y = elem(&rg, &b);
            let z = rg.mul(&x, &y);
            prop_assert!(z.degree().map_or(true, |d| d < 25));
            prop_assert_eq!(rg.frobenius(&rg.add(&x, &y), 1),
                            rg.add(&rg.frobenius(&x, 1), &rg.frobenius(&y, 1)));
            prop_assert_eq!(rg.frobenius(&z, 1),
                            rg.mul(&rg.frobenius(&x, 1), &rg.frobenius(&y, 1)));
        }
    }
}
