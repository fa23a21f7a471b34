use std::fmt;
use std::sync::Arc;

use super::{Fe, FiniteField, IntegralDomain, Ring};

/// Dense univariate polynomial, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(Vec<Fe>);

impl UniPoly {
    pub fn from_coeffs(mut c: Vec<Fe>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UniPoly(c)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Fe> {
        self.0.last().copied()
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(Fe::ZERO)
    }
}

/// `GF(q)[x]` for a single named variable.
#[derive(Clone, Debug)]
pub struct UniPolyRing {
    field: FiniteField,
    var: Arc<str>,
}

impl UniPolyRing {
    pub fn new(field: FiniteField, var: &str) -> Self {
        UniPolyRing {
            field,
            var: Arc::from(var),
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn variable(&self) -> UniPoly {
        UniPoly(vec![Fe::ZERO, Fe::ONE])
    }

    pub fn constant(&self, c: Fe) -> UniPoly {
        UniPoly::from_coeffs(vec![c])
    }

    pub fn eval(&self, f: &UniPoly, x: Fe) -> Fe {
        f.0.iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    /// Quotient and remainder; `None` when `b` is zero.
    pub fn divmod(&self, a: &UniPoly, b: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let db = b.degree()?;
        let f = &self.field;
        let lead_inv = f.inv(b.leading().unwrap()).unwrap();
        let mut r = a.0.clone();
        if r.len() <= db {
            return Some((UniPoly::default(), a.clone()));
        }
        let mut q = vec![Fe::ZERO; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + db], lead_inv);
            q[k] = c;
            if !c.is_zero() {
                for (i, &bi) in b.0.iter().enumerate() {
                    r[k + i] = f.sub(r[k + i], f.mul(c, bi));
                }
            }
        }
        r.truncate(db);
        Some((UniPoly::from_coeffs(q), UniPoly::from_coeffs(r)))
    }

    pub fn monic(&self, a: &UniPoly) -> UniPoly {
        match a.leading() {
            None => a.clone(),
            Some(l) => {
                let li = self.field.inv(l).unwrap();
                UniPoly(a.0.iter().map(|&c| self.field.mul(c, li)).collect())
            }
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.divmod(&x, &y).unwrap();
            x = y;
            y = r;
        }
        self.monic(&x)
    }
}

impl PartialEq for UniPolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.var == other.var
    }
}

impl Ring for UniPolyRing {
    type Elem = UniPoly;

    fn zero(&self) -> UniPoly {
        UniPoly::default()
    }
    fn one(&self) -> UniPoly {
        UniPoly(vec![Fe::ONE])
    }
    fn is_zero(&self, a: &UniPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let n = a.0.len().max(b.0.len());
        UniPoly::from_coeffs(
            (0..n)
                .map(|i| self.field.add(a.coeff(i), b.coeff(i)))
                .collect(),
        )
    }
    fn neg(&self, a: &UniPoly) -> UniPoly {
        UniPoly(a.0.iter().map(|&c| self.field.neg(c)).collect())
    }
    fn mul(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        if a.is_zero() || b.is_zero() {
            return UniPoly::default();
        }
        let mut out = vec![Fe::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(x, y));
            }
        }
        UniPoly::from_coeffs(out)
    }
    fn base_field(&self) -> &FiniteField {
        &self.field
    }
    fn embed(&self, c: Fe) -> UniPoly {
        self.constant(c)
    }
    fn scale(&self, c: Fe, a: &UniPoly) -> UniPoly {
        UniPoly::from_coeffs(a.0.iter().map(|&x| self.field.mul(c, x)).collect())
    }
    fn frobenius(&self, a: &UniPoly, e: u32) -> UniPoly {
        if e == 0 || a.is_zero() {
            return a.clone();
        }
        let step = (self.field.characteristic() as usize).pow(e);
        let mut out = vec![Fe::ZERO; (a.0.len() - 1) * step + 1];
        for (i, &c) in a.0.iter().enumerate() {
            out[i * step] = self.field.frob(c, e);
        }
        UniPoly::from_coeffs(out)
    }
    fn fmt_elem(&self, a: &UniPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in a.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = self.field.fmt_fe(c);
            let cs = if self.field.is_prime_field() { cs } else { format!("({cs})") };
            match i {
                0 => write!(f, "{cs}")?,
                _ => {
                    let mono = if i == 1 { self.var.to_string() } else { format!("{}^{i}", self.var) };
                    if c == Fe::ONE {
                        write!(f, "{mono}")?
                    } else {
                        write!(f, "{cs} * {mono}")?
                    }
                }
            }
        }
        Ok(())
    }
}

impl IntegralDomain for UniPolyRing {
    fn exact_div(&self, a: &UniPoly, b: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divmod(a, b)?;
        r.is_zero().then_some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> UniPolyRing {
        UniPolyRing::new(FiniteField::prime(5).unwrap(), "t")
    }

    fn poly(c: &[u32]) -> UniPoly {
        UniPoly::from_coeffs(c.iter().map(|&x| Fe(x)).collect())
    }

    #[test]
    fn divmod_and_gcd() {
        let r = ring();
        // (t+1)(t+2) and (t+1)(t+3)
        let a = r.mul(&poly(&[1, 1]), &poly(&[2, 1]));
        let b = r.mul(&poly(&[1, 1]), &poly(&[3, 1]));
        assert_eq!(r.gcd(&a, &b), poly(&[1, 1]));
        let (q, rem) = r.divmod(&a, &poly(&[2, 1])).unwrap();
        assert_eq!(q, poly(&[1, 1]));
        assert!(rem.is_zero());
        assert!(r.exact_div(&a, &poly(&[3, 1])).is_none());
        assert!(r.divmod(&a, &UniPoly::default()).is_none());
    }

    #[test]
    fn frobenius_is_freshmans_dream() {
        let r = ring();
        let f = poly(&[2, 1]);
        assert_eq!(r.frobenius(&f, 1), r.pow(&f, 5));
    }
}
