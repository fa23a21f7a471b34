use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{Fe, FiniteField, Ring};
use crate::error::{Error, Result};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: nonzero coefficients keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Fe>,
}

impl Polynomial {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Fe)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn constant_term(&self) -> Fe {
        self.terms
            .iter()
            .find(|(m, _)| m.degree() == 0)
            .map(|(_, c)| *c)
            .unwrap_or(Fe::ZERO)
    }

    fn insert_add(&mut self, field: &FiniteField, m: Monomial, c: Fe) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
}

struct PolyRingInner {
    field: FiniteField,
    names: Vec<String>,
    weights: Vec<u32>,
}

/// `GF(q)[x_0, ..., x_{k-1}]` with named, positively weighted variables.
#[derive(Clone)]
pub struct PolyRing(Arc<PolyRingInner>);

impl PolyRing {
    pub fn new(field: FiniteField, names: &[&str]) -> Result<Self> {
        Self::with_weights(
            field,
            &names.iter().map(|n| (n.to_string(), 1)).collect::<Vec<_>>(),
        )
    }

    pub fn with_weights(field: FiniteField, vars: &[(String, u32)]) -> Result<Self> {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for (n, w) in vars {
            if names.contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{n}`")));
            }
            if *w == 0 {
                return Err(Error::InvalidArgument(format!("variable `{n}` has weight 0")));
            }
            if n.is_empty() || n == "g" || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::InvalidArgument(format!("bad variable name `{n}`")));
            }
            names.push(n.clone());
            weights.push(*w);
        }
        Ok(PolyRing(Arc::new(PolyRingInner {
            field,
            names,
            weights,
        })))
    }

    pub fn field(&self) -> &FiniteField {
        &self.0.field
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.0.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn variable(&self, i: usize) -> Polynomial {
        let mut m = vec![0; self.nvars()];
        m[i] = 1;
        let mut p = Polynomial::default();
        p.terms.insert(Monomial(m), Fe::ONE);
        p
    }

    pub fn var(&self, name: &str) -> Result<Polynomial> {
        self.index_of(name)
            .map(|i| self.variable(i))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable `{name}`")))
    }

    pub fn constant(&self, c: Fe) -> Polynomial {
        let mut p = Polynomial::default();
        p.insert_add(&self.0.field, Monomial::one(self.nvars()), c);
        p
    }

    /// Weighted degree of a monomial.
    pub fn weighted_degree(&self, m: &Monomial) -> u64 {
        m.0.iter()
            .zip(&self.0.weights)
            .map(|(&e, &w)| e as u64 * w as u64)
            .sum()
    }

    /// Plain-text descriptor `GF(p)[x0:w0,...]`.
    pub fn descriptor(&self) -> String {
        let vars: Vec<String> = self
            .0
            .names
            .iter()
            .zip(&self.0.weights)
            .map(|(n, w)| format!("{n}:{w}"))
            .collect();
        format!("{}[{}]", self.0.field.descriptor(), vars.join(","))
    }

    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .rfind('[')
            .ok_or_else(|| Error::parse(1, 1, "expected `[` in ring descriptor"))?;
        let close = s
            .strip_suffix(']')
            .ok_or_else(|| Error::parse(1, s.len(), "expected `]` at end of ring descriptor"))?;
        let field = FiniteField::parse(&s[..open])?;
        let mut vars = Vec::new();
        for item in close[open + 1..].split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (n, w) = match item.split_once(':') {
                Some((n, w)) => (
                    n.trim().to_string(),
                    w.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::parse(1, open + 2, format!("bad weight in `{item}`")))?,
                ),
                None => (item.to_string(), 1),
            };
            vars.push((n, w));
        }
        Self::with_weights(field, &vars)
    }

    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        self.parse_at(s, 1, 0)
    }

    pub fn parse_at(&self, s: &str, line: usize, col: usize) -> Result<Polynomial> {
        let e = super::parse::parse_expr_at(s, line, col)?;
        let field = self.0.field.clone();
        let g = field.generator();
        let this = self.clone();
        e.eval(self, &move |name| {
            if let Some(i) = this.index_of(name) {
                Some(this.variable(i))
            } else if name == "g" && !field.is_prime_field() {
                Some(this.constant(g))
            } else {
                None
            }
        })
        .map_err(|err| match err {
            Error::Parse { message, .. } => Error::parse(line, col + 1, message),
            other => other,
        })
    }

    /// Exact evaluation at a point of `GF(q')^k`. Coefficients outside the
    /// prime subfield require `GF(q') == GF(q)`.
    pub fn evaluate(&self, f: &Polynomial, point: &[Fe], at: &FiniteField) -> Result<Fe> {
        self.eval_in(f, at, point)
    }

    /// Substitute ring elements for the variables: the homomorphism
    /// `GF(q)[x] -> R` determined by `values`.
    pub fn eval_in<R: Ring>(&self, f: &Polynomial, ring: &R, values: &[R::Elem]) -> Result<R::Elem> {
        if values.len() != self.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, ring has {} variables",
                values.len(),
                self.nvars()
            )));
        }
        let target = ring.base_field();
        let same = target == &self.0.field;
        if target.characteristic() != self.0.field.characteristic() {
            return Err(Error::CharacteristicMismatch(
                self.0.field.characteristic(),
                target.characteristic(),
            ));
        }
        // cache variable powers
        let mut powers: Vec<Vec<R::Elem>> = vec![vec![ring.one()]; self.nvars()];
        let mut acc = ring.zero();
        for (m, &c) in f.terms.iter() {
            let coeff = if same {
                ring.embed(c)
            } else if self.0.field.is_in_prime_subfield(c) {
                ring.embed(target.from_int(c.0 as i64))
            } else {
                return Err(Error::IncompatibleField(format!(
                    "coefficient {} of {} does not lie in {}",
                    self.0.field.fmt_fe(c),
                    self.0.field.descriptor(),
                    target.descriptor()
                )));
            };
            let mut term = coeff;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = ring.mul(powers[i].last().unwrap(), &values[i]);
                    powers[i].push(next);
                }
                term = ring.mul(&term, &powers[i][e as usize]);
            }
            acc = ring.add(&acc, &term);
        }
        Ok(acc)
    }
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field
                && self.0.names == other.0.names
                && self.0.weights == other.0.weights)
    }
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl Ring for PolyRing {
    type Elem = Polynomial;

    fn zero(&self) -> Polynomial {
        Polynomial::default()
    }
    fn one(&self) -> Polynomial {
        self.constant(Fe::ONE)
    }
    fn is_zero(&self, a: &Polynomial) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = a.clone();
        for (m, &c) in &b.terms {
            out.insert_add(&self.0.field, m.clone(), c);
        }
        out
    }
    fn neg(&self, a: &Polynomial) -> Polynomial {
        Polynomial {
            terms: a
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), self.0.field.neg(c)))
                .collect(),
        }
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (ma, &ca) in &a.terms {
            for (mb, &cb) in &b.terms {
                out.insert_add(&self.0.field, ma.mul(mb), self.0.field.mul(ca, cb));
            }
        }
        out
    }
    fn base_field(&self) -> &FiniteField {
        &self.0.field
    }
    fn embed(&self, c: Fe) -> Polynomial {
        self.constant(c)
    }
    fn scale(&self, c: Fe, a: &Polynomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::default();
        }
        Polynomial {
            terms: a
                .terms
                .iter()
                .map(|(m, &x)| (m.clone(), self.0.field.mul(c, x)))
                .collect(),
        }
    }
    fn frobenius(&self, a: &Polynomial, e: u32) -> Polynomial {
        if e == 0 {
            return a.clone();
        }
        let step = self.0.field.characteristic().pow(e);
        Polynomial {
            terms: a
                .terms
                .iter()
                .map(|(m, &c)| {
                    (
                        Monomial(m.0.iter().map(|x| x * step).collect()),
                        self.0.field.frob(c, e),
                    )
                })
                .collect(),
        }
    }
    fn fmt_elem(&self, a: &Polynomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.is_zero() {
            return f.write_str("0");
        }
        let field = &self.0.field;
        let mut first = true;
        for (m, &c) in a.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = field.fmt_fe(c);
            let cs = if field.is_prime_field() { cs } else { format!("({cs})") };
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(&self.0.names)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            if mono.is_empty() {
                f.write_str(&cs)?;
            } else if c == Fe::ONE {
                f.write_str(&mono.join(" "))?;
            } else {
                write!(f, "{cs} * {}", mono.join(" "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32) -> PolyRing {
        PolyRing::new(FiniteField::prime(p).unwrap(), &["x", "y"]).unwrap()
    }

    #[test]
    fn frobenius_freshmans_dream() {
        let r = ring(3);
        let f = r.parse("x + y").unwrap();
        assert_eq!(r.frobenius(&f, 1), r.parse("x^3 + y^3").unwrap());
        assert_eq!(r.pow(&f, 3), r.parse("x^3 + y^3").unwrap());
    }

    #[test]
    fn evaluation_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        let r = PolyRing::new(f5.clone(), &["x"]).unwrap();
        let f = r.parse("x^2 + 1").unwrap();
        assert_eq!(r.evaluate(&f, &[Fe(2)], &f5).unwrap(), Fe(0));
        let c = r.constant(Fe(3));
        assert_eq!(r.evaluate(&c, &[Fe(4)], &f5).unwrap(), Fe(3));
        assert!(matches!(
            r.evaluate(&f, &[Fe(1), Fe(2)], &f5),
            Err(Error::DimensionMismatch(_))
        ));

        let f9 = FiniteField::new(3, 2).unwrap();
        let r3 = ring(3);
        let h = r3.parse("x y - 1").unwrap();
        let g = f9.generator();
        let gi = f9.inv(g).unwrap();
        assert_eq!(r3.evaluate(&h, &[g, gi], &f9).unwrap(), Fe(0));

        // a GF(9) coefficient cannot be evaluated over GF(3)
        let r9 = PolyRing::new(f9.clone(), &["x"]).unwrap();
        let k = r9.parse("g x").unwrap();
        assert!(matches!(
            r9.evaluate(&k, &[Fe(1)], &FiniteField::prime(3).unwrap()),
            Err(Error::IncompatibleField(_))
        ));
        assert!(matches!(
            r3.evaluate(&h, &[Fe(1), Fe(1)], &FiniteField::prime(5).unwrap()),
            Err(Error::CharacteristicMismatch(3, 5))
        ));
    }

    #[test]
    fn graded_lex_serialization_round_trips() {
        let r = PolyRing::with_weights(
            FiniteField::prime(3).unwrap(),
            &[("x0".into(), 1), ("x1".into(), 3)],
        )
        .unwrap();
        assert_eq!(r.descriptor(), "GF(3)[x0:1,x1:3]");
        let back = PolyRing::parse_descriptor(&r.descriptor()).unwrap();
        assert_eq!(back, r);
        let f = r.parse("x1 + 2 x0^2 x1 + x0^3 + 1").unwrap();
        let s = r.display(&f).to_string();
        assert_eq!(s, "x0^3 + 2 * x0^2 x1 + x1 + 1");
        assert_eq!(r.parse(&s).unwrap(), f);
        assert_eq!(r.weighted_degree(&Monomial(vec![2, 1])), 5);
    }

    #[test]
    fn rejects_bad_rings() {
        let f = FiniteField::prime(3).unwrap();
        assert!(PolyRing::new(f.clone(), &["x", "x"]).is_err());
        assert!(PolyRing::with_weights(f, &[("x".into(), 0)]).is_err());
        assert!(ring(3).parse("z").is_err());
    }
}
