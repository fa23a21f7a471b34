use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Field, Ring};
use crate::error::{Error, Result};

pub const MAX_CHARACTERISTIC: u32 = 31;
pub const MAX_DEGREE: u32 = 4;

/// Element of `GF(p^n)`, encoded as the base-`p` digit string of its
/// coefficient vector in the power basis `1, g, g^2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Conway polynomials, coefficients low to high, monic.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
];

struct Inner {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field `GF(p^n)` with `p <= 31` and `n <= 4`.
///
/// Extension fields are quotients `GF(p)[g]/(f)` by a stored monic
/// irreducible `f`. Multiplication goes through discrete log tables built
/// from a primitive element.
#[derive(Clone)]
pub struct FiniteField(Arc<Inner>);

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FiniteField {
    pub fn prime(p: u32) -> Result<Self> {
        Self::with_modulus(p, vec![0, 1])
    }

    /// `GF(p^n)` with the shipped default modulus.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if n == 1 {
            return Self::prime(p);
        }
        let entry = CONWAY
            .iter()
            .find(|(cp, cn, _)| *cp == p && *cn == n)
            .ok_or_else(|| {
                Error::UnsupportedField(format!(
                    "no default modulus for GF({p}^{n}); supply one explicitly"
                ))
            })?;
        Self::with_modulus(p, entry.2.to_vec())
    }

    /// `GF(p)[g]/(modulus)`; coefficients low to high. A degree-one
    /// modulus yields the prime field itself.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) || p > MAX_CHARACTERISTIC {
            return Err(Error::UnsupportedField(format!(
                "characteristic {p} must be a prime <= {MAX_CHARACTERISTIC}"
            )));
        }
        let mut modulus: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
        while modulus.len() > 1 && *modulus.last().unwrap() == 0 {
            modulus.pop();
        }
        let n = modulus.len() as u32 - 1;
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::UnsupportedField(format!(
                "extension degree {n} outside 1..={MAX_DEGREE}"
            )));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        if n == 1 {
            modulus = vec![0, 1];
        } else if !is_irreducible(p, &modulus) {
            return Err(Error::InvalidModulus(format!(
                "{} is reducible over GF({p})",
                fmt_poly_coeffs(&modulus, "x")
            )));
        }
        let q = p.pow(n);
        let (exp, log) = build_tables(p, &modulus, q);
        Ok(FiniteField(Arc::new(Inner {
            p,
            n,
            q,
            modulus,
            exp,
            log,
        })))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Defining polynomial, coefficients low to high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.n == 1
    }

    /// The class of the indeterminate (`g`); equals `0` in a prime field.
    pub fn generator(&self) -> Fe {
        if self.0.n == 1 {
            Fe(0)
        } else {
            Fe(self.0.p)
        }
    }

    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.0.q))
    }

    pub fn is_in_prime_subfield(&self, a: Fe) -> bool {
        a.0 < self.0.p
    }

    fn digits(&self, a: Fe) -> [u32; MAX_DEGREE as usize] {
        let mut d = [0u32; MAX_DEGREE as usize];
        let mut v = a.0;
        for slot in d.iter_mut().take(self.0.n as usize) {
            *slot = v % self.0.p;
            v /= self.0.p;
        }
        d
    }

    fn from_digits(&self, d: &[u32]) -> Fe {
        let mut v = 0u32;
        for &c in d.iter().take(self.0.n as usize).rev() {
            v = v * self.0.p + c;
        }
        Fe(v)
    }

    /// Coefficients of `a` in the power basis, low to high.
    pub fn coefficients(&self, a: Fe) -> Vec<u32> {
        self.digits(a)[..self.0.n as usize].to_vec()
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Fe {
        let p = self.0.p;
        // reduce modulo the defining polynomial
        let mut c: Vec<u32> = coeffs.iter().map(|x| x % p).collect();
        let n = self.0.n as usize;
        let m = &self.0.modulus;
        while c.len() > n {
            let top = c.pop().unwrap();
            if top != 0 {
                let shift = c.len() - n;
                for (i, &mi) in m.iter().take(n).enumerate() {
                    c[shift + i] = (c[shift + i] + (p - top) * mi % p) % p;
                }
            }
        }
        self.from_digits(&c)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.0.p;
        if self.0.n == 1 {
            return Fe((a.0 + b.0) % p);
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut d = [0u32; MAX_DEGREE as usize];
        for i in 0..self.0.n as usize {
            d[i] = (da[i] + db[i]) % p;
        }
        self.from_digits(&d)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let p = self.0.p;
        if self.0.n == 1 {
            return Fe((p - a.0) % p);
        }
        let da = self.digits(a);
        let mut d = [0u32; MAX_DEGREE as usize];
        for i in 0..self.0.n as usize {
            d[i] = (p - da[i]) % p;
        }
        self.from_digits(&d)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        if self.0.n == 1 {
            return Fe(a.0 * b.0 % self.0.p);
        }
        let order = self.0.q - 1;
        let l = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        Fe(self.0.exp[(l % order) as usize])
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let order = self.0.q - 1;
        let l = self.0.log[a.0 as usize];
        Some(Fe(self.0.exp[((order - l) % order) as usize]))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        let order = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        Fe(self.0.exp[((l * (k % order)) % order) as usize])
    }

    /// `a^(p^e)`.
    pub fn frob(&self, a: Fe, e: u32) -> Fe {
        let e = e % self.0.n;
        self.pow(a, (self.0.p as u64).pow(e))
    }

    /// The unique `b` with `b^(p^e) = a`.
    pub fn frob_root(&self, a: Fe, e: u32) -> Fe {
        let n = self.0.n;
        self.frob(a, (n - e % n) % n)
    }

    /// `1/i!` for `i < p`.
    pub fn inv_factorial(&self, i: u32) -> Fe {
        let p = self.0.p;
        assert!(i < p, "factorial {i}! is not invertible in characteristic {p}");
        let f = (1..=i as u64).fold(1u64, |acc, k| acc * k % p as u64);
        self.inv(Fe(f as u32)).expect("i! is a unit below p")
    }

    pub fn parse_element(&self, s: &str) -> Result<Fe> {
        super::parse::parse_field_element(self, s)
    }

    pub fn fmt_fe(&self, a: Fe) -> String {
        if self.0.n == 1 {
            return a.0.to_string();
        }
        fmt_poly_coeffs(&self.coefficients(a), "g")
    }

    /// Plain-text descriptor: `GF(p)` or `GF(p^n; modulus=...)`.
    pub fn descriptor(&self) -> String {
        if self.0.n == 1 {
            format!("GF({})", self.0.p)
        } else {
            format!(
                "GF({}^{}; modulus={})",
                self.0.p,
                self.0.n,
                fmt_poly_coeffs(&self.0.modulus, "x")
            )
        }
    }

    /// Parse a descriptor produced by [`FiniteField::descriptor`]; also accepts
    /// `GF(p^n)` (default modulus) and `GF(q)` for a prime power `q`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(1, 1, format!("expected GF(...), got `{t}`")))?;
        let (head, modulus) = match inner.split_once(';') {
            Some((h, m)) => {
                let m = m.trim();
                let m = m.strip_prefix("modulus").map(str::trim_start).and_then(|r| r.strip_prefix('='));
                let m = m.ok_or_else(|| Error::parse(1, 1, "expected `modulus=` after `;`"))?;
                (h.trim(), Some(m.trim()))
            }
            None => (inner.trim(), None),
        };
        let bad = |what: &str| Error::parse(1, 1, format!("bad field descriptor `{t}`: {what}"));
        let (p, n) = match head.split_once('^') {
            Some((p, n)) => (
                p.trim().parse::<u32>().map_err(|_| bad("characteristic"))?,
                n.trim().parse::<u32>().map_err(|_| bad("degree"))?,
            ),
            None => {
                let q: u32 = head.parse().map_err(|_| bad("order"))?;
                prime_power(q).ok_or_else(|| bad("order is not a prime power"))?
            }
        };
        match modulus {
            Some(m) => {
                let coeffs = super::parse::parse_univariate_coeffs(m, p)?;
                if coeffs.len() as u32 != n + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "modulus degree {} does not match n = {n}",
                        coeffs.len().saturating_sub(1)
                    )));
                }
                Self::with_modulus(p, coeffs)
            }
            None => Self::new(p, n),
        }
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut n = 0;
    let mut v = q;
    while v % p == 0 {
        v /= p;
        n += 1;
    }
    (v == 1).then_some((p, n))
}

pub(crate) fn fmt_poly_coeffs(coeffs: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn poly_mulmod(p: u32, a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let top = prod[k];
        if top != 0 {
            for i in 0..n {
                prod[k - n + i] = (prod[k - n + i] + (p - top) * modulus[i]) % p;
            }
            prod[k] = 0;
        }
    }
    prod.truncate(n);
    prod.resize(n, 0);
    prod
}

fn encode(p: u32, d: &[u32]) -> u32 {
    d.iter().rev().fold(0, |v, &c| v * p + c)
}

fn decode(p: u32, n: usize, mut v: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let c = v % p;
            v /= p;
            c
        })
        .collect()
}

fn build_tables(p: u32, modulus: &[u32], q: u32) -> (Vec<u32>, Vec<u32>) {
    let n = modulus.len() - 1;
    if n == 1 {
        // prime field: still build tables so pow/inv share one path
        let g = (1..p)
            .find(|&g| {
                let mut x = 1u32;
                (1..p - 1).all(|_| {
                    x = x * g % p;
                    x != 1
                })
            })
            .unwrap_or(1);
        let mut exp = vec![0u32; (p - 1) as usize];
        let mut log = vec![0u32; p as usize];
        let mut x = 1u32;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = k as u32;
            x = x * g % p;
        }
        return (exp, log);
    }
    for cand in 2..q {
        let g = decode(p, n, cand);
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut x = decode(p, n, 1);
        let mut ok = true;
        for k in 0..(q - 1) as usize {
            let code = encode(p, &x);
            if log[code as usize] != u32::MAX {
                ok = false;
                break;
            }
            exp[k] = code;
            log[code as usize] = k as u32;
            x = poly_mulmod(p, &x, &g, modulus);
        }
        if ok {
            log[0] = 0;
            return (exp, log);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Exhaustive check that a monic polynomial of degree <= 4 has no monic
/// factor of degree <= deg/2.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g = decode(p, d, code);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let top = r.pop().unwrap();
        if top != 0 {
            let shift = r.len() - dg;
            for i in 0..dg {
                r[shift + i] = (r[shift + i] + (p - top) * g[i] % p) % p;
            }
        }
    }
    r
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl Ring for FiniteField {
    type Elem = Fe;

    fn zero(&self) -> Fe {
        Fe(0)
    }
    fn one(&self) -> Fe {
        Fe(1)
    }
    fn is_zero(&self, a: &Fe) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        FiniteField::add(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        FiniteField::neg(self, *a)
    }
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        FiniteField::sub(self, *a, *b)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        FiniteField::mul(self, *a, *b)
    }
    fn base_field(&self) -> &FiniteField {
        self
    }
    fn embed(&self, c: Fe) -> Fe {
        c
    }
    fn frobenius(&self, a: &Fe, e: u32) -> Fe {
        self.frob(*a, e)
    }
    fn pow(&self, a: &Fe, k: u64) -> Fe {
        FiniteField::pow(self, *a, k)
    }
    fn fmt_elem(&self, a: &Fe, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_fe(*a))
    }
}

impl Field for FiniteField {
    fn inv(&self, a: &Fe) -> Option<Fe> {
        FiniteField::inv(self, *a)
    }
}
