//! Module expressions and their functorial evaluation on unipotent matrices.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::parse::parse_field_element;
use crate::fields::{minors, Fe, FiniteField, Matrix, Ring};

/// Dimension cap for `Sym` and `Ext` nodes.
pub const DEFAULT_FUNCTOR_CAP: usize = 2000;

/// How the matrices of an explicit module act.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `u_0, ..., u_{r-1}` of `G_{a(r)}`: `c` acts as `prod_j texp(c^{p^j} u_j)`.
    Frobenius,
    /// `x_0, ..., x_{s-1}` of `G_a^s` at height one: `(c_i)` acts as
    /// `prod_i texp(c_i x_i)`.
    Product,
}

/// Pairwise commuting p-nilpotent matrices over a finite field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitModule {
    label: String,
    field: FiniteField,
    layout: Layout,
    matrices: Vec<Matrix<Fe>>,
}

impl ExplicitModule {
    pub fn new(
        label: impl Into<String>,
        field: FiniteField,
        layout: Layout,
        matrices: Vec<Matrix<Fe>>,
    ) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::MalformedModule("explicit module without matrices".into()));
        }
        if let TupleCheck::Violation(v) = validate_commuting_tuple(&field, &matrices) {
            return Err(Error::InvalidTuple(v.to_string()));
        }
        Ok(ExplicitModule {
            label: label.into(),
            field,
            layout,
            matrices,
        })
    }

    /// `C_0 + ... + C_{p-1}` with `dim C_j = j`; `x_i` acts on `C_j` as a full
    /// Jordan block when `j != i` and as zero when `j = i`.
    pub fn ex74(p: u32) -> Result<Self> {
        let f = FiniteField::prime(p)?;
        let m = (p * (p - 1) / 2) as usize;
        let mut mats = Vec::with_capacity(p as usize);
        for i in 0..p {
            let mut a = Matrix::zeros(&f, m, m);
            let mut offset = 0;
            for j in 1..p as usize {
                if j != i as usize {
                    for k in 1..j {
                        a[(offset + k - 1, offset + k)] = Fe::ONE;
                    }
                }
                offset += j;
            }
            mats.push(a);
        }
        Self::new(format!("ex74,p={p}"), f, Layout::Product, mats)
    }

    /// `k[u_0, ..., u_{r-1}] / (u_i^p)` with `u_i` acting by multiplication.
    /// Basis monomial `prod u_i^{k_i}` has index `sum k_i p^i`.
    pub fn regular(p: u32, r: u32, layout: Layout) -> Result<Self> {
        let f = FiniteField::prime(p)?;
        if r == 0 {
            return Err(Error::OutOfRange("regular module of height 0".into()));
        }
        let m = (p as usize)
            .checked_pow(r)
            .filter(|&m| m <= DEFAULT_FUNCTOR_CAP)
            .ok_or_else(|| Error::CapExceeded(format!("regular module p^r with p = {p}, r = {r}")))?;
        let mut mats = Vec::with_capacity(r as usize);
        for i in 0..r {
            let step = (p as usize).pow(i);
            let mut a = Matrix::zeros(&f, m, m);
            for src in 0..m {
                if (src / step) % p as usize != p as usize - 1 {
                    a[(src + step, src)] = Fe::ONE;
                }
            }
            mats.push(a);
        }
        let tag = match layout {
            Layout::Frobenius => "",
            Layout::Product => ",layout=product",
        };
        Self::new(format!("regular,p={p},r={r}{tag}"), f, layout, mats)
    }

    /// Read a module file:
    ///
    /// ```text
    /// field = GF(3)
    /// layout = frobenius
    /// matrix
    /// 0 1
    /// 0 0
    /// ```
    pub fn from_file_contents(label: &str, text: &str) -> Result<Self> {
        let mut field: Option<FiniteField> = None;
        let mut layout = Layout::Frobenius;
        let mut mats: Vec<Vec<Vec<Fe>>> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            let lno = ln + 1;
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                match key.trim() {
                    "field" => {
                        field = Some(FiniteField::parse(value.trim()).map_err(|e| relocate(e, lno))?);
                    }
                    "layout" => {
                        layout = match value.trim() {
                            "frobenius" => Layout::Frobenius,
                            "product" => Layout::Product,
                            other => return Err(Error::parse(lno, 1, format!("unknown layout `{other}`"))),
                        };
                    }
                    other => return Err(Error::parse(lno, 1, format!("unknown key `{other}`"))),
                }
                continue;
            }
            if line == "matrix" {
                mats.push(Vec::new());
                continue;
            }
            let f = field
                .as_ref()
                .ok_or_else(|| Error::parse(lno, 1, "`field = ...` must precede matrix rows"))?;
            let current = mats
                .last_mut()
                .ok_or_else(|| Error::parse(lno, 1, "matrix row before `matrix`"))?;
            let row = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|tok| parse_field_element(f, tok).map_err(|e| relocate(e, lno)))
                .collect::<Result<Vec<_>>>()?;
            current.push(row);
        }
        let field = field.ok_or_else(|| Error::parse(1, 1, "missing `field = ...`"))?;
        let matrices = mats
            .into_iter()
            .map(|rows| {
                let m = Matrix::from_rows(rows)?;
                if !m.is_square() {
                    return Err(Error::NotSquare(m.rows(), m.cols()));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(format!("file={label}"), field, layout, matrices)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn matrices(&self) -> &[Matrix<Fe>] {
        &self.matrices
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].rows()
    }

    /// Number of additive parameters the module consumes.
    pub fn copies(&self) -> usize {
        match self.layout {
            Layout::Frobenius => 1,
            Layout::Product => self.matrices.len(),
        }
    }

    fn lift<R: Ring>(&self, ring: &R, m: &Matrix<Fe>) -> Result<Matrix<R::Elem>> {
        check_embeds(&self.field, ring)?;
        Ok(m.map(|&x| ring.embed(x)))
    }

    /// `rho(c)` for additive parameters `c` (one per copy). No nilpotency
    /// check on `c`; see [`eval_ga_point`].
    pub fn act<R: Ring>(&self, ring: &R, c: &[R::Elem]) -> Result<Matrix<R::Elem>> {
        if c.len() != self.copies() {
            return Err(Error::DimensionMismatch(format!(
                "explicit module takes {} parameters, got {}",
                self.copies(),
                c.len()
            )));
        }
        let mut acc = Matrix::identity(ring, self.dim());
        for (j, alpha) in self.matrices.iter().enumerate() {
            let z = match self.layout {
                Layout::Frobenius => ring.frobenius(&c[0], j as u32),
                Layout::Product => c[j].clone(),
            };
            if ring.is_zero(&z) {
                continue;
            }
            let a = self.lift(ring, alpha)?.scale_by(ring, &z);
            acc = acc.mul(ring, &truncated_exp(ring, &a));
        }
        Ok(acc)
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse { line, column, message },
        other => Error::parse(line, 1, other.to_string()),
    }
}

/// Constants of `field` must make sense in `ring`: either the fields agree or
/// `field` is the prime field of the same characteristic.
pub(crate) fn check_embeds<R: Ring>(field: &FiniteField, ring: &R) -> Result<()> {
    let base = ring.base_field();
    if field.characteristic() != base.characteristic() {
        return Err(Error::CharacteristicMismatch(field.characteristic(), base.characteristic()));
    }
    if !field.is_prime_field() && field != base {
        return Err(Error::IncompatibleField(format!(
            "{} does not embed in {}",
            field.descriptor(),
            base.descriptor()
        )));
    }
    Ok(())
}

/// `sum_{i<p} B^i / i!`.
pub fn truncated_exp<R: Ring>(ring: &R, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let p = ring.characteristic();
    let f = ring.base_field();
    let mut acc = Matrix::identity(ring, b.rows());
    let mut power = Matrix::identity(ring, b.rows());
    for i in 1..p {
        power = power.mul(ring, b);
        if power.is_zero(ring) {
            break;
        }
        acc = acc.add(ring, &power.scale(ring, f.inv_factorial(i)));
    }
    acc
}

/// A square matrix together with its exact inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct UnipotentPair<E> {
    g: Matrix<E>,
    g_inv: Matrix<E>,
}

impl<E: Clone + PartialEq> UnipotentPair<E> {
    /// Checked construction: `g * g_inv` must be the identity.
    pub fn new<R: Ring<Elem = E>>(ring: &R, g: Matrix<E>, g_inv: Matrix<E>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::NotSquare(g.rows(), g.cols()));
        }
        let prod = g.try_mul(ring, &g_inv)?;
        if prod != Matrix::identity(ring, g.rows()) {
            return Err(Error::NotInversePair);
        }
        Ok(UnipotentPair { g, g_inv })
    }

    pub(crate) fn trusted(g: Matrix<E>, g_inv: Matrix<E>) -> Self {
        UnipotentPair { g, g_inv }
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        let i = Matrix::identity(ring, n);
        UnipotentPair { g: i.clone(), g_inv: i }
    }

    pub fn g(&self) -> &Matrix<E> {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix<E> {
        &self.g_inv
    }

    pub fn into_parts(self) -> (Matrix<E>, Matrix<E>) {
        (self.g, self.g_inv)
    }

    pub fn compose<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        UnipotentPair {
            g: self.g.mul(ring, &other.g),
            g_inv: other.g_inv.mul(ring, &self.g_inv),
        }
    }
}

/// A representation built from the standard module by functorial operations.
#[derive(Clone, Debug, PartialEq)]
pub enum ModuleExpr {
    Std(usize),
    Trivial(usize),
    Dual(Box<ModuleExpr>),
    Tensor(Box<ModuleExpr>, Box<ModuleExpr>),
    DirectSum(Box<ModuleExpr>, Box<ModuleExpr>),
    Sym(u32, Box<ModuleExpr>),
    Ext(u32, Box<ModuleExpr>),
    Twist(u32, Box<ModuleExpr>),
    Explicit(ExplicitModule),
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl ModuleExpr {
    pub fn std(n: usize) -> Self {
        ModuleExpr::Std(n)
    }

    pub fn tensor(a: ModuleExpr, b: ModuleExpr) -> Self {
        ModuleExpr::Tensor(Box::new(a), Box::new(b))
    }

    pub fn sum(a: ModuleExpr, b: ModuleExpr) -> Self {
        ModuleExpr::DirectSum(Box::new(a), Box::new(b))
    }

    pub fn sym(d: u32, e: ModuleExpr) -> Self {
        ModuleExpr::Sym(d, Box::new(e))
    }

    pub fn ext(d: u32, e: ModuleExpr) -> Self {
        ModuleExpr::Ext(d, Box::new(e))
    }

    pub fn twist(i: u32, e: ModuleExpr) -> Self {
        ModuleExpr::Twist(i, Box::new(e))
    }

    pub fn dual(e: ModuleExpr) -> Self {
        ModuleExpr::Dual(Box::new(e))
    }

    pub fn dim(&self) -> Result<usize> {
        let overflow = || Error::CapExceeded("module dimension overflows".into());
        Ok(match self {
            ModuleExpr::Std(n) => *n,
            ModuleExpr::Trivial(d) => *d,
            ModuleExpr::Dual(e) | ModuleExpr::Twist(_, e) => e.dim()?,
            ModuleExpr::Tensor(a, b) => a.dim()?.checked_mul(b.dim()?).ok_or_else(overflow)?,
            ModuleExpr::DirectSum(a, b) => a.dim()? + b.dim()?,
            ModuleExpr::Sym(d, e) => {
                let n = e.dim()?;
                if n == 0 {
                    (*d == 0) as usize
                } else {
                    binomial(n + *d as usize - 1, *d as usize).ok_or_else(overflow)?
                }
            }
            ModuleExpr::Ext(d, e) => binomial(e.dim()?, *d as usize).ok_or_else(overflow)?,
            ModuleExpr::Explicit(m) => m.dim(),
        })
    }

    /// Size of the standard module every `Std` leaf must agree on, if any.
    pub fn std_size(&self) -> Result<Option<usize>> {
        let merge = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (Some(x), Some(y)) if x != y => Err(Error::MalformedModule(format!(
                "standard modules of sizes {x} and {y} in one expression"
            ))),
            (x, y) => Ok(x.or(y)),
        };
        match self {
            ModuleExpr::Std(n) => Ok(Some(*n)),
            ModuleExpr::Trivial(_) | ModuleExpr::Explicit(_) => Ok(None),
            ModuleExpr::Dual(e) | ModuleExpr::Twist(_, e) | ModuleExpr::Sym(_, e) | ModuleExpr::Ext(_, e) => {
                e.std_size()
            }
            ModuleExpr::Tensor(a, b) | ModuleExpr::DirectSum(a, b) => merge(a.std_size()?, b.std_size()?),
        }
    }

    /// Explicit leaves of the expression, left to right.
    pub fn explicit_leaves(&self) -> Vec<&ExplicitModule> {
        let mut out = Vec::new();
        self.collect_explicit(&mut out);
        out
    }

    fn collect_explicit<'a>(&'a self, out: &mut Vec<&'a ExplicitModule>) {
        match self {
            ModuleExpr::Explicit(m) => out.push(m),
            ModuleExpr::Std(_) | ModuleExpr::Trivial(_) => {}
            ModuleExpr::Dual(e) | ModuleExpr::Twist(_, e) | ModuleExpr::Sym(_, e) | ModuleExpr::Ext(_, e) => {
                e.collect_explicit(out)
            }
            ModuleExpr::Tensor(a, b) | ModuleExpr::DirectSum(a, b) => {
                a.collect_explicit(out);
                b.collect_explicit(out);
            }
        }
    }

    /// Degrees at or above `p` in `Sym`/`Ext` nodes, where the closed forms
    /// for polynomial representations of low degree no longer apply.
    pub fn warnings(&self, p: u32) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_warnings(p, &mut out);
        out
    }

    fn collect_warnings(&self, p: u32, out: &mut Vec<String>) {
        match self {
            ModuleExpr::Sym(d, e) | ModuleExpr::Ext(d, e) => {
                if *d >= p {
                    out.push(format!("degree {d} >= p in {self}"));
                }
                e.collect_warnings(p, out);
            }
            ModuleExpr::Dual(e) | ModuleExpr::Twist(_, e) => e.collect_warnings(p, out),
            ModuleExpr::Tensor(a, b) | ModuleExpr::DirectSum(a, b) => {
                a.collect_warnings(p, out);
                b.collect_warnings(p, out);
            }
            ModuleExpr::Std(_) | ModuleExpr::Trivial(_) | ModuleExpr::Explicit(_) => {}
        }
    }

    /// Parse the module grammar, resolving `Explicit(file=...)` from disk.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with(s, &|path: &str| {
            let text = std::fs::read_to_string(Path::new(path))?;
            ExplicitModule::from_file_contents(path, &text)
        })
    }

    /// Parse with a custom loader for `Explicit(file=...)`.
    pub fn parse_with(s: &str, load: &dyn Fn(&str) -> Result<ExplicitModule>) -> Result<Self> {
        let mut p = ExprParser { src: s.as_bytes(), pos: 0, load };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        if e.dim()? == 0 && !matches!(e, ModuleExpr::Trivial(0)) {
            return Err(Error::MalformedModule(format!("{e} has dimension 0")));
        }
        Ok(e)
    }

    /// `rho(g)` and its inverse, computed structurally.
    pub fn eval_unipotent<R: Ring>(&self, ring: &R, gp: &UnipotentPair<R::Elem>) -> Result<UnipotentPair<R::Elem>> {
        if let Some(n) = self.std_size()? {
            if n != gp.g.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "Std({n}) evaluated on a {}x{} group element",
                    gp.g.rows(),
                    gp.g.cols()
                )));
            }
        }
        let dim = self.dim()?;
        if dim > DEFAULT_FUNCTOR_CAP {
            return Err(Error::CapExceeded(format!("module dimension {dim} above {DEFAULT_FUNCTOR_CAP}")));
        }
        self.eval_rec(ring, gp)
    }

    fn eval_rec<R: Ring>(&self, ring: &R, gp: &UnipotentPair<R::Elem>) -> Result<UnipotentPair<R::Elem>> {
        Ok(match self {
            ModuleExpr::Std(_) => gp.clone(),
            ModuleExpr::Trivial(d) => UnipotentPair::identity(ring, *d),
            ModuleExpr::Dual(e) => {
                let inner = e.eval_rec(ring, gp)?;
                UnipotentPair::trusted(inner.g_inv.transpose(), inner.g.transpose())
            }
            ModuleExpr::Tensor(a, b) => {
                let x = a.eval_rec(ring, gp)?;
                let y = b.eval_rec(ring, gp)?;
                UnipotentPair::trusted(x.g.kron(ring, &y.g), x.g_inv.kron(ring, &y.g_inv))
            }
            ModuleExpr::DirectSum(a, b) => {
                let x = a.eval_rec(ring, gp)?;
                let y = b.eval_rec(ring, gp)?;
                UnipotentPair::trusted(
                    Matrix::block_diag(ring, &[x.g, y.g]),
                    Matrix::block_diag(ring, &[x.g_inv, y.g_inv]),
                )
            }
            ModuleExpr::Sym(d, e) => {
                let x = e.eval_rec(ring, gp)?;
                UnipotentPair::trusted(sym_power(ring, &x.g, *d), sym_power(ring, &x.g_inv, *d))
            }
            ModuleExpr::Ext(d, e) => {
                let x = e.eval_rec(ring, gp)?;
                UnipotentPair::trusted(ext_power(ring, &x.g, *d)?, ext_power(ring, &x.g_inv, *d)?)
            }
            ModuleExpr::Twist(i, e) => {
                let twisted = UnipotentPair::trusted(gp.g.frobenius(ring, *i), gp.g_inv.frobenius(ring, *i));
                e.eval_rec(ring, &twisted)?
            }
            ModuleExpr::Explicit(m) => {
                let c = additive_coordinates::<R>(&gp.g, m.copies())?;
                let neg: Vec<R::Elem> = c.iter().map(|x| ring.neg(x)).collect();
                UnipotentPair::trusted(m.act(ring, &c)?, m.act(ring, &neg)?)
            }
        })
    }
}

/// Read `c_0, ..., c_{s-1}` off `blockdiag([[1, c_i], [0, 1]])`.
fn additive_coordinates<R: Ring>(g: &Matrix<R::Elem>, s: usize) -> Result<Vec<R::Elem>> {
    if g.rows() != 2 * s || g.cols() != 2 * s {
        return Err(Error::MalformedModule(format!(
            "explicit module with {s} additive parameter(s) needs a {0}x{0} additive group element, got {1}x{2}",
            2 * s,
            g.rows(),
            g.cols()
        )));
    }
    Ok((0..s).map(|i| g[(2 * i, 2 * i + 1)].clone()).collect())
}

/// Exponent vectors of degree `d` in `n` variables, descending lexicographic.
pub fn sym_basis(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Action of `g` on degree-`d` polynomials, `x_j -> sum_i g_ij x_i`.
pub fn sym_power<R: Ring>(ring: &R, g: &Matrix<R::Elem>, d: u32) -> Matrix<R::Elem> {
    let n = g.rows();
    let basis = sym_basis(n, d);
    let index: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(k, v)| (v.as_slice(), k)).collect();
    let dim = basis.len();
    let mut out = Matrix::zeros(ring, dim, dim);
    for (col, mono) in basis.iter().enumerate() {
        let mut poly: HashMap<Vec<u32>, R::Elem> = HashMap::new();
        poly.insert(vec![0; n], ring.one());
        for (j, &e) in mono.iter().enumerate() {
            for _ in 0..e {
                let mut next: HashMap<Vec<u32>, R::Elem> = HashMap::new();
                for (exps, c) in &poly {
                    for i in 0..n {
                        let gij = &g[(i, j)];
                        if ring.is_zero(gij) {
                            continue;
                        }
                        let mut key = exps.clone();
                        key[i] += 1;
                        let term = ring.mul(c, gij);
                        let slot = next.entry(key).or_insert_with(|| ring.zero());
                        *slot = ring.add(slot, &term);
                    }
                }
                poly = next;
            }
        }
        for (exps, c) in poly {
            if !ring.is_zero(&c) {
                out[(index[exps.as_slice()], col)] = c;
            }
        }
    }
    out
}

/// Action on `Lambda^d` in the basis of increasing index subsets: the
/// `(T, S)` entry is the minor of `g` on rows `T` and columns `S`.
pub fn ext_power<R: Ring>(ring: &R, g: &Matrix<R::Elem>, d: u32) -> Result<Matrix<R::Elem>> {
    let n = g.rows();
    let d = d as usize;
    if d == 0 {
        return Ok(Matrix::identity(ring, 1));
    }
    if d > n {
        return Ok(Matrix::zeros(ring, 0, 0));
    }
    let c = binomial(n, d).unwrap();
    Ok(Matrix::from_vec(c, c, minors(ring, g, d)?))
}

/// `rho(c) = prod_j texp(c^{p^j} alpha_j)` for a Frobenius-layout module, or
/// `prod_i texp(c_i alpha_i)` for a product layout; `c` must satisfy
/// `c^{p^h} = 0` where `h` is the module height. The inverse uses `-c`.
pub fn eval_ga_point<R: Ring>(ring: &R, m: &ExplicitModule, c: &[R::Elem]) -> Result<UnipotentPair<R::Elem>> {
    let height = match m.layout {
        Layout::Frobenius => m.matrices.len() as u32,
        Layout::Product => 1,
    };
    for x in c {
        if !ring.is_zero(&ring.frobenius(x, height)) {
            return Err(Error::OutOfRange(format!(
                "parameter is not killed by the {height}-th Frobenius power"
            )));
        }
    }
    let neg: Vec<R::Elem> = c.iter().map(|x| ring.neg(x)).collect();
    Ok(UnipotentPair::trusted(m.act(ring, c)?, m.act(ring, &neg)?))
}

/// First failure found when checking a list of matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TupleViolation {
    NotSquare(usize),
    SizeMismatch(usize),
    NotNilpotent(usize),
    NotCommuting(usize, usize),
}

impl fmt::Display for TupleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TupleViolation::NotSquare(i) => write!(f, "matrix {i} is not square"),
            TupleViolation::SizeMismatch(i) => write!(f, "matrix {i} has a different size"),
            TupleViolation::NotNilpotent(i) => write!(f, "matrix {i} is not p-nilpotent"),
            TupleViolation::NotCommuting(i, j) => write!(f, "matrices {i} and {j} do not commute"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TupleCheck {
    Ok,
    Violation(TupleViolation),
}

/// Shape, then `B_i^p = 0` for each `i`, then `[B_i, B_j] = 0` for `i < j`.
pub fn validate_commuting_tuple<R: Ring>(ring: &R, mats: &[Matrix<R::Elem>]) -> TupleCheck {
    let p = ring.characteristic() as u64;
    let n = mats.first().map_or(0, Matrix::rows);
    for (i, m) in mats.iter().enumerate() {
        if !m.is_square() {
            return TupleCheck::Violation(TupleViolation::NotSquare(i));
        }
        if m.rows() != n {
            return TupleCheck::Violation(TupleViolation::SizeMismatch(i));
        }
    }
    for (i, m) in mats.iter().enumerate() {
        if !m.pow(ring, p).is_zero(ring) {
            return TupleCheck::Violation(TupleViolation::NotNilpotent(i));
        }
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if !mats[i].commutator(ring, &mats[j]).is_zero(ring) {
                return TupleCheck::Violation(TupleViolation::NotCommuting(i, j));
            }
        }
    }
    TupleCheck::Ok
}

impl fmt::Display for ModuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleExpr::Std(n) => write!(f, "Std({n})"),
            ModuleExpr::Trivial(d) => write!(f, "Trivial({d})"),
            ModuleExpr::Dual(e) => write!(f, "Dual({e})"),
            ModuleExpr::Sym(d, e) => write!(f, "Sym({d},{e})"),
            ModuleExpr::Ext(d, e) => write!(f, "Ext({d},{e})"),
            ModuleExpr::Twist(i, e) => write!(f, "Tw({i},{e})"),
            ModuleExpr::Explicit(m) => write!(f, "Explicit({})", m.label),
            ModuleExpr::Tensor(a, b) => {
                let wrap = |e: &ModuleExpr, right: bool| match e {
                    ModuleExpr::DirectSum(..) => format!("({e})"),
                    ModuleExpr::Tensor(..) if right => format!("({e})"),
                    _ => e.to_string(),
                };
                write!(f, "{}*{}", wrap(a, false), wrap(b, true))
            }
            ModuleExpr::DirectSum(a, b) => match **b {
                ModuleExpr::DirectSum(..) => write!(f, "{a}+({b})"),
                _ => write!(f, "{a}+{b}"),
            },
        }
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    load: &'a dyn Fn(&str) -> Result<ExplicitModule>,
}

impl ExprParser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(1, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse(1, start + 1, "expected a nonnegative integer"))
    }

    fn sum(&mut self) -> Result<ModuleExpr> {
        let mut acc = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            acc = ModuleExpr::sum(acc, self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<ModuleExpr> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = ModuleExpr::tensor(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<ModuleExpr> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.sum()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        let name = self.ident()?;
        self.expect(b'(')?;
        let e = match name.as_str() {
            "Std" => ModuleExpr::Std(self.number()? as usize),
            "Trivial" => ModuleExpr::Trivial(self.number()? as usize),
            "Dual" => ModuleExpr::dual(self.sum()?),
            "Sym" | "Ext" | "Tw" | "Twist" => {
                let k = self.number()?;
                self.expect(b',')?;
                let inner = self.sum()?;
                match name.as_str() {
                    "Sym" => ModuleExpr::sym(k, inner),
                    "Ext" => ModuleExpr::ext(k, inner),
                    _ => ModuleExpr::twist(k, inner),
                }
            }
            "Tensor" | "Sum" => {
                let a = self.sum()?;
                self.expect(b',')?;
                let b = self.sum()?;
                if name == "Tensor" {
                    ModuleExpr::tensor(a, b)
                } else {
                    ModuleExpr::sum(a, b)
                }
            }
            "Explicit" => ModuleExpr::Explicit(self.explicit()?),
            _ => return Err(Error::parse(1, start + 1, format!("unknown constructor `{name}`"))),
        };
        self.expect(b')')?;
        Ok(e)
    }

    /// `file=path`, or a built-in name followed by `key=value` options.
    fn explicit(&mut self) -> Result<ExplicitModule> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0;
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'(' => depth += 1,
                b')' if depth == 0 => break,
                b')' => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        let body = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        let at = |msg: String| Error::parse(1, start + 1, msg);
        let mut parts = body.split(',').map(str::trim);
        let head = parts.next().unwrap_or("");
        if let Some(path) = head.strip_prefix("file=") {
            if parts.next().is_some() {
                return Err(at("`file=` takes no further options".into()));
            }
            return (self.load)(path.trim());
        }
        let mut opts: HashMap<&str, &str> = HashMap::new();
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| at(format!("expected key=value, got `{kv}`")))?;
            if opts.insert(k.trim(), v.trim()).is_some() {
                return Err(at(format!("duplicate option `{}`", k.trim())));
            }
        }
        let num = |key: &str| -> Result<u32> {
            opts.get(key)
                .ok_or_else(|| at(format!("`{head}` needs `{key}=`")))?
                .parse()
                .map_err(|_| at(format!("bad value for `{key}`")))
        };
        let layout = match opts.get("layout").copied() {
            None | Some("frobenius") => Layout::Frobenius,
            Some("product") => Layout::Product,
            Some(other) => return Err(at(format!("unknown layout `{other}`"))),
        };
        let allowed: &[&str] = match head {
            "ex74" => &["p"],
            "regular" => &["p", "r", "layout"],
            _ => return Err(at(format!("unknown built-in module `{head}`"))),
        };
        if let Some(k) = opts.keys().find(|k| !allowed.contains(k)) {
            return Err(at(format!("unknown option `{k}` for `{head}`")));
        }
        match head {
            "ex74" => ExplicitModule::ex74(num("p")?),
            _ => ExplicitModule::regular(num("p")?, num("r")?, layout),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TruncatedCurveRing;

    fn f(p: u32) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn fe(rows: &[&[u32]]) -> Matrix<Fe> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Fe(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn dimensions() {
        let d = |s: &str| ModuleExpr::parse(s).unwrap().dim().unwrap();
        assert_eq!(d("Sym(2,Std(2))"), 3);
        assert_eq!(d("Std(2)*Tw(1,Std(2))"), 4);
        assert_eq!(d("Ext(2,Std(3))"), 3);
        assert_eq!(d("Std(2)+Dual(Std(2))*Trivial(3)"), 8);
        assert_eq!(d("Explicit(ex74,p=5)"), 10);
        assert_eq!(d("Explicit(regular,p=3,r=2)"), 9);
    }

    #[test]
    fn parse_and_display() {
        for s in [
            "Sym(1,Std(2))*Tw(1,Sym(1,Std(2)))",
            "Std(2)+Dual(Std(2))",
            "(Std(2)+Std(2))*Std(2)",
            "Std(2)*(Std(2)*Std(2))",
            "Explicit(ex74,p=5)",
        ] {
            assert_eq!(ModuleExpr::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(ModuleExpr::parse("Twist(1, Std(2))").unwrap().to_string(), "Tw(1,Std(2))");
        assert!(matches!(ModuleExpr::parse("Sym(2,Std(2)"), Err(Error::Parse { .. })));
        assert!(matches!(ModuleExpr::parse("Foo(2)"), Err(Error::Parse { column: 1, .. })));
        assert!(ModuleExpr::parse("Explicit(ex74)").is_err());
        assert!(ModuleExpr::parse("Explicit(ex74,p=5,q=2)").is_err());
        assert!(ModuleExpr::parse("Std(0)").is_err());
        assert!(ModuleExpr::parse("Std(2)*Std(3)").unwrap().std_size().is_err());
    }

    #[test]
    fn explicit_file_loader() {
        let text = "field = GF(3)\nlayout = product\nmatrix\n0 1\n0 0\nmatrix\n0 2\n0 0\n";
        let e = ModuleExpr::parse_with("Explicit(file=m.txt)", &|path| {
            ExplicitModule::from_file_contents(path, text)
        })
        .unwrap();
        let ModuleExpr::Explicit(m) = &e else { panic!() };
        assert_eq!(m.copies(), 2);
        assert_eq!(m.matrices()[1], fe(&[&[0, 2], &[0, 0]]));
        let bad = ExplicitModule::from_file_contents("x", "field = GF(3)\nmatrix\n1 0\n0 0\n");
        assert!(matches!(bad, Err(Error::InvalidTuple(_))));
        let err = ExplicitModule::from_file_contents("x", "field = GF(3)\nmatrix\n0 z\n");
        assert!(matches!(err, Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn sym_square_of_unipotent() {
        let rg = TruncatedCurveRing::of_height(f(3), 2);
        let t = rg.t();
        let g = Matrix::from_vec(2, 2, vec![rg.one(), t.clone(), rg.zero(), rg.one()]);
        let s = sym_power(&rg, &g, 2);
        let two_t = rg.scale(Fe(2), &t);
        let expect = Matrix::from_vec(
            3,
            3,
            vec![
                rg.one(), t.clone(), rg.mul(&t, &t),
                rg.zero(), rg.one(), two_t,
                rg.zero(), rg.zero(), rg.one(),
            ],
        );
        assert_eq!(s, expect);
    }

    #[test]
    fn std_and_twist_evaluation() {
        let rg = TruncatedCurveRing::of_height(f(3), 2);
        let t = rg.t();
        let g = Matrix::from_vec(2, 2, vec![rg.one(), t.clone(), rg.zero(), rg.one()]);
        let gi = Matrix::from_vec(2, 2, vec![rg.one(), rg.neg(&t), rg.zero(), rg.one()]);
        let gp = UnipotentPair::new(&rg, g, gi).unwrap();
        let id = UnipotentPair::identity(&rg, 2);
        assert_eq!(ModuleExpr::std(2).eval_unipotent(&rg, &id).unwrap(), id);
        let tw = ModuleExpr::twist(1, ModuleExpr::std(2)).eval_unipotent(&rg, &gp).unwrap();
        assert_eq!(tw.g()[(0, 1)], rg.pow(&t, 3));
        assert!(UnipotentPair::new(&rg, gp.g().clone(), gp.g().clone()).is_err());
    }

    #[test]
    fn ga_points() {
        let rg5 = TruncatedCurveRing::of_height(f(5), 1);
        let j2 = fe(&[&[0, 1], &[0, 0]]);
        let m = ExplicitModule::new("j2", f(5), Layout::Frobenius, vec![j2.clone()]).unwrap();
        let got = eval_ga_point(&rg5, &m, &[rg5.t()]).unwrap();
        let expect = Matrix::identity(&rg5, 2).add(&rg5, &j2.map(|&x| rg5.lift(x)).scale_by(&rg5, &rg5.t()));
        assert_eq!(got.g(), &expect);
        let zero = eval_ga_point(&rg5, &m, &[rg5.zero()]).unwrap();
        assert_eq!(zero.g(), &Matrix::identity(&rg5, 2));

        let rg3 = TruncatedCurveRing::of_height(f(3), 2);
        let m2 = ExplicitModule::new("m2", f(3), Layout::Frobenius, vec![Matrix::zeros(&f(3), 2, 2), fe(&[&[0, 1], &[0, 0]])]).unwrap();
        let got = eval_ga_point(&rg3, &m2, &[rg3.t()]).unwrap();
        assert_eq!(got.g()[(0, 1)], rg3.pow(&rg3.t(), 3));
        assert_eq!(got.g()[(0, 0)], rg3.one());
        let rg_big = TruncatedCurveRing::of_height(f(3), 3);
        assert!(eval_ga_point(&rg_big, &m2, &[rg_big.t()]).is_err());
    }

    #[test]
    fn tuple_validation() {
        let f3 = f(3);
        let j2 = fe(&[&[0, 1], &[0, 0]]);
        assert_eq!(validate_commuting_tuple(&f3, &[j2.clone(), j2.clone()]), TupleCheck::Ok);
        let d = fe(&[&[1, 0], &[0, 0]]);
        assert_eq!(
            validate_commuting_tuple(&f3, &[j2, d]),
            TupleCheck::Violation(TupleViolation::NotNilpotent(1))
        );
        let f5 = f(5);
        let e12 = fe(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let e23 = fe(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(
            validate_commuting_tuple(&f5, &[e12.clone(), e23.clone()]),
            TupleCheck::Violation(TupleViolation::NotCommuting(0, 1))
        );
        assert_eq!(e12.commutator(&f5, &e23), fe(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]));
    }

    #[test]
    fn ex74_and_regular_shapes() {
        let m = ExplicitModule::ex74(5).unwrap();
        assert_eq!(m.matrices().len(), 5);
        assert_eq!(m.dim(), 10);
        let r = ExplicitModule::regular(3, 2, Layout::Frobenius).unwrap();
        assert_eq!(r.dim(), 9);
        // u_0 * u_1 sends 1 to u_0 u_1 (index 1 + 3)
        let prod = r.matrices()[0].mul(&f(3), &r.matrices()[1]);
        assert_eq!(prod[(4, 0)], Fe::ONE);
    }

}
