use std::collections::HashMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use super::{Fe, Field, IntegralDomain, Ring};
use crate::error::{Error, Result};

/// Dense row-major matrix. The coefficient domain is the type parameter;
/// arithmetic takes the ring object that gives the entries meaning.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, ring.zero())
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<F, G: FnMut(&E) -> F>(&self, f: G) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<F, G: FnMut(&E) -> Result<F>>(&self, f: G) -> Result<Matrix<F>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Matrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<E>]) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                data.push(c[i].clone());
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| ring.add(a, b))
                .collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| ring.sub(a, b))
                .collect(),
        }
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(|x| ring.neg(x))
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, c: Fe) -> Self {
        self.map(|x| ring.scale(c, x))
    }

    pub fn scale_by<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        self.try_mul(ring, other).expect("matrix product shape mismatch")
    }

    pub fn try_mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![ring.zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if ring.is_zero(b) {
                        continue;
                    }
                    let slot = &mut data[i * other.cols + j];
                    *slot = ring.add(slot, &ring.mul(a, b));
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn pow<R: Ring<Elem = E>>(&self, ring: &R, k: u64) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Self::identity(ring, self.rows);
        for _ in 0..k {
            acc = acc.mul(ring, self);
        }
        acc
    }

    /// Kronecker product; basis `e_i (x) f_j` ordered with `j` fastest.
    pub fn kron<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![ring.zero(); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if ring.is_zero(a) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = &other[(k, l)];
                        if ring.is_zero(b) {
                            continue;
                        }
                        data[(i * other.rows + k) * cols + j * other.cols + l] = ring.mul(a, b);
                    }
                }
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn block_diag<R: Ring<Elem = E>>(ring: &R, blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn frobenius<R: Ring<Elem = E>>(&self, ring: &R, e: u32) -> Self {
        self.map(|x| ring.frobenius(x, e))
    }

    pub fn commutator<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        self.mul(ring, other).sub(ring, &other.mul(ring, self))
    }

    pub fn apply<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ring.zero(), |acc, (a, b)| ring.add(&acc, &ring.mul(a, b)))
            })
            .collect()
    }

    pub fn display<'a, R: Ring<Elem = E>>(&'a self, ring: &'a R) -> DisplayMatrix<'a, R> {
        DisplayMatrix { m: self, ring }
    }
}

pub struct DisplayMatrix<'a, R: Ring> {
    m: &'a Matrix<R::Elem>,
    ring: &'a R,
}

impl<R: Ring> fmt::Display for DisplayMatrix<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.m.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.m.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                self.ring.fmt_elem(&self.m[(i, j)], f)?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(field: &F, m: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(pr) = (row..a.rows).find(|&i| !field.is_zero(&a[(i, col)])) else {
            continue;
        };
        if pr != row {
            for j in 0..a.cols {
                a.data.swap(pr * a.cols + j, row * a.cols + j);
            }
        }
        let inv = field.inv(&a[(row, col)]).expect("nonzero pivot");
        for j in col..a.cols {
            a[(row, j)] = field.mul(&a[(row, j)], &inv);
        }
        for i in 0..a.rows {
            if i == row || field.is_zero(&a[(i, col)]) {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                let v = field.sub(&a[(i, j)], &field.mul(&factor, &a[(row, j)]));
                a[(i, j)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Inverse over a field, or `NotInvertible`.
pub fn inverse<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    let (r, pivots) = rref(field, &m.hcat(&Matrix::identity(field, n)));
    if n > 0 && pivots[n - 1] != n - 1 {
        return Err(Error::NotInvertible);
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Ok(r.submatrix(&rows, &cols))
}

/// Rank by pivoted Gaussian elimination (forward pass only).
pub fn gaussian_rank<F: Field + ?Sized>(field: &F, m: &Matrix<F::Elem>) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(pr) = (rank..a.rows).find(|&i| !field.is_zero(&a[(i, col)])) else {
            continue;
        };
        if pr != rank {
            for j in 0..a.cols {
                a.data.swap(pr * a.cols + j, rank * a.cols + j);
            }
        }
        let inv = field.inv(&a[(rank, col)]).expect("nonzero pivot");
        for i in rank + 1..a.rows {
            if field.is_zero(&a[(i, col)]) {
                continue;
            }
            let factor = field.mul(&a[(i, col)], &inv);
            for j in col..a.cols {
                let v = field.sub(&a[(i, j)], &field.mul(&factor, &a[(rank, j)]));
                a[(i, j)] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank over a field.
pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    field.matrix_rank(m)
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column.
pub fn kernel_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(field, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); m.cols];
            v[f] = field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(&r[(row, f)]);
            }
            v
        })
        .collect()
}

/// Rank over the fraction field of an integral domain, by fraction-free
/// (Bareiss) elimination.
pub fn bareiss_rank<D: IntegralDomain>(dom: &D, m: &Matrix<D::Elem>) -> usize {
    let mut a = m.clone();
    let mut prev = dom.one();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(pr) = (rank..a.rows).find(|&i| !dom.is_zero(&a[(i, col)])) else {
            continue;
        };
        if pr != rank {
            for j in 0..a.cols {
                a.data.swap(pr * a.cols + j, rank * a.cols + j);
            }
        }
        let pivot = a[(rank, col)].clone();
        for i in rank + 1..a.rows {
            let lead = a[(i, col)].clone();
            for j in col..a.cols {
                let v = dom.sub(
                    &dom.mul(&pivot, &a[(i, j)]),
                    &dom.mul(&lead, &a[(rank, j)]),
                );
                a[(i, j)] = dom
                    .exact_div(&v, &prev)
                    .expect("Bareiss division is exact");
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Determinants of the square submatrices on `rows` and every column subset
/// of size `rows.len()`, keyed by column bitmask. Laplace expansion along
/// rows with memoisation over column subsets.
fn minors_for_rows<R: Ring>(ring: &R, m: &Matrix<R::Elem>, rows: &[usize]) -> HashMap<u64, R::Elem> {
    let n = m.cols;
    let mut level: HashMap<u64, R::Elem> = HashMap::new();
    level.insert(0, ring.one());
    for (depth, &r) in rows.iter().enumerate() {
        let mut next: HashMap<u64, R::Elem> = HashMap::new();
        for (&mask, val) in &level {
            if ring.is_zero(val) {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let a = &m[(r, j)];
                if ring.is_zero(a) {
                    continue;
                }
                // j is inserted into the sorted column list at position pos;
                // expanding along the last row gives sign (-1)^(depth + pos)
                let pos = (mask & ((1u64 << j) - 1)).count_ones() as usize;
                let term = ring.mul(val, a);
                let term = if (depth + pos) % 2 == 1 { ring.neg(&term) } else { term };
                let key = mask | (1 << j);
                let slot = next.entry(key).or_insert_with(|| ring.zero());
                *slot = ring.add(slot, &term);
            }
        }
        level = next;
    }
    level
}

/// Determinant over any commutative ring.
pub fn determinant<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Result<R::Elem> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows, m.cols));
    }
    if m.rows > 63 {
        return Err(Error::CapExceeded("determinant size above 63".into()));
    }
    let rows: Vec<usize> = (0..m.rows).collect();
    let full = if m.rows == 0 { 0 } else { (1u64 << m.rows) - 1 };
    Ok(minors_for_rows(ring, m, &rows)
        .remove(&full)
        .unwrap_or_else(|| ring.zero()))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All `size x size` minors, ordered by row subset then column subset (both
/// lexicographic).
pub fn minors<R: Ring>(ring: &R, m: &Matrix<R::Elem>, size: usize) -> Result<Vec<R::Elem>> {
    if size == 0 || size > m.rows.min(m.cols) {
        return Err(Error::OutOfRange(format!(
            "minor size {size} outside 1..={}",
            m.rows.min(m.cols)
        )));
    }
    if m.cols > 63 {
        return Err(Error::CapExceeded("more than 63 columns".into()));
    }
    let col_sets: Vec<u64> = combinations(m.cols, size)
        .into_iter()
        .map(|c| c.iter().fold(0u64, |acc, &j| acc | (1 << j)))
        .collect();
    let mut out = Vec::new();
    for rows in combinations(m.rows, size) {
        let dets = minors_for_rows(ring, m, &rows);
        for mask in &col_sets {
            out.push(dets.get(mask).cloned().unwrap_or_else(|| ring.zero()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FiniteField, PolyRing};
    use proptest::prelude::*;

    fn fe_matrix(rows: &[&[u32]]) -> Matrix<Fe> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Fe(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(rank(&f5, &Matrix::identity(&f5, 3)), 3);
        let f3 = FiniteField::prime(3).unwrap();
        assert_eq!(rank(&f3, &fe_matrix(&[&[0, 1], &[0, 0]])), 1);
    }

    #[test]
    fn inverse_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        let m = fe_matrix(&[&[1, 2], &[3, 4]]);
        let inv = inverse(&f5, &m).unwrap();
        assert_eq!(m.mul(&f5, &inv), Matrix::identity(&f5, 2));
        assert_eq!(inverse(&f5, &fe_matrix(&[&[1, 2], &[2, 4]])), Err(Error::NotInvertible));
    }

    #[test]
    fn kernel_examples() {
        let f3 = FiniteField::prime(3).unwrap();
        let z = Matrix::zeros(&f3, 2, 3);
        assert_eq!(kernel_basis(&f3, &z).len(), 3);
        assert!(kernel_basis(&f3, &Matrix::identity(&f3, 3)).is_empty());
        let j2 = fe_matrix(&[&[0, 1], &[0, 0]]);
        assert_eq!(kernel_basis(&f3, &j2), vec![vec![Fe(1), Fe(0)]]);
    }

    #[test]
    fn minors_examples() {
        let f3 = FiniteField::prime(3).unwrap();
        let r = PolyRing::new(f3, &["x", "y"]).unwrap();
        let x = r.var("x").unwrap();
        let y = r.var("y").unwrap();
        let diag = Matrix::from_vec(2, 2, vec![x.clone(), r.zero(), r.zero(), y.clone()]);
        assert_eq!(minors(&r, &diag, 2).unwrap(), vec![r.mul(&x, &y)]);
        let m = Matrix::from_vec(2, 2, vec![x.clone(), r.zero(), r.zero(), r.zero()]);
        assert_eq!(minors(&r, &m, 1).unwrap(), vec![x.clone(), r.zero(), r.zero(), r.zero()]);
        let s = Matrix::from_vec(2, 2, vec![x.clone(), y.clone(), y.clone(), x.clone()]);
        assert_eq!(minors(&r, &s, 2).unwrap(), vec![r.parse("x^2 - y^2").unwrap()]);
        assert!(minors(&r, &s, 3).is_err());
        assert!(minors(&r, &s, 0).is_err());
    }

    fn leibniz(f: &FiniteField, m: &Matrix<Fe>) -> Fe {
        // brute-force permutation expansion
        let n = m.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Fe(0);
        fn heap(k: usize, perm: &mut Vec<usize>, f: &FiniteField, m: &Matrix<Fe>, total: &mut Fe) {
            if k == 1 {
                let mut inv = 0;
                for i in 0..perm.len() {
                    for j in i + 1..perm.len() {
                        if perm[i] > perm[j] {
                            inv += 1;
                        }
                    }
                }
                let mut t = Fe(1);
                for (i, &j) in perm.iter().enumerate() {
                    t = f.mul(t, m[(i, j)]);
                }
                *total = if inv % 2 == 0 { f.add(*total, t) } else { f.sub(*total, t) };
                return;
            }
            for i in 0..k {
                heap(k - 1, perm, f, m, total);
                if k % 2 == 0 {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
            }
        }
        if n == 0 {
            return Fe(1);
        }
        heap(n, &mut perm, f, m, &mut total);
        total
    }

    proptest! {
        #[test]
        fn rank_invariants(entries in prop::collection::vec(0u32..5, 12), scalar in 1u32..5) {
            let f = FiniteField::prime(5).unwrap();
            let m = Matrix::from_vec(3, 4, entries.into_iter().map(Fe).collect());
            let r = rank(&f, &m);
            prop_assert_eq!(r, rank(&f, &m.transpose()));
            prop_assert_eq!(r, rank(&f, &m.scale(&f, Fe(scalar))));
            prop_assert_eq!(kernel_basis(&f, &m).len(), 4 - r);
            for v in kernel_basis(&f, &m) {
                prop_assert!(m.apply(&f, &v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn determinant_matches_leibniz(entries in prop::collection::vec(0u32..7, 16)) {
            let f = FiniteField::prime(7).unwrap();
            let m = Matrix::from_vec(4, 4, entries.into_iter().map(Fe).collect());
            prop_assert_eq!(determinant(&f, &m).unwrap(), leibniz(&f, &m));
            let nonsingular = !determinant(&f, &m).unwrap().is_zero();
            prop_assert_eq!(nonsingular, rank(&f, &m) == 4);
        }
    }
}
