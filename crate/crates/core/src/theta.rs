//! Pointwise and chart-level realisations of the universal p-nilpotent
//! operators attached to a commuting tuple `(B_0, ..., B_{r-1})`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{inverse, Fe, Field, Matrix, Ring, TruncElem, TruncatedCurveRing};
use crate::jordan::{jt_of_nilpotent, JordanType};
use crate::modules::{check_embeds, truncated_exp, validate_commuting_tuple, ExplicitModule, ModuleExpr, TupleCheck, UnipotentPair};

/// Pairwise commuting p-nilpotent `N x N` matrices `B_0, ..., B_{r-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingTuple<E> {
    mats: Vec<Matrix<E>>,
}

impl<E: Clone + PartialEq> CommutingTuple<E> {
    /// Validated construction.
    pub fn new<R: Ring<Elem = E>>(ring: &R, mats: Vec<Matrix<E>>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidTuple("empty tuple".into()));
        }
        match validate_commuting_tuple(ring, &mats) {
            TupleCheck::Ok => Ok(CommutingTuple { mats }),
            TupleCheck::Violation(v) => Err(Error::InvalidTuple(v.to_string())),
        }
    }

    /// No validation. Symbolic chart templates satisfy the tuple axioms only
    /// modulo their constraint polynomials.
    pub fn unchecked(mats: Vec<Matrix<E>>) -> Self {
        assert!(!mats.is_empty(), "empty tuple");
        CommutingTuple { mats }
    }

    pub fn zero<R: Ring<Elem = E>>(ring: &R, r: usize, n: usize) -> Self {
        CommutingTuple {
            mats: vec![Matrix::zeros(ring, n, n); r],
        }
    }

    pub fn height(&self) -> usize {
        self.mats.len()
    }

    pub fn size(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn matrices(&self) -> &[Matrix<E>] {
        &self.mats
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.mats.iter().all(|m| m.is_zero(ring))
    }

    pub fn map<F, G: FnMut(&E) -> F>(&self, mut f: G) -> CommutingTuple<F> {
        CommutingTuple {
            mats: self.mats.iter().map(|m| m.map(&mut f)).collect(),
        }
    }
}

/// Which operator to form from a tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Full,
    Exp,
    /// `s * exp + t * full`.
    Homotopy { s: Fe, t: Fe },
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Full => f.write_str("full"),
            Variant::Exp => f.write_str("exp"),
            Variant::Homotopy { s, t } => write!(f, "homotopy({}:{})", s.0, t.0),
        }
    }
}

/// An operator on a module together with the variant that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix<E> {
    pub variant: Variant,
    pub matrix: Matrix<E>,
}

fn pow_u32(p: u32, e: u32) -> Result<u32> {
    p.checked_pow(e)
        .ok_or_else(|| Error::CapExceeded(format!("p^{e} overflows for p = {p}")))
}

fn check_nilpotent<R: Ring>(ring: &R, b: &Matrix<R::Elem>) -> Result<()> {
    if !b.is_square() {
        return Err(Error::NotSquare(b.rows(), b.cols()));
    }
    let p = ring.characteristic();
    if !b.pow(ring, p as u64).is_zero(ring) {
        return Err(Error::NotNilpotent(p));
    }
    Ok(())
}

/// `texp(t^k B)` and `texp(-t^k B)` in `tr`.
fn exp_at<R: Ring>(tr: &TruncatedCurveRing<R>, b: &Matrix<R::Elem>, k: u32) -> UnipotentPair<TruncElem<R::Elem>> {
    let base = tr.base();
    let plus = b.map(|x| tr.monomial(x.clone(), k));
    let minus = b.map(|x| tr.monomial(base.neg(x), k));
    UnipotentPair::trusted(truncated_exp(tr, &plus), truncated_exp(tr, &minus))
}

/// `(sum_{i<p} t^i B^i / i!, same at -t)` over `R[t]/t^{p^r}`.
pub fn trunc_exp<R: Ring>(
    tr: &TruncatedCurveRing<R>,
    b: &Matrix<R::Elem>,
) -> Result<UnipotentPair<TruncElem<R::Elem>>> {
    check_nilpotent(tr.base(), b)?;
    Ok(exp_at(tr, b, 1))
}

fn one_param_in<R: Ring>(
    tr: &TruncatedCurveRing<R>,
    tuple: &CommutingTuple<R::Elem>,
) -> Result<UnipotentPair<TruncElem<R::Elem>>> {
    let p = tr.characteristic();
    let mut acc = UnipotentPair::identity(tr, tuple.size());
    for (s, b) in tuple.mats.iter().enumerate() {
        let k = pow_u32(p, s as u32)?;
        if k >= tr.order() || b.is_zero(tr.base()) {
            continue;
        }
        acc = acc.compose(tr, &exp_at(tr, b, k));
    }
    Ok(acc)
}

/// `prod_s texp(t^{p^s} B_s)` over `R[t]/t^{p^r}`.
pub fn one_param<R: Ring>(
    ring: &R,
    tuple: &CommutingTuple<R::Elem>,
) -> Result<(TruncatedCurveRing<R>, UnipotentPair<TruncElem<R::Elem>>)> {
    let r = tuple.height() as u32;
    let tr = TruncatedCurveRing::new(ring.clone(), pow_u32(ring.characteristic(), r)?);
    let gp = one_param_in(&tr, tuple)?;
    Ok((tr, gp))
}

fn coefficient<R: Ring>(tr: &TruncatedCurveRing<R>, m: &Matrix<TruncElem<R::Elem>>, k: u32) -> Matrix<R::Elem> {
    m.map(|x| tr.coefficient(x, k))
}

/// Coefficient of `t^{p^{r-1}}` in `rho(prod_s texp(t^{p^s} B_s))`.
pub fn theta_full<R: Ring>(ring: &R, e: &ModuleExpr, tuple: &CommutingTuple<R::Elem>) -> Result<Matrix<R::Elem>> {
    let k = pow_u32(ring.characteristic(), tuple.height() as u32 - 1)?;
    // truncating at t^{k+1} is compatible with every step of rho
    let tr = TruncatedCurveRing::new(ring.clone(), k + 1);
    let gp = one_param_in(&tr, tuple)?;
    let rho = e.eval_unipotent(&tr, &gp)?;
    Ok(coefficient(&tr, rho.g(), k))
}

/// `sum_s` of the coefficient of `t^{p^{r-1-s}}` in `rho(texp(t B_s))`.
pub fn theta_exp<R: Ring>(ring: &R, e: &ModuleExpr, tuple: &CommutingTuple<R::Elem>) -> Result<Matrix<R::Elem>> {
    let r = tuple.height() as u32;
    let dim = e.dim()?;
    let mut acc = Matrix::zeros(ring, dim, dim);
    for (s, b) in tuple.mats.iter().enumerate() {
        if b.is_zero(ring) {
            if let Some(n) = e.std_size()? {
                if n != b.rows() {
                    return Err(Error::DimensionMismatch(format!("Std({n}) with {}x{} tuple", b.rows(), b.cols())));
                }
            }
            continue;
        }
        let k = pow_u32(ring.characteristic(), r - 1 - s as u32)?;
        let tr = TruncatedCurveRing::new(ring.clone(), k + 1);
        let rho = e.eval_unipotent(&tr, &exp_at(&tr, b, 1))?;
        acc = acc.add(ring, &coefficient(&tr, rho.g(), k));
    }
    Ok(acc)
}

/// `s * theta_exp + t * theta_full`, checked to be p-nilpotent.
pub fn homotopy_theta<R: Ring>(
    ring: &R,
    e: &ModuleExpr,
    tuple: &CommutingTuple<R::Elem>,
    s: Fe,
    t: Fe,
) -> Result<Matrix<R::Elem>> {
    let m = homotopy_unchecked(ring, e, tuple, s, t)?;
    check_nilpotent(ring, &m)?;
    Ok(m)
}

// Over a chart's coordinate ring the tuple is nilpotent only modulo the
// constraints, so the symbolic path skips the check.
fn homotopy_unchecked<R: Ring>(
    ring: &R,
    e: &ModuleExpr,
    tuple: &CommutingTuple<R::Elem>,
    s: Fe,
    t: Fe,
) -> Result<Matrix<R::Elem>> {
    if s.is_zero() && t.is_zero() {
        return Err(Error::InvalidArgument("homotopy parameters (0:0)".into()));
    }
    let mut out: Option<Matrix<R::Elem>> = None;
    let mut add = |m: Matrix<R::Elem>| {
        out = Some(match out.take() {
            None => m,
            Some(acc) => acc.add(ring, &m),
        })
    };
    if !s.is_zero() {
        add(theta_exp(ring, e, tuple)?.scale(ring, s));
    }
    if !t.is_zero() {
        add(theta_full(ring, e, tuple)?.scale(ring, t));
    }
    Ok(out.unwrap())
}

/// The operator for `variant`.
pub fn theta<R: Ring>(
    ring: &R,
    e: &ModuleExpr,
    tuple: &CommutingTuple<R::Elem>,
    variant: Variant,
) -> Result<ThetaMatrix<R::Elem>> {
    let matrix = match variant {
        Variant::Full => theta_full(ring, e, tuple)?,
        Variant::Exp => theta_exp(ring, e, tuple)?,
        Variant::Homotopy { s, t } => homotopy_theta(ring, e, tuple, s, t)?,
    };
    Ok(ThetaMatrix { variant, matrix })
}

/// As [`theta`], without the nilpotency check on the homotopy operator.
pub(crate) fn theta_unchecked<R: Ring>(
    ring: &R,
    e: &ModuleExpr,
    tuple: &CommutingTuple<R::Elem>,
    variant: Variant,
) -> Result<Matrix<R::Elem>> {
    match variant {
        Variant::Full => theta_full(ring, e, tuple),
        Variant::Exp => theta_exp(ring, e, tuple),
        Variant::Homotopy { s, t } => homotopy_unchecked(ring, e, tuple, s, t),
    }
}

/// `sum_i a_i alpha_i` for a height-one product of additive groups.
pub fn theta_multi_ga<R: Ring>(ring: &R, m: &ExplicitModule, a: &[R::Elem]) -> Result<Matrix<R::Elem>> {
    if a.len() != m.matrices().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scalars for {} matrices",
            a.len(),
            m.matrices().len()
        )));
    }
    check_embeds(m.field(), ring)?;
    let mut acc = Matrix::zeros(ring, m.dim(), m.dim());
    for (alpha, c) in m.matrices().iter().zip(a) {
        acc = acc.add(ring, &alpha.map(|&x| ring.embed(x)).scale_by(ring, c));
    }
    Ok(acc)
}

pub fn jt_at_point<F: Field>(
    field: &F,
    e: &ModuleExpr,
    tuple: &CommutingTuple<F::Elem>,
    variant: Variant,
) -> Result<JordanType> {
    jt_of_nilpotent(field, &theta(field, e, tuple, variant)?.matrix)
}

/// Jordan type of the `j`-th power of the operator.
pub fn jt_power_at_point<F: Field>(
    field: &F,
    e: &ModuleExpr,
    tuple: &CommutingTuple<F::Elem>,
    variant: Variant,
    j: u32,
) -> Result<JordanType> {
    let p = field.characteristic();
    if j == 0 || j >= p {
        return Err(Error::OutOfRange(format!("power {j} outside 1..{p}")));
    }
    let m = theta(field, e, tuple, variant)?.matrix;
    jt_of_nilpotent(field, &m.pow(field, j as u64))
}

/// `(alpha B_0, alpha^p B_1, ..., alpha^{p^{r-1}} B_{r-1})`.
pub fn scale_tuple<R: Ring>(ring: &R, tuple: &CommutingTuple<R::Elem>, alpha: &R::Elem) -> CommutingTuple<R::Elem> {
    CommutingTuple {
        mats: tuple
            .mats
            .iter()
            .enumerate()
            .map(|(s, b)| b.scale_by(ring, &ring.frobenius(alpha, s as u32)))
            .collect(),
    }
}

/// `(g B_s g^{-1})_s`.
pub fn conjugate_tuple<F: Field>(
    field: &F,
    tuple: &CommutingTuple<F::Elem>,
    g: &Matrix<F::Elem>,
) -> Result<CommutingTuple<F::Elem>> {
    let gi = inverse(field, g)?;
    if g.rows() != tuple.size() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} conjugator for size {} tuple",
            g.rows(),
            g.cols(),
            tuple.size()
        )));
    }
    Ok(CommutingTuple {
        mats: tuple.mats.iter().map(|b| g.mul(field, b).mul(field, &gi)).collect(),
    })
}

/// Exponential Jordan type of a finite list `(B_0, ..., B_{r-1})` read as an
/// infinite-height tuple: evaluate at the reversed tuple `(B_{r-1}, ..., B_0)`.
pub fn jt_exp_infinite<F: Field>(field: &F, blist: &[Matrix<F::Elem>], e: &ModuleExpr) -> Result<JordanType> {
    let mut rev = blist.to_vec();
    rev.reverse();
    let tuple = CommutingTuple::new(field, rev)?;
    jt_at_point(field, e, &tuple, Variant::Exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FiniteField;

    fn f(p: u32) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn fe(rows: &[&[u32]]) -> Matrix<Fe> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Fe(x)).collect()).collect()).unwrap()
    }

    fn e_mat() -> Matrix<Fe> {
        fe(&[&[0, 1], &[0, 0]])
    }

    #[test]
    fn trunc_exp_examples() {
        let f3 = f(3);
        let tr = TruncatedCurveRing::of_height(f3.clone(), 1);
        let z = trunc_exp(&tr, &Matrix::zeros(&f3, 2, 2)).unwrap();
        assert_eq!(z, UnipotentPair::identity(&tr, 2));
        let j3 = fe(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let x = trunc_exp(&tr, &j3).unwrap();
        // 1/2 = 2 in GF(3)
        assert_eq!(x.g()[(0, 2)], tr.monomial(Fe(2), 2));
        assert_eq!(x.g()[(0, 1)], tr.t());
        assert!(trunc_exp(&tr, &fe(&[&[1, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn one_param_twisted_factor() {
        let f3 = f(3);
        let tuple = CommutingTuple::new(&f3, vec![Matrix::zeros(&f3, 2, 2), e_mat()]).unwrap();
        let (tr, gp) = one_param(&f3, &tuple).unwrap();
        assert_eq!(gp.g()[(0, 1)], tr.monomial(Fe(1), 3));
        assert_eq!(gp.g()[(0, 0)], tr.one());
    }

    #[test]
    fn theta_full_twisted_tensor() {
        // r = 2, (a0 E, a1 E) on Std * Tw(1, Std): a1 (E x 1) + a0^p (1 x E)
        let f5 = f(5);
        let e = ModuleExpr::parse("Sym(1,Std(2))*Tw(1,Sym(1,Std(2)))").unwrap();
        let i2 = Matrix::identity(&f5, 2);
        for (a0, a1) in [(1u32, 0u32), (0, 1), (2, 3), (4, 4)] {
            let tuple = CommutingTuple::new(&f5, vec![e_mat().scale(&f5, Fe(a0)), e_mat().scale(&f5, Fe(a1))]).unwrap();
            let expect = e_mat()
                .kron(&f5, &i2)
                .scale(&f5, Fe(a1))
                .add(&f5, &i2.kron(&f5, &e_mat()).scale(&f5, f5.pow(Fe(a0), 5)));
            assert_eq!(theta_full(&f5, &e, &tuple).unwrap(), expect);
            assert_eq!(theta_exp(&f5, &e, &tuple).unwrap(), expect);
        }
    }

    #[test]
    fn height_one_is_derivative() {
        let f3 = f(3);
        let e = ModuleExpr::parse("Sym(2,Std(2))").unwrap();
        let tuple = CommutingTuple::new(&f3, vec![e_mat()]).unwrap();
        // E acts on (x^2, xy, y^2) by y -> x
        let expect = fe(&[&[0, 1, 0], &[0, 0, 2], &[0, 0, 0]]);
        assert_eq!(theta_full(&f3, &e, &tuple).unwrap(), expect);
        assert_eq!(jt_at_point(&f3, &e, &tuple, Variant::Full).unwrap().to_string(), "[3]");
    }

    #[test]
    fn multi_ga_sum() {
        let f3 = f(3);
        let j2 = e_mat();
        let i2 = Matrix::identity(&f3, 2);
        let a0 = j2.kron(&f3, &i2);
        let a1 = i2.kron(&f3, &j2);
        let m = ExplicitModule::new("t", f3.clone(), crate::modules::Layout::Product, vec![a0.clone(), a1.clone()]).unwrap();
        let got = theta_multi_ga(&f3, &m, &[Fe(1), Fe(1)]).unwrap();
        assert_eq!(got, a0.add(&f3, &a1));
        assert_eq!(jt_of_nilpotent(&f3, &got).unwrap().to_string(), "[3]+[1]");
        assert!(theta_multi_ga(&f3, &m, &[Fe(0), Fe(0)]).unwrap().is_zero(&f3));
        assert!(theta_multi_ga(&f3, &m, &[Fe(1)]).is_err());
        // through the group: B_0 = blockdiag(E, E)
        let b0 = Matrix::block_diag(&f3, &[j2.clone(), j2.clone()]);
        let tuple = CommutingTuple::new(&f3, vec![b0]).unwrap();
        assert_eq!(theta_full(&f3, &ModuleExpr::Explicit(m), &tuple).unwrap(), got);
    }

    #[test]
    fn scaling_and_conjugation() {
        let f5 = f(5);
        let b0 = e_mat();
        let b1 = e_mat().scale(&f5, Fe(3));
        let tuple = CommutingTuple::new(&f5, vec![b0.clone(), b1.clone()]).unwrap();
        let scaled = scale_tuple(&f5, &tuple, &Fe(2));
        assert_eq!(scaled.matrices()[0], b0.scale(&f5, Fe(2)));
        assert_eq!(scaled.matrices()[1], b1.scale(&f5, Fe(2)));
        assert!(scale_tuple(&f5, &tuple, &Fe(0)).is_zero(&f5));
        let g = fe(&[&[2, 0], &[0, 1]]);
        let c = conjugate_tuple(&f5, &tuple, &g).unwrap();
        assert_eq!(c.matrices()[0], e_mat().scale(&f5, Fe(2)));
        assert!(conjugate_tuple(&f5, &tuple, &fe(&[&[1, 1], &[1, 1]])).is_err());
    }

    #[test]
    fn homotopy_endpoints() {
        let f3 = f(3);
        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let tuple = CommutingTuple::new(&f3, vec![e_mat(), e_mat().scale(&f3, Fe(2))]).unwrap();
        let ex = theta_exp(&f3, &e, &tuple).unwrap();
        let fu = theta_full(&f3, &e, &tuple).unwrap();
        assert_eq!(homotopy_theta(&f3, &e, &tuple, Fe(1), Fe(0)).unwrap(), ex);
        assert_eq!(homotopy_theta(&f3, &e, &tuple, Fe(0), Fe(1)).unwrap(), fu);
        assert_eq!(homotopy_theta(&f3, &e, &tuple, Fe(1), Fe(1)).unwrap(), fu.scale(&f3, Fe(2)));
        assert!(homotopy_theta(&f3, &e, &tuple, Fe(0), Fe(0)).is_err());
    }

    #[test]
    fn infinite_height_reversal() {
        let f3 = f(3);
        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let b0 = e_mat();
        let b1 = e_mat().scale(&f3, Fe(2));
        let direct = jt_at_point(&f3, &e, &CommutingTuple::new(&f3, vec![b1.clone(), b0.clone()]).unwrap(), Variant::Exp).unwrap();
        assert_eq!(jt_exp_infinite(&f3, &[b0.clone(), b1.clone()], &e).unwrap(), direct);
        let z = Matrix::zeros(&f3, 2, 2);
        assert_eq!(jt_exp_infinite(&f3, &[b0, b1, z.clone(), z], &e).unwrap(), direct);
        assert_eq!(jt_exp_infinite(&f3, &[Matrix::zeros(&f3, 2, 2)], &e).unwrap().to_string(), "4[1]");
    }
}
