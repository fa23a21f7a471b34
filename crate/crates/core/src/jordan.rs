//! Jordan types of p-nilpotent operators and the dominance order on them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FiniteField, Field, Matrix, Ring};

pub const DEFAULT_TENSOR_CAP: usize = 4096;
pub const DEFAULT_DOWN_SET_CAP: usize = 30;

/// Block counts `a_1, ..., a_p` of a p-nilpotent operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawJordanType")]
pub struct JordanType {
    p: u32,
    counts: Vec<usize>,
}

#[derive(Deserialize)]
struct RawJordanType {
    p: u32,
    counts: Vec<usize>,
}

impl TryFrom<RawJordanType> for JordanType {
    type Error = Error;
    fn try_from(raw: RawJordanType) -> Result<Self> {
        JordanType::new(raw.p, raw.counts)
    }
}

impl JordanType {
    /// `counts[i - 1]` is the number of blocks of size `i`; exactly `p` entries.
    pub fn new(p: u32, counts: Vec<usize>) -> Result<Self> {
        if p < 2 {
            return Err(Error::OutOfRange(format!("characteristic {p}")));
        }
        if counts.len() != p as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {p} block counts, got {}",
                counts.len()
            )));
        }
        Ok(JordanType { p, counts })
    }

    pub fn empty(p: u32) -> Self {
        JordanType {
            p,
            counts: vec![0; p as usize],
        }
    }

    /// `m[1]`, the type of the zero operator on an `m`-dimensional space.
    pub fn trivial(p: u32, m: usize) -> Self {
        Self::blocks(p, &[(1, m)]).expect("size 1 is always valid")
    }

    /// `(m/p)[p]`.
    pub fn max_type(p: u32, m: usize) -> Option<Self> {
        (m % p as usize == 0).then(|| Self::blocks(p, &[(p, m / p as usize)]).unwrap())
    }

    /// From `(size, multiplicity)` pairs.
    pub fn blocks(p: u32, blocks: &[(u32, usize)]) -> Result<Self> {
        let mut jt = Self::empty(p);
        for &(size, mult) in blocks {
            if size == 0 || size > p {
                return Err(Error::OutOfRange(format!("block size {size} with p = {p}")));
            }
            jt.counts[size as usize - 1] += mult;
        }
        Ok(jt)
    }

    /// From a list of block sizes in any order.
    pub fn from_partition(p: u32, parts: &[u32]) -> Result<Self> {
        let pairs: Vec<(u32, usize)> = parts.iter().filter(|&&s| s > 0).map(|&s| (s, 1)).collect();
        Self::blocks(p, &pairs)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of blocks of size `i` (zero outside `1..=p`).
    pub fn count(&self, i: u32) -> usize {
        if i == 0 {
            return 0;
        }
        self.counts.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &a)| (i + 1) * a)
            .sum()
    }

    pub fn num_blocks(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_blocks() == 0
    }

    /// Block sizes in descending order.
    pub fn partition(&self) -> Vec<u32> {
        let mut parts = Vec::with_capacity(self.num_blocks());
        for i in (1..=self.p).rev() {
            parts.extend(std::iter::repeat(i).take(self.count(i)));
        }
        parts
    }

    /// Block-diagonal matrix with one superdiagonal Jordan block per part,
    /// largest first.
    pub fn realize<R: Ring>(&self, ring: &R) -> Matrix<R::Elem> {
        let m = self.dim();
        let mut out = Matrix::zeros(ring, m, m);
        let mut offset = 0;
        for size in self.partition() {
            for k in 1..size as usize {
                out[(offset + k - 1, offset + k)] = ring.one();
            }
            offset += size as usize;
        }
        out
    }

    /// Rank sequence `r_1, ..., r_{p-1}`.
    pub fn rank_profile(&self) -> RankProfile {
        RankProfile {
            p: self.p,
            m: self.dim(),
            ranks: (1..self.p).map(|s| rank_of_power(self, s)).collect(),
        }
    }

    /// Parse the text form `2[5]+[3]+4[1]`; `0` is the empty type.
    pub fn parse(p: u32, s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let mut jt = Self::empty(p);
        if trimmed == "0" {
            return Ok(jt);
        }
        let mut col = 1;
        for term in trimmed.split('+') {
            let bad = |msg: &str| Error::parse(1, col, msg);
            let t = term.trim();
            let open = t.find('[').ok_or_else(|| bad("expected `[size]`"))?;
            if !t.ends_with(']') {
                return Err(bad("expected closing `]`"));
            }
            let mult_str = t[..open].trim().trim_end_matches('*').trim();
            let mult = if mult_str.is_empty() {
                1
            } else {
                mult_str.parse::<usize>().map_err(|_| bad("bad multiplicity"))?
            };
            let size = t[open + 1..t.len() - 1]
                .trim()
                .parse::<u32>()
                .map_err(|_| bad("bad block size"))?;
            if size == 0 || size > p {
                return Err(bad(&format!("block size {size} outside 1..={p}")));
            }
            jt.counts[size as usize - 1] += mult;
            col += term.len() + 1;
        }
        Ok(jt)
    }
}

impl fmt::Display for JordanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in (1..=self.p).rev() {
            let a = self.count(i);
            if a == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            if a == 1 {
                write!(f, "[{i}]")?;
            } else {
                write!(f, "{a}[{i}]")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Ranks of the powers `1..p-1` of a p-nilpotent operator on an
/// `m`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    p: u32,
    m: usize,
    ranks: Vec<usize>,
}

impl RankProfile {
    pub fn new(p: u32, m: usize, ranks: Vec<usize>) -> Result<Self> {
        if ranks.len() + 1 != p as usize {
            return Err(Error::InvalidRankProfile(format!(
                "expected {} ranks, got {}",
                p - 1,
                ranks.len()
            )));
        }
        let rp = RankProfile { p, m, ranks };
        for s in 1..=p as usize {
            let (prev, cur) = (rp.r(s - 1) as i64, rp.r(s) as i64);
            if cur > prev {
                return Err(Error::InvalidRankProfile(format!("r_{s} = {cur} exceeds r_{} = {prev}", s - 1)));
            }
            if prev - cur < cur - rp.r(s + 1) as i64 {
                return Err(Error::InvalidRankProfile(format!("convexity fails at s = {s}")));
            }
        }
        Ok(rp)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `r_s` with `r_0 = m` and `r_s = 0` for `s >= p`.
    pub fn r(&self, s: usize) -> usize {
        match s {
            0 => self.m,
            _ => self.ranks.get(s - 1).copied().unwrap_or(0),
        }
    }
}

/// Recover block counts from ranks by second differences.
pub fn jt_from_rank_profile(rp: &RankProfile) -> JordanType {
    let counts = (1..=rp.p as usize)
        .map(|i| rp.r(i - 1) + rp.r(i + 1) - 2 * rp.r(i))
        .collect();
    JordanType { p: rp.p, counts }
}

/// Jordan type of a p-nilpotent matrix over a field of characteristic `p`.
pub fn jt_of_nilpotent<F: Field>(field: &F, n: &Matrix<F::Elem>) -> Result<JordanType> {
    if !n.is_square() {
        return Err(Error::NotSquare(n.rows(), n.cols()));
    }
    let p = field.characteristic();
    let mut ranks = Vec::with_capacity(p as usize - 1);
    let mut power = n.clone();
    for _ in 1..p {
        ranks.push(field.matrix_rank(&power));
        power = power.mul(field, n);
    }
    if !power.is_zero(field) {
        return Err(Error::NotNilpotent(p));
    }
    let rp = RankProfile::new(p, n.rows(), ranks)?;
    Ok(jt_from_rank_profile(&rp))
}

fn same_p(a: &JordanType, b: &JordanType) -> Result<()> {
    if a.p != b.p {
        return Err(Error::CharacteristicMismatch(a.p, b.p));
    }
    Ok(())
}

/// Outcome of a dominance comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dominance {
    pub holds: bool,
    /// Set when the two types have different dimensions; `holds` is then false.
    pub dimension_mismatch: bool,
}

/// Dominance comparison: partial sums of the largest block sizes.
pub fn dominance(a: &JordanType, b: &JordanType) -> Result<Dominance> {
    same_p(a, b)?;
    if a.dim() != b.dim() {
        return Ok(Dominance {
            holds: false,
            dimension_mismatch: true,
        });
    }
    let (pa, pb) = (a.partition(), b.partition());
    let (mut sa, mut sb) = (0u64, 0u64);
    for k in 0..pa.len().max(pb.len()) {
        sa += pa.get(k).copied().unwrap_or(0) as u64;
        sb += pb.get(k).copied().unwrap_or(0) as u64;
        if sa > sb {
            return Ok(Dominance {
                holds: false,
                dimension_mismatch: false,
            });
        }
    }
    Ok(Dominance {
        holds: true,
        dimension_mismatch: false,
    })
}

/// `a <= b`; false for differing dimensions.
pub fn dominance_leq(a: &JordanType, b: &JordanType) -> Result<bool> {
    Ok(dominance(a, b)?.holds)
}

pub fn jt_sum(a: &JordanType, b: &JordanType) -> Result<JordanType> {
    same_p(a, b)?;
    Ok(JordanType {
        p: a.p,
        counts: a.counts.iter().zip(&b.counts).map(|(x, y)| x + y).collect(),
    })
}

type BlockCache = Mutex<HashMap<(u32, u32, u32), JordanType>>;

fn block_tensor(p: u32, i: u32, j: u32) -> JordanType {
    static CACHE: OnceLock<BlockCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (p, i.min(j), i.max(j));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let f = FiniteField::prime(p).expect("characteristic validated by caller");
    let ni = JordanType::blocks(p, &[(i, 1)]).unwrap().realize(&f);
    let nj = JordanType::blocks(p, &[(j, 1)]).unwrap().realize(&f);
    let op = ni
        .kron(&f, &Matrix::identity(&f, j as usize))
        .add(&f, &Matrix::identity(&f, i as usize).kron(&f, &nj));
    let jt = jt_of_nilpotent(&f, &op).expect("sum of commuting p-nilpotents is p-nilpotent");
    cache.lock().unwrap().insert(key, jt.clone());
    jt
}

/// Type of `N_a (x) 1 + 1 (x) N_b`, with the default dimension cap.
pub fn jt_tensor(a: &JordanType, b: &JordanType) -> Result<JordanType> {
    jt_tensor_capped(a, b, DEFAULT_TENSOR_CAP)
}

/// Type of `N_a (x) 1 + 1 (x) N_b`. The matrix oracle is applied to each
/// pair of blocks and the results are summed, which is exact because the
/// operator is block diagonal over pairs of blocks.
pub fn jt_tensor_capped(a: &JordanType, b: &JordanType, cap: usize) -> Result<JordanType> {
    same_p(a, b)?;
    let (da, db) = (a.dim(), b.dim());
    if da.saturating_mul(db) > cap {
        return Err(Error::CapExceeded(format!("tensor dimension {da} x {db} above {cap}")));
    }
    if FiniteField::prime(a.p).is_err() {
        return Err(Error::UnsupportedField(format!("p = {}", a.p)));
    }
    let mut out = JordanType::empty(a.p);
    for i in 1..=a.p {
        let ai = a.count(i);
        if ai == 0 {
            continue;
        }
        for j in 1..=b.p {
            let bj = b.count(j);
            if bj == 0 {
                continue;
            }
            let t = block_tensor(a.p, i, j);
            for (o, c) in out.counts.iter_mut().zip(&t.counts) {
                *o += ai * bj * c;
            }
        }
    }
    Ok(out)
}

/// Type of `N^j`: a block of size `i` splits into chains of lengths
/// `ceil((i - c) / j)` for `c = 0..j`.
pub fn jt_power(a: &JordanType, j: u32) -> Result<JordanType> {
    if j == 0 || j >= a.p {
        return Err(Error::OutOfRange(format!("power {j} outside 1..{}", a.p)));
    }
    let mut out = JordanType::empty(a.p);
    for i in 1..=a.p {
        let mult = a.count(i);
        if mult == 0 {
            continue;
        }
        for c in 0..j.min(i) {
            let len = (i - c).div_ceil(j);
            out.counts[len as usize - 1] += mult;
        }
    }
    Ok(out)
}

fn rank_of_power(a: &JordanType, s: u32) -> usize {
    (s + 1..=a.p).map(|i| a.count(i) * (i - s) as usize).sum()
}

/// Rank of the `s`-th power of any realization: `sum_{i>s} a_i (i - s)`.
pub fn jt_rank(a: &JordanType, s: u32) -> Result<usize> {
    if s == 0 || s >= a.p {
        return Err(Error::OutOfRange(format!("power {s} outside 1..{}", a.p)));
    }
    Ok(rank_of_power(a, s))
}

/// `sum_{i<p} a_{p-i} [i]`; blocks of size `p` vanish.
pub fn jt_perp(a: &JordanType) -> JordanType {
    let mut out = JordanType::empty(a.p);
    for i in 1..a.p {
        out.counts[i as usize - 1] = a.count(a.p - i);
    }
    out
}

pub fn is_max_type(a: &JordanType) -> bool {
    (1..a.p).all(|i| a.count(i) == 0)
}

/// Every Jordan type with `m` boxes and blocks of size at most `p`.
pub fn all_types(p: u32, m: usize) -> Vec<JordanType> {
    fn rec(p: u32, max: u32, left: usize, parts: &mut Vec<u32>, out: &mut Vec<JordanType>) {
        if left == 0 {
            out.push(JordanType::from_partition(p, parts).unwrap());
            return;
        }
        for s in (1..=max.min(left as u32)).rev() {
            parts.push(s);
            rec(p, s, left - s as usize, parts, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, p, m, &mut Vec::new(), &mut out);
    out
}

/// The closure of `{a}`: all same-dimensional types dominated by `a`.
pub fn down_set(a: &JordanType) -> Result<BTreeSet<JordanType>> {
    down_set_capped(a, DEFAULT_DOWN_SET_CAP)
}

pub fn down_set_capped(a: &JordanType, cap: usize) -> Result<BTreeSet<JordanType>> {
    if a.dim() > cap {
        return Err(Error::CapExceeded(format!("{} boxes above {cap}", a.dim())));
    }
    let mut out = BTreeSet::new();
    for b in all_types(a.p, a.dim()) {
        if dominance_leq(&b, a)? {
            out.insert(b);
        }
    }
    Ok(out)
}

/// Type of the operator induced by `n` on `V / W`, where the columns of
/// `w` span `W`.
pub fn induced_quotient_jt<F: Field>(
    field: &F,
    n: &Matrix<F::Elem>,
    w: &[Vec<F::Elem>],
) -> Result<JordanType> {
    if !n.is_square() {
        return Err(Error::NotSquare(n.rows(), n.cols()));
    }
    let m = n.rows();
    if w.iter().any(|v| v.len() != m) {
        return Err(Error::DimensionMismatch("subspace vector length".into()));
    }
    let wm = Matrix::from_columns(m, w);
    let dim_w = field.matrix_rank(&wm);
    let image: Vec<Vec<F::Elem>> = w.iter().map(|v| n.apply(field, v)).collect();
    if field.matrix_rank(&wm.hcat(&Matrix::from_columns(m, &image))) != dim_w {
        return Err(Error::NotInvariant);
    }
    let p = field.characteristic();
    let mut ranks = Vec::with_capacity(p as usize - 1);
    let mut power = n.clone();
    for _ in 1..p {
        ranks.push(field.matrix_rank(&power.hcat(&wm)) - dim_w);
        power = power.mul(field, n);
    }
    if !power.is_zero(field) {
        return Err(Error::NotNilpotent(p));
    }
    Ok(jt_from_rank_profile(&RankProfile::new(p, m - dim_w, ranks)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Fe;

    fn jt(p: u32, s: &str) -> JordanType {
        JordanType::parse(p, s).unwrap()
    }

    #[test]
    fn text_form() {
        let a = jt(5, "2[5] + [3] + 4[1]");
        assert_eq!(a.to_string(), "2[5]+[3]+4[1]");
        assert_eq!(a.dim(), 17);
        assert_eq!(JordanType::empty(3).to_string(), "0");
        assert_eq!(jt(3, "0"), JordanType::empty(3));
        assert!(JordanType::parse(3, "[4]").is_err());
        assert!(JordanType::parse(3, "2[").is_err());
    }

    #[test]
    fn json_form_validates_length() {
        let a = jt(3, "[3]+[1]");
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":3,"counts":[1,0,1]}"#);
        assert_eq!(serde_json::from_str::<JordanType>(&s).unwrap(), a);
        assert!(serde_json::from_str::<JordanType>(r#"{"p":3,"counts":[1,2]}"#).is_err());
    }

    #[test]
    fn rank_profiles() {
        let rp = |p, m, r: Vec<usize>| jt_from_rank_profile(&RankProfile::new(p, m, r).unwrap());
        assert_eq!(rp(3, 3, vec![0, 0]), jt(3, "3[1]"));
        assert_eq!(rp(3, 3, vec![2, 1]), jt(3, "[3]"));
        assert_eq!(rp(5, 4, vec![2, 0, 0, 0]), jt(5, "2[2]"));
        assert!(RankProfile::new(3, 3, vec![1, 1]).is_err());
        assert!(RankProfile::new(3, 3, vec![4, 0]).is_err());
        assert!(RankProfile::new(5, 6, vec![1, 3, 0, 0]).is_err());
    }

    #[test]
    fn nilpotent_examples() {
        let f5 = FiniteField::prime(5).unwrap();
        assert_eq!(jt_of_nilpotent(&f5, &Matrix::zeros(&f5, 3, 3)).unwrap(), jt(5, "3[1]"));
        let f3 = FiniteField::prime(3).unwrap();
        let j3 = jt(3, "[3]").realize(&f3);
        assert_eq!(jt_of_nilpotent(&f3, &j3).unwrap(), jt(3, "[3]"));
        let j2 = jt(3, "[2]").realize(&f3);
        let i2 = Matrix::identity(&f3, 2);
        let op = j2.kron(&f3, &i2).add(&f3, &i2.kron(&f3, &j2));
        assert_eq!(jt_of_nilpotent(&f3, &op).unwrap(), jt(3, "[3]+[1]"));
        let e11 = Matrix::from_vec(2, 2, vec![Fe(1), Fe(0), Fe(0), Fe(0)]);
        assert_eq!(jt_of_nilpotent(&f3, &e11), Err(Error::NotNilpotent(3)));
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&jt(3, "[2]+[1]"), &jt(3, "[3]")).unwrap());
        assert!(!dominance_leq(&jt(3, "[3]"), &jt(3, "[2]+[1]")).unwrap());
        assert!(dominance_leq(&jt(3, "2[2]"), &jt(3, "[3]+[1]")).unwrap());
        assert!(!dominance_leq(&jt(3, "[3]+[1]"), &jt(3, "2[2]")).unwrap());
        let d = dominance(&jt(3, "[3]"), &jt(3, "[2]")).unwrap();
        assert!(d.dimension_mismatch && !d.holds);
        assert!(dominance(&jt(3, "[1]"), &jt(5, "[1]")).is_err());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(jt_tensor(&jt(3, "[2]"), &jt(3, "[2]")).unwrap(), jt(3, "[3]+[1]"));
        assert_eq!(jt_tensor(&jt(2, "[2]"), &jt(2, "[2]")).unwrap(), jt(2, "2[2]"));
        let b = jt(5, "[4]+2[3]+[1]");
        assert_eq!(jt_tensor(&jt(5, "[1]"), &b).unwrap(), b);
        assert!(matches!(
            jt_tensor(&jt(3, "30[3]"), &jt(3, "30[3]")),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn power_rank_perp_examples() {
        assert_eq!(jt_power(&jt(5, "[5]"), 2).unwrap(), jt(5, "[3]+[2]"));
        assert_eq!(jt_power(&jt(5, "[4]"), 2).unwrap(), jt(5, "2[2]"));
        assert_eq!(jt_power(&jt(5, "[4]+[1]"), 1).unwrap(), jt(5, "[4]+[1]"));
        assert!(jt_power(&jt(3, "[3]"), 3).is_err());
        assert_eq!(jt_rank(&jt(3, "[2]"), 1).unwrap(), 1);
        assert_eq!(jt_rank(&jt(5, "[5]"), 3).unwrap(), 2);
        assert_eq!(jt_rank(&jt(5, "6[1]"), 2).unwrap(), 0);
        assert_eq!(jt_perp(&jt(5, "[4]+[1]")), jt(5, "[4]+[1]"));
        assert_eq!(jt_perp(&jt(3, "2[2]")), jt(3, "2[1]"));
        assert!(jt_perp(&jt(3, "4[3]")).is_empty());
    }

    #[test]
    fn down_sets_and_max_types() {
        let d: Vec<String> = down_set(&jt(3, "[3]")).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(d.len(), 3);
        for s in ["[3]", "[2]+[1]", "3[1]"] {
            assert!(d.contains(&s.to_string()));
        }
        assert_eq!(down_set(&jt(2, "2[2]")).unwrap().len(), 3);
        assert_eq!(down_set(&jt(3, "4[1]")).unwrap().len(), 1);
        assert!(down_set(&jt(3, "11[3]")).is_err());
        assert!(is_max_type(&jt(5, "2[5]")));
        assert!(!is_max_type(&jt(5, "[5]+[1]")));
        assert!(is_max_type(&JordanType::max_type(3, 9).unwrap()));
    }

    #[test]
    fn quotient_examples() {
        let f3 = FiniteField::prime(3).unwrap();
        let j3 = jt(3, "[3]").realize(&f3);
        let e1 = vec![Fe(1), Fe(0), Fe(0)];
        assert_eq!(induced_quotient_jt(&f3, &j3, &[e1]).unwrap(), jt(3, "[2]"));
        assert_eq!(induced_quotient_jt(&f3, &j3, &[]).unwrap(), jt(3, "[3]"));
        let all: Vec<Vec<Fe>> = (0..3).map(|i| (0..3).map(|k| Fe((i == k) as u32)).collect()).collect();
        assert!(induced_quotient_jt(&f3, &j3, &all).unwrap().is_empty());
        let e3 = vec![Fe(0), Fe(0), Fe(1)];
        assert_eq!(induced_quotient_jt(&f3, &j3, &[e3]), Err(Error::NotInvariant));
    }
}
