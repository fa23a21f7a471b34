use std::collections::HashSet;

use rayon::prelude::*;

use super::chart::Chart;
use super::sweep::{enumerate_points, evaluate_points, StrataTable, SweepConfig};
use crate::error::{Error, Result};
use crate::fields::{minors, rank, Fe, FiniteField, Matrix, Polynomial};
use crate::jordan::{dominance_leq, jt_rank, JordanType};
use crate::modules::ModuleExpr;
use crate::theta::{homotopy_theta, theta, theta_unchecked, Variant};

/// Largest module dimension for symbolic operators.
pub const SYMBOLIC_DIM_CAP: usize = 64;

/// The operator over the chart's coordinate ring.
pub fn symbolic_theta(chart: &Chart, e: &ModuleExpr, variant: Variant) -> Result<Matrix<Polynomial>> {
    let dim = e.dim()?;
    if dim > SYMBOLIC_DIM_CAP {
        return Err(Error::CapExceeded(format!(
            "symbolic operator of dimension {dim} > {SYMBOLIC_DIM_CAP}"
        )));
    }
    theta_unchecked(chart.ring(), e, &chart.symbolic_tuple(), variant)
}

/// Distinct nonzero `(d+1)`-minors of `theta^j` over the chart ring, in
/// minor order. Their common zeros on the constraint locus are the points
/// where `rank theta^j <= d`.
pub fn rank_locus_minors(chart: &Chart, e: &ModuleExpr, variant: Variant, j: u32, d: usize) -> Result<Vec<Polynomial>> {
    let p = chart.p();
    if j == 0 || j >= p {
        return Err(Error::OutOfRange(format!("power {j} outside 1..{p}")));
    }
    let th = symbolic_theta(chart, e, variant)?;
    if d >= th.rows() {
        return Ok(Vec::new());
    }
    let ring = chart.ring();
    let m = th.pow(ring, j as u64);
    let mut seen = HashSet::new();
    Ok(minors(ring, &m, d + 1)?
        .into_iter()
        .filter(|f| !f.is_zero() && seen.insert(f.clone()))
        .collect())
}

#[derive(Clone, Debug)]
pub struct ClosedReport {
    pub target: JordanType,
    pub points: usize,
    /// Points with `JT(x) <= target`.
    pub below: usize,
    /// Points where every generator vanishes.
    pub in_zero_set: usize,
    pub generators: usize,
    pub mismatches: Vec<Vec<Fe>>,
}

impl ClosedReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `{x : JT(x) <= a}` with the common zeros of the rank-locus
/// minors for every power `theta^s`, `1 <= s < p`, at each swept point.
pub fn verify_closed_stratum(
    chart: &Chart,
    e: &ModuleExpr,
    a: &JordanType,
    field: &FiniteField,
    variant: Variant,
    cfg: &SweepConfig,
) -> Result<ClosedReport> {
    let dim = e.dim()?;
    if a.p() != chart.p() || a.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "type {a} (p = {}) against a {dim}-dimensional module over p = {}",
            a.p(),
            chart.p()
        )));
    }
    let mut gens = Vec::new();
    for s in 1..chart.p() {
        gens.extend(rank_locus_minors(chart, e, variant, s, jt_rank(a, s)?)?);
    }
    let sweep = enumerate_points(chart, field, cfg)?;
    let jts = evaluate_points(chart, e, field, variant, &sweep.points)?;
    let ring = chart.ring();
    let flags: Vec<(bool, bool)> = sweep
        .points
        .par_iter()
        .zip(jts.par_iter())
        .map(|(x, jt)| {
            let below = match jt {
                Some(jt) => dominance_leq(jt, a)?,
                None => true,
            };
            let mut zero = true;
            for g in &gens {
                if !ring.evaluate(g, x, field)?.is_zero() {
                    zero = false;
                    break;
                }
            }
            Ok((below, zero))
        })
        .collect::<Result<_>>()?;
    let mismatches = sweep
        .points
        .iter()
        .zip(&flags)
        .filter(|(_, (b, z))| b != z)
        .map(|(x, _)| x.clone())
        .collect();
    Ok(ClosedReport {
        target: a.clone(),
        points: sweep.points.len(),
        below: flags.iter().filter(|f| f.0).count(),
        in_zero_set: flags.iter().filter(|f| f.1).count(),
        generators: gens.len(),
        mismatches,
    })
}

#[derive(Clone, Debug)]
pub struct StratumRanks {
    pub jt: JordanType,
    /// `rank theta^j` at each representative.
    pub ranks: Vec<usize>,
    /// Rank predicted by the stratum's type.
    pub expected: usize,
    pub kernel: usize,
    pub cokernel: usize,
    pub constant: bool,
}

#[derive(Clone, Debug)]
pub struct HomotopyViolation {
    pub point: Vec<Fe>,
    pub s: Fe,
    pub t: Fe,
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct ConstantRankReport {
    pub j: u32,
    pub strata: Vec<StratumRanks>,
    /// The common rank of `theta^j` over all nonzero strata, if there is one.
    pub global_rank: Option<usize>,
    pub homotopy_checked: usize,
    pub homotopy_violations: Vec<HomotopyViolation>,
}

impl ConstantRankReport {
    pub fn holds(&self) -> bool {
        self.strata.iter().all(|s| s.constant) && self.homotopy_violations.is_empty()
    }
}

/// Rank, kernel and cokernel dimensions of `theta^j` at each stored
/// representative. When every stratum has the same `j`-rank, the homotopy
/// operators at the sampled `(s:t)` are checked to share it.
pub fn constant_rank_on_strata(table: &StrataTable, j: u32, homotopy: &[(Fe, Fe)]) -> Result<ConstantRankReport> {
    let p = table.chart.p();
    if j == 0 || j >= p {
        return Err(Error::OutOfRange(format!("power {j} outside 1..{p}")));
    }
    let field = &table.field;
    let e = &table.module;
    let dim = e.dim()?;
    let rank_at = |x: &[Fe], variant: Variant| -> Result<usize> {
        let tuple = table.chart.tuple_at(field, x)?;
        let m = match variant {
            Variant::Homotopy { s, t } => homotopy_theta(field, e, &tuple, s, t)?,
            v => theta(field, e, &tuple, v)?.matrix,
        };
        Ok(rank(field, &m.pow(field, j as u64)))
    };
    let mut strata = Vec::new();
    for st in &table.strata {
        let ranks = st
            .representatives
            .iter()
            .map(|x| rank_at(x, table.variant))
            .collect::<Result<Vec<_>>>()?;
        let expected = jt_rank(&st.jt, j)?;
        strata.push(StratumRanks {
            jt: st.jt.clone(),
            constant: ranks.iter().all(|&r| r == expected),
            kernel: dim - expected,
            cokernel: dim - expected,
            ranks,
            expected,
        });
    }
    let global_rank = match strata.first() {
        Some(first) if strata.iter().all(|s| s.expected == first.expected) => Some(first.expected),
        _ => None,
    };
    let mut homotopy_checked = 0;
    let mut homotopy_violations = Vec::new();
    if let Some(g) = global_rank {
        for st in &table.strata {
            for x in &st.representatives {
                for &(s, t) in homotopy {
                    homotopy_checked += 1;
                    let r = rank_at(x, Variant::Homotopy { s, t })?;
                    if r != g {
                        homotopy_violations.push(HomotopyViolation {
                            point: x.clone(),
                            s,
                            t,
                            rank: r,
                        });
                    }
                }
            }
        }
    }
    Ok(ConstantRankReport {
        j,
        strata,
        global_rank,
        homotopy_checked,
        homotopy_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Field;
    use crate::modules::ExplicitModule;
    use crate::strata::{builtin_chart, tabulate_jt, ChartParams};

    fn j2_module() -> ModuleExpr {
        let text = "field = GF(3)\nmatrix\n0 1\n0 0\n";
        ModuleExpr::Explicit(ExplicitModule::from_file_contents("J2", text).unwrap())
    }

    #[test]
    fn minors_of_a_scaled_jordan_block() {
        let c = builtin_chart("ga_r", ChartParams::new(3).r(1)).unwrap();
        let e = j2_module();
        let g = rank_locus_minors(&c, &e, Variant::Full, 1, 0).unwrap();
        assert_eq!(g, vec![c.ring().var("a0").unwrap()]);
        assert!(rank_locus_minors(&c, &e, Variant::Full, 1, 2).unwrap().is_empty());
        assert!(rank_locus_minors(&c, &e, Variant::Full, 3, 0).is_err());
    }

    #[test]
    fn minors_match_pointwise_ranks() {
        // rank theta <= 1 exactly where the minors vanish, checked against
        // a direct rank computation at every GF(3) point
        let c = builtin_chart("sl2_line", ChartParams::new(3).r(2)).unwrap();
        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let f = c.field().clone();
        let gens = rank_locus_minors(&c, &e, Variant::Full, 1, 1).unwrap();
        let pts = enumerate_points(&c, &f, &SweepConfig::default()).unwrap().points;
        let mut low = 0;
        for x in &pts {
            let m = theta(&f, &e, &c.tuple_at(&f, x).unwrap(), Variant::Full).unwrap().matrix;
            let vanish = gens.iter().all(|g| c.ring().evaluate(g, x, &f).unwrap().is_zero());
            assert_eq!(vanish, f.matrix_rank(&m) <= 1, "{x:?}");
            low += vanish as usize;
        }
        assert!(low > 0 && low < pts.len());
    }

    #[test]
    fn closed_strata_extremes() {
        let c = builtin_chart("sl2_line", ChartParams::new(3).r(2)).unwrap();
        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let f = c.field().clone();
        let cfg = SweepConfig::default();
        let top = verify_closed_stratum(&c, &e, &JordanType::parse(3, "[3]+[1]").unwrap(), &f, Variant::Full, &cfg)
            .unwrap();
        assert!(top.holds());
        assert_eq!((top.below, top.in_zero_set), (top.points, top.points));
        let bottom = verify_closed_stratum(&c, &e, &JordanType::trivial(3, 4), &f, Variant::Full, &cfg).unwrap();
        assert!(bottom.holds());
        let t = tabulate_jt(&c, &e, &f, Variant::Full, &cfg).unwrap();
        assert_eq!(bottom.below, t.zero_count);
        assert!(verify_closed_stratum(&c, &e, &JordanType::trivial(3, 3), &f, Variant::Full, &cfg).is_err());
    }

    #[test]
    fn constant_ranks() {
        let c = builtin_chart("ga_r", ChartParams::new(3).r(2)).unwrap();
        let f = c.field().clone();
        let cfg = SweepConfig::default();
        let samples = [(Fe(1), Fe(0)), (Fe(0), Fe(1)), (Fe(1), Fe(1))];

        let reg = ModuleExpr::parse("Explicit(regular,p=3,r=2)").unwrap();
        let t = tabulate_jt(&c, &reg, &f, Variant::Full, &cfg).unwrap();
        assert_eq!(t.strata.len(), 1);
        let rep = constant_rank_on_strata(&t, 1, &samples).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.global_rank, Some(6));
        assert!(rep.homotopy_checked > 0);

        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let t = tabulate_jt(&c, &e, &f, Variant::Full, &cfg).unwrap();
        // [3]+[1] and 2[2] share rank 2 but differ in rank of the square
        let rep = constant_rank_on_strata(&t, 1, &samples).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.global_rank, Some(2));
        let rep = constant_rank_on_strata(&t, 2, &samples).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.global_rank, None);
        assert_eq!(rep.homotopy_checked, 0);

        let triv = ModuleExpr::parse("Trivial(3)").unwrap();
        let t = tabulate_jt(&c, &triv, &f, Variant::Full, &cfg).unwrap();
        let rep = constant_rank_on_strata(&t, 1, &samples).unwrap();
        assert!(rep.strata.iter().all(|s| s.ranks.iter().all(|&r| r == 0)));
    }
}
