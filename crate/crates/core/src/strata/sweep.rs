use std::cmp::Reverse;
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::fields::{Fe, FiniteField};
use crate::jordan::JordanType;
use crate::modules::ModuleExpr;
use crate::theta::{jt_at_point, scale_tuple, CommutingTuple, Variant};

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Representatives kept per stratum.
pub const MAX_REPRESENTATIVES: usize = 8;
/// Rejection sampling gives up after this many draws per requested sample.
const REJECTION_FACTOR: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub budget: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            budget: DEFAULT_BUDGET,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn seeded(seed: u64) -> Self {
        SweepConfig {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SweepMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

/// Admissible chart points in canonical order: lexicographic in the
/// parameter order for exhaustive sweeps, draw order for sampled ones.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub mode: SweepMode,
    pub points: Vec<Vec<Fe>>,
}

fn check_field(chart: &Chart, field: &FiniteField) -> Result<()> {
    if field.characteristic() != chart.p() {
        return Err(Error::CharacteristicMismatch(chart.p(), field.characteristic()));
    }
    if !chart.field().is_prime_field() && chart.field() != field {
        return Err(Error::IncompatibleField(format!(
            "chart over {} swept over {}",
            chart.field().descriptor(),
            field.descriptor()
        )));
    }
    Ok(())
}

pub fn enumerate_points(chart: &Chart, field: &FiniteField, cfg: &SweepConfig) -> Result<Sweep> {
    if cfg.budget == 0 {
        return Err(Error::InvalidArgument("sweep budget must be positive".into()));
    }
    check_field(chart, field)?;
    let q = field.order() as u64;
    let k = chart.nparams() as u32;
    match q.checked_pow(k).filter(|&total| total <= cfg.budget) {
        Some(total) => {
            let results: Vec<Option<Vec<Fe>>> = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let point = decode(idx, q, k as usize);
                    Ok(chart.satisfies(field, &point)?.then_some(point))
                })
                .collect::<Result<_>>()?;
            Ok(Sweep {
                mode: SweepMode::Exhaustive,
                points: results.into_iter().flatten().collect(),
            })
        }
        None => {
            if cfg.samples == 0 {
                return Err(Error::InvalidArgument("sample size must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut points = Vec::with_capacity(cfg.samples);
            let max_draws = cfg.samples.saturating_mul(REJECTION_FACTOR);
            let mut draws = 0;
            while points.len() < cfg.samples {
                if draws == max_draws {
                    return Err(Error::CapExceeded(format!(
                        "{} admissible samples out of {draws} draws on chart `{}`",
                        points.len(),
                        chart.name()
                    )));
                }
                draws += 1;
                let point: Vec<Fe> = (0..k).map(|_| field.random(&mut rng)).collect();
                if chart.satisfies(field, &point)? {
                    points.push(point);
                }
            }
            Ok(Sweep {
                mode: SweepMode::Sampled {
                    seed: cfg.seed,
                    samples: cfg.samples,
                },
                points,
            })
        }
    }
}

// First parameter most significant.
fn decode(mut idx: u64, q: u64, k: usize) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; k];
    for slot in out.iter_mut().rev() {
        *slot = Fe((idx % q) as u32);
        idx /= q;
    }
    out
}

/// Jordan type at every point, or `None` where the tuple is zero.
pub fn evaluate_points(
    chart: &Chart,
    e: &ModuleExpr,
    field: &FiniteField,
    variant: Variant,
    points: &[Vec<Fe>],
) -> Result<Vec<Option<JordanType>>> {
    points
        .par_iter()
        .map(|x| {
            let tuple = chart.tuple_at(field, x)?;
            if tuple.is_zero(field) {
                return Ok(None);
            }
            jt_at_point(field, e, &tuple, variant).map(Some)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub jt: JordanType,
    pub count: usize,
    pub representatives: Vec<Vec<Fe>>,
}

/// Swept points grouped by Jordan type. Strata are listed from the largest
/// type down in reverse lexicographic order of partitions, which refines
/// the dominance order.
#[derive(Clone, Debug)]
pub struct StrataTable {
    pub chart: Chart,
    pub module: ModuleExpr,
    pub field: FiniteField,
    pub variant: Variant,
    pub mode: SweepMode,
    pub total: usize,
    pub zero_count: usize,
    pub strata: Vec<Stratum>,
}

impl StrataTable {
    pub fn types(&self) -> Vec<&JordanType> {
        self.strata.iter().map(|s| &s.jt).collect()
    }

    pub fn get(&self, jt: &JordanType) -> Option<&Stratum> {
        self.strata.iter().find(|s| &s.jt == jt)
    }

    pub fn max_type(&self) -> Option<&JordanType> {
        self.strata.first().map(|s| &s.jt)
    }

    pub fn fmt_point(&self, point: &[Fe]) -> Vec<String> {
        point.iter().map(|&x| self.field.fmt_fe(x)).collect()
    }
}

pub fn tabulate_jt(
    chart: &Chart,
    e: &ModuleExpr,
    field: &FiniteField,
    variant: Variant,
    cfg: &SweepConfig,
) -> Result<StrataTable> {
    let sweep = enumerate_points(chart, field, cfg)?;
    tabulate_sweep(chart, e, field, variant, &sweep)
}

pub fn tabulate_sweep(
    chart: &Chart,
    e: &ModuleExpr,
    field: &FiniteField,
    variant: Variant,
    sweep: &Sweep,
) -> Result<StrataTable> {
    let jts = evaluate_points(chart, e, field, variant, &sweep.points)?;
    let mut zero_count = 0;
    let mut groups: BTreeMap<JordanType, Stratum> = BTreeMap::new();
    for (x, jt) in sweep.points.iter().zip(jts) {
        let Some(jt) = jt else {
            zero_count += 1;
            continue;
        };
        let s = groups.entry(jt.clone()).or_insert_with(|| Stratum {
            jt,
            count: 0,
            representatives: Vec::new(),
        });
        s.count += 1;
        if s.representatives.len() < MAX_REPRESENTATIVES {
            s.representatives.push(x.clone());
        }
    }
    let mut strata: Vec<Stratum> = groups.into_values().collect();
    strata.sort_by_key(|s| Reverse(s.jt.partition()));
    Ok(StrataTable {
        chart: chart.clone(),
        module: e.clone(),
        field: field.clone(),
        variant,
        mode: sweep.mode,
        total: sweep.points.len(),
        zero_count,
        strata,
    })
}

/// Canonical representative of the weighted orbit
/// `{(a B_0, a^p B_1, ...) : a != 0}`: the first nonzero entry in the order
/// `(s, row, col)` is scaled to 1. Over a finite field Frobenius is
/// bijective, so the scaling always exists and is unique.
pub fn orbit_reduce(field: &FiniteField, tuple: &CommutingTuple<Fe>) -> Result<CommutingTuple<Fe>> {
    let (s, x) = tuple
        .matrices()
        .iter()
        .enumerate()
        .find_map(|(s, m)| m.entries().iter().find(|x| !x.is_zero()).map(|&x| (s, x)))
        .ok_or_else(|| Error::InvalidArgument("orbit_reduce of the zero tuple".into()))?;
    let target = field.inv(x).expect("nonzero");
    let alpha = field.frob_root(target, s as u32);
    Ok(scale_tuple(field, tuple, &alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Matrix;
    use crate::strata::{builtin_chart, ChartParams};

    #[test]
    fn exhaustive_counts() {
        let c = builtin_chart("ga_r", ChartParams::new(3).r(2)).unwrap();
        let f = c.field().clone();
        let s = enumerate_points(&c, &f, &SweepConfig::default()).unwrap();
        assert_eq!(s.points.len(), 9);
        assert_eq!(s.points[1], vec![Fe(0), Fe(1)]);

        // a^2 = -bc over GF(3), counted directly: 9 solutions, times 3 values of l0
        let field = FiniteField::prime(3).unwrap();
        let mut cone = 0;
        for a in 0..3i64 {
            for b in 0..3i64 {
                for c in 0..3i64 {
                    if (a * a + b * c) % 3 == 0 {
                        cone += 1;
                    }
                }
            }
        }
        assert_eq!(cone, 9);
        let c = builtin_chart("sl2_line", ChartParams::new(3).r(1)).unwrap();
        let s = enumerate_points(&c, &field, &SweepConfig::default()).unwrap();
        assert_eq!(s.points.len(), cone * 3);
    }

    #[test]
    fn sampling() {
        let c = builtin_chart("sl2_line", ChartParams::new(5).r(2)).unwrap();
        let f = c.field().clone();
        let cfg = SweepConfig {
            budget: 100,
            samples: 37,
            seed: 9,
        };
        let a = enumerate_points(&c, &f, &cfg).unwrap();
        assert_eq!(a.points.len(), 37);
        assert_eq!(a.mode, SweepMode::Sampled { seed: 9, samples: 37 });
        assert!(a.points.iter().all(|x| c.satisfies(&f, x).unwrap()));
        let b = enumerate_points(&c, &f, &cfg).unwrap();
        assert_eq!(a.points, b.points);
        assert!(enumerate_points(&c, &f, &SweepConfig { budget: 0, ..cfg }).is_err());
        let g = FiniteField::prime(3).unwrap();
        assert!(matches!(
            enumerate_points(&c, &g, &cfg),
            Err(Error::CharacteristicMismatch(5, 3))
        ));
    }

    #[test]
    fn tables() {
        let c = builtin_chart("ga_r", ChartParams::new(3).r(2)).unwrap();
        let f = c.field().clone();
        let triv = ModuleExpr::parse("Trivial(4)").unwrap();
        let t = tabulate_jt(&c, &triv, &f, Variant::Full, &SweepConfig::default()).unwrap();
        assert_eq!(t.zero_count, 1);
        assert_eq!(t.strata.len(), 1);
        assert_eq!(t.strata[0].jt, JordanType::trivial(3, 4));
        assert_eq!(t.strata[0].count, 8);

        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        let t = tabulate_jt(&c, &e, &f, Variant::Full, &SweepConfig::default()).unwrap();
        let names: Vec<String> = t.types().iter().map(|j| j.to_string()).collect();
        assert_eq!(names, ["[3]+[1]", "2[2]"]);
        assert_eq!(t.get(&JordanType::parse(3, "[3]+[1]").unwrap()).unwrap().count, 4);
        assert_eq!(t.total, t.zero_count + t.strata.iter().map(|s| s.count).sum::<usize>());
    }

    #[test]
    fn orbit_reduction() {
        let f = FiniteField::prime(5).unwrap();
        let j2 = Matrix::from_vec(2, 2, vec![Fe(0), Fe(1), Fe(0), Fe(0)]);
        let t = CommutingTuple::new(&f, vec![j2.scale(&f, Fe(2))]).unwrap();
        let red = orbit_reduce(&f, &t).unwrap();
        assert_eq!(red.matrices()[0], j2);
        assert_eq!(orbit_reduce(&f, &red).unwrap(), red);

        let g = FiniteField::new(3, 2).unwrap();
        let b0 = Matrix::from_vec(2, 2, vec![Fe(0), Fe(0), Fe(0), Fe(0)]);
        let b1 = Matrix::from_vec(2, 2, vec![Fe(0), Fe(5), Fe(0), Fe(0)]);
        let t = CommutingTuple::new(&g, vec![b0, b1]).unwrap();
        let red = orbit_reduce(&g, &t).unwrap();
        assert_eq!(red.matrices()[1][(0, 1)], Fe::ONE);
        for a in g.elements().filter(|a| !a.is_zero()) {
            assert_eq!(orbit_reduce(&g, &scale_tuple(&g, &t, &a)).unwrap(), red);
        }
        assert!(orbit_reduce(&g, &CommutingTuple::zero(&g, 1, 2)).is_err());
    }
}
