//! Acceptance criteria and the strata property battery.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jtcalc_core::fields::{rank, Fe, FiniteField, Matrix};
use jtcalc_core::jordan::{
    all_types, dominance_leq, jt_of_nilpotent, jt_power, jt_rank, jt_tensor, JordanType,
};
use jtcalc_core::modules::{ExplicitModule, Layout, ModuleExpr};
use jtcalc_core::strata::{
    builtin_chart, enumerate_points, evaluate_points, orbit_reduce, random_commuting_tuple, random_invertible,
    rank_locus_minors, semicontinuity_check, tabulate_jt, verify_closed_stratum, Chart, ChartParams, Curve,
    SweepConfig,
};
use jtcalc_core::theta::{
    conjugate_tuple, jt_at_point, jt_exp_infinite, jt_power_at_point, scale_tuple, theta, theta_exp, theta_full,
    Variant,
};

type Check = std::result::Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Clone, Copy, Debug)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    run: fn(u64) -> Check,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({:.2}s / {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "closed forms for Sym(m-1)*Tw(Sym(n-1))", limit: secs(10), run: closed_forms },
    Criterion { id: 2, name: "full and exp operators agree at height 2", limit: secs(10), run: height_two_equality },
    Criterion { id: 3, name: "exp operator on explicit modules", limit: secs(5), run: exp_linear_part },
    Criterion { id: 4, name: "max-type loci agree across variants", limit: secs(30), run: max_type_loci },
    Criterion { id: 5, name: "semicontinuity along curves", limit: secs(30), run: semicontinuity },
    Criterion { id: 6, name: "Jordan calculus oracles", limit: secs(20), run: calculus_oracles },
    Criterion { id: 7, name: "determinantal closed strata", limit: secs(20), run: closed_strata },
    Criterion { id: 8, name: "direct-sum module over G_a^5", limit: secs(5), run: direct_sum_types },
    Criterion { id: 9, name: "conjugation invariance and homogeneity", limit: secs(10), run: invariance },
    Criterion { id: 10, name: "regular module has projective type", limit: secs(20), run: regular_module },
    Criterion { id: 11, name: "tensor products at height 1", limit: secs(10), run: tensor_height_one },
    Criterion { id: 12, name: "stabilization under trailing zeros", limit: secs(5), run: stabilization },
];

pub fn run_criterion(c: &Criterion, seed: u64) -> Outcome {
    let start = Instant::now();
    let res = (c.run)(seed);
    let elapsed = start.elapsed();
    let (passed, detail) = match res {
        Ok(d) if elapsed <= c.limit => (true, d),
        Ok(d) => (false, format!("{d}; over time limit")),
        Err(d) => (false, d),
    };
    Outcome {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
        limit: c.limit,
    }
}

pub fn run_acceptance(seed: u64) -> Vec<Outcome> {
    CRITERIA.iter().map(|c| run_criterion(c, seed)).collect()
}

fn gf(p: u32, n: u32) -> std::result::Result<FiniteField, String> {
    FiniteField::new(p, n).map_err(err)
}

fn chart(name: &str, params: ChartParams) -> std::result::Result<Chart, String> {
    builtin_chart(name, params).map_err(err)
}

fn module(s: &str) -> std::result::Result<ModuleExpr, String> {
    ModuleExpr::parse(s).map_err(err)
}

fn all_points(c: &Chart, f: &FiniteField) -> std::result::Result<Vec<Vec<Fe>>, String> {
    Ok(enumerate_points(c, f, &SweepConfig::default()).map_err(err)?.points)
}

fn sampled_points(c: &Chart, f: &FiniteField, n: usize, seed: u64) -> std::result::Result<Vec<Vec<Fe>>, String> {
    let cfg = SweepConfig {
        budget: 1,
        samples: n,
        seed,
    };
    Ok(enumerate_points(c, f, &cfg).map_err(err)?.points)
}

fn closed_forms(seed: u64) -> Check {
    let mut checked = 0;
    for p in [3u32, 5] {
        let c = chart("ga_r", ChartParams::new(p).r(2))?;
        let (fp, fq) = (gf(p, 1)?, gf(p, 2)?);
        let mut pts: Vec<(FiniteField, Vec<Fe>)> = all_points(&c, &fp)?.into_iter().map(|x| (fp.clone(), x)).collect();
        pts.extend(sampled_points(&c, &fq, 50, seed)?.into_iter().map(|x| (fq.clone(), x)));
        for l0 in 0..p {
            for l1 in 0..p {
                let e = module(&format!("Sym({l0},Std(2))*Tw(1,Sym({l1},Std(2)))"))?;
                let (m, n) = (l0 + 1, l1 + 1);
                let block = |k: u32, mult: usize| JordanType::blocks(p, &[(k, mult)]).map_err(err);
                for (f, x) in &pts {
                    let want = match (x[0].is_zero(), x[1].is_zero()) {
                        (false, true) => block(n, m as usize)?,
                        (true, false) => block(m, n as usize)?,
                        (false, false) => jt_tensor(&block(m, 1)?, &block(n, 1)?).map_err(err)?,
                        (true, true) => JordanType::trivial(p, (m * n) as usize),
                    };
                    let tuple = c.tuple_at(f, x).map_err(err)?;
                    for v in [Variant::Full, Variant::Exp] {
                        let got = jt_at_point(f, &e, &tuple, v).map_err(err)?;
                        if got != want {
                            return Err(format!("{e} at {} ({v}): {got}, expected {want}", c.fmt_point(f, x)));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} evaluations"))
}

const HEIGHT_TWO_MODULES: [&str; 3] = [
    "Std(2)*Tw(1,Std(2))",
    "Sym(2,Std(2))+Tw(1,Sym(2,Std(2)))",
    "Ext(2,Std(2)*Tw(1,Std(2)))",
];

fn height_two_equality(seed: u64) -> Check {
    let mut checked = 0;
    let mut sweeps = Vec::new();
    let c3 = chart("sl2_line", ChartParams::new(3).r(2))?;
    let f3 = gf(3, 1)?;
    sweeps.push((c3.clone(), f3.clone(), all_points(&c3, &f3)?));
    let c5 = chart("sl2_line", ChartParams::new(5).r(2))?;
    let f5 = gf(5, 1)?;
    sweeps.push((c5.clone(), f5.clone(), sampled_points(&c5, &f5, 200, seed)?));
    let f9 = gf(3, 2)?;
    sweeps.push((c3.clone(), f9.clone(), sampled_points(&c3, &f9, 200, seed)?));
    for (c, f, pts) in &sweeps {
        for s in HEIGHT_TWO_MODULES {
            let e = module(s)?;
            for x in pts {
                let tuple = c.tuple_at(f, x).map_err(err)?;
                let a = theta_full(f, &e, &tuple).map_err(err)?;
                let b = theta_exp(f, &e, &tuple).map_err(err)?;
                if a != b {
                    return Err(format!("{e} over {f} at {}", c.fmt_point(f, x)));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} matrix comparisons"))
}

fn exp_linear_part(seed: u64) -> Check {
    let (p, r) = (3u32, 3usize);
    let c = chart("ga_r", ChartParams::new(p).r(r))?;
    let f3 = gf(p, 1)?;
    let f9 = gf(p, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..100 {
        let n = rng.gen_range(2..=5);
        let alphas = random_commuting_tuple(&f3, n, r, &mut rng).map_err(err)?;
        let m = ExplicitModule::new(format!("random{k}"), f3.clone(), Layout::Frobenius, alphas.matrices().to_vec())
            .map_err(err)?;
        let e = ModuleExpr::Explicit(m);
        let a: Vec<Fe> = (0..r).map(|_| f9.random(&mut rng)).collect();
        let tuple = c.tuple_at(&f9, &a).map_err(err)?;
        let got = theta_exp(&f9, &e, &tuple).map_err(err)?;
        let mut want = Matrix::zeros(&f9, n, n);
        for (i, alpha) in alphas.matrices().iter().enumerate() {
            let coeff = f9.frob(a[r - 1 - i], i as u32);
            want = want.add(&f9, &alpha.scale(&f9, coeff));
        }
        if got != want {
            return Err(format!("sample {k}: operator differs at {}", c.fmt_point(&f9, &a)));
        }
    }
    Ok("100 samples".into())
}

/// Maximal observed types and the points attaining them.
fn max_locus(jts: &[Option<JordanType>]) -> std::result::Result<(Vec<JordanType>, BTreeSet<usize>), String> {
    let seen: BTreeSet<&JordanType> = jts.iter().flatten().collect();
    let mut maximal = Vec::new();
    for a in &seen {
        let mut top = true;
        for b in &seen {
            if a != b && dominance_leq(a, b).map_err(err)? {
                top = false;
                break;
            }
        }
        if top {
            maximal.push((*a).clone());
        }
    }
    let locus = jts
        .iter()
        .enumerate()
        .filter(|(_, j)| j.as_ref().is_some_and(|j| maximal.contains(j)))
        .map(|(i, _)| i)
        .collect();
    Ok((maximal, locus))
}

pub const MAX_TYPE_SAMPLES: [(u32, u32); 4] = [(1, 0), (0, 1), (1, 1), (1, 2)];

/// Variants whose maximal locus differs from that of the full operator,
/// each with its maximal types and locus size.
pub fn max_type_disagreements() -> std::result::Result<(usize, Vec<(Variant, String)>, String), String> {
    let c = chart("sl2_line", ChartParams::new(3).r(3))?;
    let f = c.field().clone();
    let e = module("Std(2)*Tw(1,Std(2))*Tw(2,Std(2))")?;
    let pts = all_points(&c, &f)?;
    let mut variants = vec![Variant::Full, Variant::Exp];
    variants.extend(MAX_TYPE_SAMPLES.iter().map(|&(s, t)| Variant::Homotopy { s: Fe(s), t: Fe(t) }));
    let describe = |types: &[JordanType], locus: &BTreeSet<usize>| {
        let names: Vec<String> = types.iter().map(|t| t.to_string()).collect();
        format!("{} on {} points", names.join("|"), locus.len())
    };
    let mut reference = None;
    let mut bad = Vec::new();
    for v in variants {
        let jts = evaluate_points(&c, &e, &f, v, &pts).map_err(|x| format!("{v}: {x}"))?;
        let (types, locus) = max_locus(&jts)?;
        match &reference {
            None => reference = Some((describe(&types, &locus), locus)),
            Some((_, r)) if r != &locus => bad.push((v, describe(&types, &locus))),
            Some(_) => {}
        }
    }
    Ok((pts.len(), bad, reference.unwrap().0))
}

fn max_type_loci(_seed: u64) -> Check {
    let (n, bad, full) = max_type_disagreements()?;
    if bad.is_empty() {
        return Ok(format!("{n} points; all variants attain {full}"));
    }
    let parts: Vec<String> = bad.iter().map(|(v, d)| format!("{v} attains {d}")).collect();
    Err(format!("full attains {full}; {}", parts.join("; ")))
}

fn semicontinuity(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setups = [
        ("ga_r", ChartParams::new(3).r(2), "Std(2)*Tw(1,Std(2))"),
        ("multi_ga", ChartParams::new(3).s(2), "Ext(2,Std(4))"),
        ("sl2_line", ChartParams::new(3).r(2), "Std(2)*Tw(1,Std(2))"),
        ("upper_glN", ChartParams::new(3).n(3).r(2), "Std(3)*Tw(1,Std(3))"),
    ];
    let mut count = 0;
    for (name, params, m) in setups {
        let c = chart(name, params)?;
        let e = module(m)?;
        let f = c.field().clone();
        for _ in 0..50 {
            let curve = Curve::random(&c, &f, &mut rng).map_err(err)?;
            for v in [Variant::Full, Variant::Exp] {
                let rep = semicontinuity_check(&curve, &e, v).map_err(err)?;
                if !rep.holds {
                    return Err(format!(
                        "{name} curve {}: special {} not <= generic {}",
                        curve.fmt_substitutions(),
                        rep.special,
                        rep.generic
                    ));
                }
                count += 1;
            }
        }
    }
    let c = chart("sl2_line", ChartParams::new(3).r(2))?;
    let f = c.field().clone();
    let poly = |v: &[u32]| jtcalc_core::fields::UniPoly::from_coeffs(v.iter().map(|&x| Fe(x)).collect());
    let worked = Curve::new(&c, &f, vec![poly(&[]), poly(&[1]), poly(&[]), poly(&[0, 1]), poly(&[1])]).map_err(err)?;
    let e = module("Std(2)*Tw(1,Std(2))")?;
    for v in [Variant::Full, Variant::Exp] {
        let rep = semicontinuity_check(&worked, &e, v).map_err(err)?;
        if rep.generic.to_string() != "[3]+[1]" || rep.special.to_string() != "2[2]" || !rep.holds {
            return Err(format!("worked curve ({v}): generic {}, special {}", rep.generic, rep.special));
        }
    }
    Ok(format!("{count} random curve checks and the worked curve"))
}

fn calculus_oracles(seed: u64) -> Check {
    let mut count = 0;
    for p in [2u32, 3, 5] {
        let f = gf(p, 1)?;
        let mut ranks: HashMap<JordanType, Vec<usize>> = HashMap::new();
        for m in 1..=9 {
            let types = all_types(p, m);
            for a in &types {
                let n = a.realize(&f);
                let mut power = n.clone();
                let mut rs = Vec::new();
                for s in 1..p {
                    let r = rank(&f, &power);
                    if jt_rank(a, s).map_err(err)? != r {
                        return Err(format!("jt_rank({a}, {s}) != {r}"));
                    }
                    let jp = jt_power(a, s).map_err(err)?;
                    let oracle = jt_of_nilpotent(&f, &power).map_err(err)?;
                    if jp != oracle {
                        return Err(format!("jt_power({a}, {s}) = {jp}, matrix gives {oracle}"));
                    }
                    rs.push(r);
                    power = power.mul(&f, &n);
                    count += 2;
                }
                ranks.insert(a.clone(), rs);
            }
            for a in &types {
                for b in &types {
                    let by_rank = ranks[a].iter().zip(&ranks[b]).all(|(x, y)| x <= y);
                    if dominance_leq(a, b).map_err(err)? != by_rank {
                        return Err(format!("dominance {a} <= {b} disagrees with ranks"));
                    }
                    count += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let p = [2u32, 3, 5][rng.gen_range(0..3)];
        let mut pick = || {
            let m = rng.gen_range(1..=5);
            let ts = all_types(p, m);
            ts[rng.gen_range(0..ts.len())].clone()
        };
        let (a, b, c) = (pick(), pick(), pick());
        let ab = jt_tensor(&a, &b).map_err(err)?;
        if ab != jt_tensor(&b, &a).map_err(err)? {
            return Err(format!("tensor not commutative on {a}, {b}"));
        }
        let left = jt_tensor(&ab, &c).map_err(err)?;
        let right = jt_tensor(&a, &jt_tensor(&b, &c).map_err(err)?).map_err(err)?;
        if left != right {
            return Err(format!("tensor not associative on {a}, {b}, {c}"));
        }
        count += 2;
    }
    Ok(format!("{count} checks"))
}

fn closed_strata(_seed: u64) -> Check {
    let c = chart("sl2_line", ChartParams::new(3).r(2))?;
    let f = c.field().clone();
    let e = module("Std(2)*Tw(1,Std(2))")?;
    let cfg = SweepConfig::default();
    let table = tabulate_jt(&c, &e, &f, Variant::Full, &cfg).map_err(err)?;
    let mut types: Vec<JordanType> = table.strata.iter().map(|s| s.jt.clone()).collect();
    if table.zero_count > 0 {
        types.push(JordanType::trivial(3, 4));
    }
    let mut out = Vec::new();
    for a in &types {
        let rep = verify_closed_stratum(&c, &e, a, &f, Variant::Full, &cfg).map_err(err)?;
        if !rep.holds() {
            return Err(format!("{a}: {} mismatches, first {}", rep.mismatches.len(), c.fmt_point(&f, &rep.mismatches[0])));
        }
        out.push(format!("{a}:{}", rep.below));
    }
    Ok(format!("{} points; {}", table.total, out.join(" ")))
}

fn direct_sum_types(_seed: u64) -> Check {
    let p = 5u32;
    let c = chart("multi_ga", ChartParams::new(p).s(p as usize))?;
    let f = c.field().clone();
    let e = module("Explicit(ex74,p=5)")?;
    // on C_j the operator is (sum_{i != j} a_i) times a full chain
    let oracle = |x: &[Fe]| -> std::result::Result<JordanType, String> {
        let mut blocks = Vec::new();
        for j in 1..p as usize {
            let s = (0..p as usize)
                .filter(|&i| i != j)
                .fold(Fe::ZERO, |acc, i| f.add(acc, x[i]));
            if s.is_zero() {
                blocks.push((1, j));
            } else {
                blocks.push((j as u32, 1));
            }
        }
        JordanType::blocks(p, &blocks).map_err(err)
    };
    for i in 0..p as usize {
        let mut x = vec![Fe::ZERO; p as usize];
        x[i] = Fe::ONE;
        let tuple = c.tuple_at(&f, &x).map_err(err)?;
        let got = jt_at_point(&f, &e, &tuple, Variant::Full).map_err(err)?;
        let mut blocks: Vec<(u32, usize)> = (1..p).filter(|&j| j as usize != i).map(|j| (j, 1)).collect();
        blocks.push((1, i));
        let want = JordanType::blocks(p, &blocks).map_err(err)?;
        if got != want {
            return Err(format!("e_{i}: {got}, expected {want}"));
        }
    }
    let table = tabulate_jt(&c, &e, &f, Variant::Full, &SweepConfig::default()).map_err(err)?;
    let pts = all_points(&c, &f)?;
    let mut expected = BTreeSet::new();
    for x in &pts {
        if x.iter().any(|a| !a.is_zero()) {
            expected.insert(oracle(x)?);
        }
    }
    let listed: BTreeSet<JordanType> = table.strata.iter().map(|s| s.jt.clone()).collect();
    if listed != expected {
        return Err(format!("table lists {} types, oracle gives {}", listed.len(), expected.len()));
    }
    Ok(format!("{} strata over {} points", listed.len(), table.total))
}

fn invariance(seed: u64) -> Check {
    let f = gf(3, 2)?;
    let p = f.characteristic();
    let r = 2usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modules = [module("Std(3)*Tw(1,Std(3))")?, module("Sym(2,Std(3))")?];
    let alphas: Vec<Fe> = f.elements().filter(|a| !a.is_zero()).collect();
    let mut scalings = 0;
    for k in 0..100 {
        let e = &modules[k % 2];
        let tuple = random_commuting_tuple(&f, 3, r, &mut rng).map_err(err)?;
        let g = random_invertible(&f, 3, &mut rng);
        let conj = conjugate_tuple(&f, &tuple, &g).map_err(err)?;
        for v in [Variant::Full, Variant::Exp] {
            let base = theta(&f, e, &tuple, v).map_err(err)?.matrix;
            let jt = jt_of_nilpotent(&f, &base).map_err(err)?;
            if jt_at_point(&f, e, &conj, v).map_err(err)? != jt {
                return Err(format!("conjugation changed the type of {e} ({v}), sample {k}"));
            }
            if k < 10 {
                for a in &alphas {
                    let scaled = theta(&f, e, &scale_tuple(&f, &tuple, a), v).map_err(err)?.matrix;
                    let factor = f.pow(*a, (p as u64).pow(r as u32 - 1));
                    if scaled != base.scale(&f, factor) {
                        return Err(format!("scaling by {} breaks homogeneity of {e} ({v})", f.fmt_fe(*a)));
                    }
                    if jt_of_nilpotent(&f, &scaled).map_err(err)? != jt {
                        return Err(format!("scaling changed the type of {e} ({v})"));
                    }
                    scalings += 1;
                }
            }
        }
    }
    Ok(format!("200 conjugations, {scalings} scalings"))
}

fn regular_module(_seed: u64) -> Check {
    let c = chart("ga_r", ChartParams::new(3).r(2))?;
    let e = module("Explicit(regular,p=3,r=2)")?;
    let want = JordanType::blocks(3, &[(3, 3)]).map_err(err)?;
    let mut count = 0;
    for f in [gf(3, 1)?, gf(3, 2)?] {
        let pts = all_points(&c, &f)?;
        for v in [Variant::Full, Variant::Exp] {
            for (x, jt) in pts.iter().zip(evaluate_points(&c, &e, &f, v, &pts).map_err(err)?) {
                if let Some(jt) = jt {
                    if jt != want {
                        return Err(format!("{} over {f} ({v}): {jt}", c.fmt_point(&f, x)));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} nonzero points"))
}

fn tensor_height_one(_seed: u64) -> Check {
    let c = chart("multi_ga", ChartParams::new(5).s(2))?;
    let f = c.field().clone();
    let pairs = [
        ("Std(4)", "Std(4)"),
        ("Std(4)", "Ext(2,Std(4))"),
        ("Sym(2,Std(4))", "Dual(Std(4))"),
    ];
    let pts = all_points(&c, &f)?;
    for (a, b) in pairs {
        let (m, n) = (module(a)?, module(b)?);
        let mn = ModuleExpr::tensor(m.clone(), n.clone());
        for x in &pts {
            let t = c.tuple_at(&f, x).map_err(err)?;
            let jm = jt_at_point(&f, &m, &t, Variant::Full).map_err(err)?;
            let jn = jt_at_point(&f, &n, &t, Variant::Full).map_err(err)?;
            let got = jt_at_point(&f, &mn, &t, Variant::Full).map_err(err)?;
            let want = jt_tensor(&jm, &jn).map_err(err)?;
            if got != want {
                return Err(format!("{mn} at {}: {got}, expected {want}", c.fmt_point(&f, x)));
            }
        }
    }
    Ok(format!("3 pairs over {} points", pts.len()))
}

fn stabilization(seed: u64) -> Check {
    let f = gf(3, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..100 {
        let n = rng.gen_range(2..=3);
        let r = rng.gen_range(1..=3);
        let tuple = random_commuting_tuple(&f, n, r, &mut rng).map_err(err)?;
        let e = module(&format!("Std({n})*Tw(1,Std({n}))"))?;
        let mut list = tuple.matrices().to_vec();
        let base = jt_exp_infinite(&f, &list, &e).map_err(err)?;
        for z in 1..=3 {
            list.push(Matrix::zeros(&f, n, n));
            let got = jt_exp_infinite(&f, &list, &e).map_err(err)?;
            if got != base {
                return Err(format!("sample {k}: {z} trailing zeros give {got}, expected {base}"));
            }
        }
    }
    Ok("100 inputs, up to 3 zeros".into())
}

/// Strata invariants on the sl2 chart of height 2 over `GF(p)`: continuity
/// of down-sets, the rank audit for powers, and orbit invariance of strata.
pub fn property_battery(p: u32, seed: u64) -> Vec<(String, Check)> {
    let mut out = Vec::new();
    let setup = || -> std::result::Result<(Chart, FiniteField, ModuleExpr, Vec<Vec<Fe>>), String> {
        let c = chart("sl2_line", ChartParams::new(p).r(2))?;
        let f = c.field().clone();
        let e = module("Std(2)*Tw(1,Std(2))")?;
        let cfg = SweepConfig {
            samples: 500,
            ..SweepConfig::seeded(seed)
        };
        let pts = enumerate_points(&c, &f, &cfg).map_err(err)?.points;
        Ok((c, f, e, pts))
    };
    let (c, f, e, pts) = match setup() {
        Ok(s) => s,
        Err(e) => return vec![("setup".into(), Err(e))],
    };
    let jts = match evaluate_points(&c, &e, &f, Variant::Full, &pts) {
        Ok(j) => j,
        Err(x) => return vec![("evaluation".into(), Err(x.to_string()))],
    };
    let dim = 4;
    let realized: BTreeSet<JordanType> = jts.iter().flatten().cloned().collect();

    out.push(("continuity of down-sets".into(), (|| {
        let mut pairs = 0;
        for b in &realized {
            let mut gens = Vec::new();
            for s in 1..p {
                gens.extend(rank_locus_minors(&c, &e, Variant::Full, s, jt_rank(b, s).map_err(err)?).map_err(err)?);
            }
            for a in &realized {
                if !dominance_leq(a, b).map_err(err)? {
                    continue;
                }
                pairs += 1;
                for (x, jt) in pts.iter().zip(&jts) {
                    if jt.as_ref() != Some(a) {
                        continue;
                    }
                    for g in &gens {
                        if !c.ring().evaluate(g, x, &f).map_err(err)?.is_zero() {
                            return Err(format!("{} of type {a} outside the {b} locus", c.fmt_point(&f, x)));
                        }
                    }
                }
            }
        }
        Ok(format!("{pairs} comparable pairs"))
    })()));

    out.push(("rank loci of powers".into(), (|| {
        let mut count = 0;
        for j in 1..p {
            for d in 0..dim {
                let gens = rank_locus_minors(&c, &e, Variant::Full, j, d).map_err(err)?;
                for x in &pts {
                    let t = c.tuple_at(&f, x).map_err(err)?;
                    let jp = jt_power_at_point(&f, &e, &t, Variant::Full, j).map_err(err)?;
                    let r = dim - jp.num_blocks();
                    let mut vanish = true;
                    for g in &gens {
                        if !c.ring().evaluate(g, x, &f).map_err(err)?.is_zero() {
                            vanish = false;
                            break;
                        }
                    }
                    if vanish != (r <= d) {
                        return Err(format!("j={j}, d={d} at {}: rank {r}", c.fmt_point(&f, x)));
                    }
                    count += 1;
                }
            }
        }
        Ok(format!("{count} locus checks"))
    })()));

    out.push(("strata are orbit invariant".into(), (|| {
        let mut count = 0;
        for (x, jt) in pts.iter().zip(&jts) {
            let Some(jt) = jt else { continue };
            let t = c.tuple_at(&f, x).map_err(err)?;
            let red = orbit_reduce(&f, &t).map_err(err)?;
            if &jt_at_point(&f, &e, &red, Variant::Full).map_err(err)? != jt {
                return Err(format!("orbit representative of {} changes type", c.fmt_point(&f, x)));
            }
            count += 1;
        }
        Ok(format!("{count} nonzero points"))
    })()));
    out
}
