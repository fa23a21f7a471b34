use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jtcalc_core::fields::{FiniteField, PolyRing, Ring, UniPolyRing};
use jtcalc_core::jordan::{dominance, jt_perp, jt_power, jt_rank, jt_tensor, JordanType};
use jtcalc_core::modules::ModuleExpr;
use jtcalc_core::strata::{
    builtin_chart, rank_locus_minors, semicontinuity_check, tabulate_jt, verify_closed_stratum, Chart, ChartParams,
    Curve, SweepConfig, SweepMode, CHART_NAMES,
};
use jtcalc_core::theta::{jt_at_point, Variant};

use crate::config::{CliError, CliResult, Command, Level, RunConfig, VariantSpec};
use crate::report::{Report, ReportRecord};
use crate::suite;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

/// Resolved inputs shared by the chart commands.
struct Setup {
    chart: Chart,
    field: FiniteField,
    module: ModuleExpr,
    variant: Variant,
}

fn prime(cfg: &RunConfig) -> CliResult<u32> {
    let from_field = match &cfg.field {
        Some(f) => Some(FiniteField::parse(f)?.characteristic()),
        None => None,
    };
    match (cfg.p, from_field) {
        (Some(p), Some(q)) if p != q => Err(usage(format!("--p {p} disagrees with field of characteristic {q}"))),
        (Some(p), _) | (None, Some(p)) => Ok(p),
        (None, None) => Err(usage(format!("`{}` needs --p or --field", cfg.command.name()))),
    }
}

fn chart(cfg: &RunConfig) -> CliResult<Chart> {
    let name = cfg.chart.as_deref().expect("checked by parse_config");
    if CHART_NAMES.contains(&name) {
        let mut params = ChartParams::new(prime(cfg)?);
        if let Some(r) = cfg.r {
            params = params.r(r);
        }
        if let Some(n) = cfg.size {
            params = params.n(n);
        }
        if let Some(s) = cfg.factors {
            params = params.s(s);
        }
        return Ok(builtin_chart(name, params)?);
    }
    if cfg.r.is_some() || cfg.size.is_some() || cfg.factors.is_some() {
        return Err(usage("--r, --size and --factors apply only to built-in charts"));
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(usage(format!("`{name}` is neither a built-in chart ({}) nor a file", CHART_NAMES.join(", "))));
    }
    let c = Chart::load(path)?;
    if let Some(p) = cfg.p {
        if p != c.p() {
            return Err(usage(format!("--p {p} disagrees with chart `{}` over characteristic {}", c.name(), c.p())));
        }
    }
    Ok(c)
}

fn setup(cfg: &RunConfig) -> CliResult<Setup> {
    let chart = chart(cfg)?;
    let field = match &cfg.field {
        Some(f) => FiniteField::parse(f)?,
        None => chart.field().clone(),
    };
    let module = ModuleExpr::parse(cfg.module.as_deref().expect("checked by parse_config"))?;
    for w in module.warnings(chart.p()) {
        eprintln!("warning: {w}");
    }
    let variant = match &cfg.variant {
        VariantSpec::Full => Variant::Full,
        VariantSpec::Exp => Variant::Exp,
        VariantSpec::Homotopy { s, t } => Variant::Homotopy {
            s: field.parse_element(s)?,
            t: field.parse_element(t)?,
        },
    };
    Ok(Setup { chart, field, module, variant })
}

fn sweep_config(cfg: &RunConfig, s: &Setup) -> CliResult<SweepConfig> {
    let size = (s.field.order() as u128).checked_pow(s.chart.nparams() as u32);
    let sampled = size.is_none_or(|n| n > cfg.budget as u128);
    if sampled && cfg.seed.is_none() {
        return Err(usage(format!(
            "{} has more than {} points, so the sweep is sampled and needs --seed",
            s.chart.name(),
            cfg.budget
        )));
    }
    Ok(SweepConfig {
        budget: cfg.budget,
        samples: cfg.samples,
        seed: cfg.seed.unwrap_or(0),
    })
}

fn record(cfg: &RunConfig, s: Option<&Setup>, kind: &str) -> ReportRecord {
    let mut r = ReportRecord::new(cfg.command.name(), kind);
    r.seed = cfg.seed;
    if let Some(s) = s {
        r.chart = Some(s.chart.name().to_string());
        r.module = Some(s.module.to_string());
        r.field = Some(s.field.descriptor());
        r.variant = Some(s.variant.to_string());
    }
    r
}

fn ranks(jt: &JordanType) -> CliResult<Vec<usize>> {
    (1..jt.p()).map(|s| Ok(jt_rank(jt, s)?)).collect()
}

fn fmt_ranks(r: &[usize]) -> String {
    r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn mode_name(m: &SweepMode) -> String {
    match m {
        SweepMode::Exhaustive => "exhaustive".into(),
        SweepMode::Sampled { samples, .. } => format!("sampled({samples})"),
    }
}

pub fn dispatch(cfg: &RunConfig) -> CliResult<Report> {
    match cfg.command {
        Command::Jt => jt(cfg),
        Command::Strata => strata(cfg),
        Command::Minors => minors(cfg),
        Command::Closed => closed(cfg),
        Command::Semicont => semicont(cfg),
        Command::Tensor | Command::Dominance | Command::Perp | Command::Power => calculus(cfg),
        Command::Suite => run_suite(cfg),
    }
}

fn jt(cfg: &RunConfig) -> CliResult<Report> {
    let s = setup(cfg)?;
    let point = s.chart.parse_point(&s.field, cfg.point.as_deref().expect("checked by parse_config"))?;
    let tuple = s.chart.tuple_at(&s.field, &point)?;
    let jt = jt_at_point(&s.field, &s.module, &tuple, s.variant)?;
    let coords: Vec<String> = point.iter().map(|&x| s.field.fmt_fe(x)).collect();
    let mut r = record(cfg, Some(&s), "point");
    r.point = Some(coords.clone());
    r.jt = Some(jt.to_string());
    r.ranks = Some(ranks(&jt)?);
    Ok(Report {
        text: vec![format!("{} at {}: {jt}", s.module, s.chart.fmt_point(&s.field, &point))],
        csv_header: vec!["point", "type", "ranks"],
        csv_rows: vec![vec![coords.join(" "), jt.to_string(), fmt_ranks(r.ranks.as_ref().unwrap())]],
        records: vec![r],
        violation: None,
    })
}

fn strata(cfg: &RunConfig) -> CliResult<Report> {
    let s = setup(cfg)?;
    let sc = sweep_config(cfg, &s)?;
    let table = tabulate_jt(&s.chart, &s.module, &s.field, s.variant, &sc)?;
    let mut rep = Report {
        csv_header: vec!["type", "count", "ranks", "representatives"],
        ..Default::default()
    };
    let mut head = record(cfg, Some(&s), "sweep");
    head.mode = Some(mode_name(&table.mode));
    head.total = Some(table.total);
    head.zero_count = Some(table.zero_count);
    rep.text.push(format!(
        "# {} on {} over {}, {} variant: {} points ({}), {} zero",
        s.module,
        s.chart.name(),
        s.field.descriptor(),
        s.variant,
        table.total,
        mode_name(&table.mode),
        table.zero_count
    ));
    rep.records.push(head);
    let width = table.strata.iter().map(|t| t.jt.to_string().len()).max().unwrap_or(0);
    for st in &table.strata {
        let reps: Vec<String> = st.representatives.iter().map(|x| s.chart.fmt_point(&s.field, x)).collect();
        let rk = ranks(&st.jt)?;
        rep.text.push(format!("{:<width$}  {:>8}  {}", st.jt.to_string(), st.count, reps.join(" ")));
        rep.csv_rows.push(vec![st.jt.to_string(), st.count.to_string(), fmt_ranks(&rk), reps.join(" ")]);
        let mut r = record(cfg, None, "stratum");
        r.jt = Some(st.jt.to_string());
        r.count = Some(st.count);
        r.ranks = Some(rk);
        r.representatives = Some(st.representatives.iter().map(|x| table.fmt_point(x)).collect());
        rep.records.push(r);
    }
    Ok(rep)
}

fn minors(cfg: &RunConfig) -> CliResult<Report> {
    let s = setup(cfg)?;
    let (j, d) = (cfg.j.unwrap(), cfg.d.unwrap());
    let gens = rank_locus_minors(&s.chart, &s.module, s.variant, j, d)?;
    let mut rep = Report {
        csv_header: vec!["polynomial"],
        ..Default::default()
    };
    rep.text.push(format!("# {} generators of rank(theta^{j}) <= {d} for {} on {}", gens.len(), s.module, s.chart.name()));
    for g in &gens {
        let shown = s.chart.ring().display(g).to_string();
        rep.text.push(shown.clone());
        rep.csv_rows.push(vec![shown.clone()]);
        let mut r = record(cfg, Some(&s), "minor");
        r.polynomial = Some(shown);
        rep.records.push(r);
    }
    Ok(rep)
}

fn closed(cfg: &RunConfig) -> CliResult<Report> {
    let s = setup(cfg)?;
    let sc = sweep_config(cfg, &s)?;
    let targets = match &cfg.jt {
        Some(t) => vec![JordanType::parse(s.chart.p(), t)?],
        None => tabulate_jt(&s.chart, &s.module, &s.field, s.variant, &sc)?
            .strata
            .into_iter()
            .map(|st| st.jt)
            .collect(),
    };
    let mut rep = Report {
        csv_header: vec!["type", "holds", "below", "in_zero_set", "points", "generators"],
        ..Default::default()
    };
    let mut failed = Vec::new();
    for a in &targets {
        let c = verify_closed_stratum(&s.chart, &s.module, a, &s.field, s.variant, &sc)?;
        let mut detail = format!(
            "{} of {} points have type <= {a}, {} lie on the {} minors",
            c.below, c.points, c.in_zero_set, c.generators
        );
        if !c.holds() {
            failed.push(a.to_string());
            let shown: Vec<String> = c.mismatches.iter().take(4).map(|x| s.chart.fmt_point(&s.field, x)).collect();
            detail.push_str(&format!("; mismatches at {}", shown.join(" ")));
        }
        rep.text.push(format!("{a}: {} ({detail})", if c.holds() { "closed" } else { "NOT CLOSED" }));
        rep.csv_rows.push(vec![
            a.to_string(),
            c.holds().to_string(),
            c.below.to_string(),
            c.in_zero_set.to_string(),
            c.points.to_string(),
            c.generators.to_string(),
        ]);
        let mut r = record(cfg, Some(&s), "closed");
        r.jt = Some(a.to_string());
        r.count = Some(c.below);
        r.total = Some(c.points);
        r.verdict = Some(c.holds());
        r.detail = Some(detail);
        rep.records.push(r);
    }
    if !failed.is_empty() {
        rep.violation = Some(format!("down-sets of {} differ from their minor loci", failed.join(", ")));
    }
    Ok(rep)
}

fn parse_curve(s: &Setup, text: &str) -> CliResult<Curve> {
    let ring = PolyRing::new(s.field.clone(), &["t"])?;
    let pr = UniPolyRing::new(s.field.clone(), "t");
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    let mut subs = vec![None; s.chart.nparams()];
    for (i, item) in items.iter().enumerate() {
        let (idx, val) = match item.split_once('=') {
            Some((k, v)) => (
                s.chart
                    .ring()
                    .index_of(k.trim())
                    .ok_or_else(|| usage(format!("unknown parameter `{}` in curve", k.trim())))?,
                v.trim(),
            ),
            None => (i, *item),
        };
        if idx >= subs.len() {
            return Err(usage(format!("{} substitutions for {} parameters", items.len(), subs.len())));
        }
        let f = ring.parse(val)?;
        subs[idx] = Some(ring.eval_in(&f, &pr, &[pr.variable()])?);
    }
    let subs = subs
        .into_iter()
        .zip(s.chart.params())
        .map(|(x, n)| x.ok_or_else(|| usage(format!("curve leaves `{n}` unset"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Curve::new(&s.chart, &s.field, subs)?)
}

fn semicont(cfg: &RunConfig) -> CliResult<Report> {
    let s = setup(cfg)?;
    let curves = match &cfg.curve {
        Some(c) => vec![parse_curve(&s, c)?],
        None => {
            let seed = cfg.seed.ok_or_else(|| usage("random curves need --seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..cfg.curves)
                .map(|_| Curve::random(&s.chart, &s.field, &mut rng))
                .collect::<jtcalc_core::Result<Vec<_>>>()?
        }
    };
    let mut rep = Report {
        csv_header: vec!["curve", "generic", "special", "holds"],
        ..Default::default()
    };
    let mut bad = 0;
    for c in &curves {
        let res = semicontinuity_check(c, &s.module, s.variant)?;
        let subs = c.fmt_substitutions();
        if !res.holds {
            bad += 1;
        }
        rep.text.push(format!("{subs}: special {} <= generic {}: {}", res.special, res.generic, res.holds));
        rep.csv_rows.push(vec![subs.clone(), res.generic.to_string(), res.special.to_string(), res.holds.to_string()]);
        let mut r = record(cfg, Some(&s), "curve");
        r.curve = Some(subs);
        r.generic = Some(res.generic.to_string());
        r.special = Some(res.special.to_string());
        r.verdict = Some(res.holds);
        rep.records.push(r);
    }
    if bad > 0 {
        rep.violation = Some(format!("{bad} of {} curves break semicontinuity", curves.len()));
    }
    Ok(rep)
}

fn calculus(cfg: &RunConfig) -> CliResult<Report> {
    let p = prime(cfg)?;
    let ops = cfg
        .operands
        .iter()
        .map(|s| JordanType::parse(p, s))
        .collect::<jtcalc_core::Result<Vec<_>>>()?;
    let mut r = record(cfg, None, "result");
    r.operands = Some(ops.iter().map(|a| a.to_string()).collect());
    let (line, value) = match cfg.command {
        Command::Tensor => {
            let c = jt_tensor(&ops[0], &ops[1])?;
            (format!("{} (x) {} = {c}", ops[0], ops[1]), c.to_string())
        }
        Command::Perp => {
            let c = jt_perp(&ops[0]);
            (format!("perp({}) = {c}", ops[0]), c.to_string())
        }
        Command::Power => {
            let j = cfg.j.unwrap();
            let c = jt_power(&ops[0], j)?;
            (format!("({})^{j} = {c}", ops[0]), c.to_string())
        }
        Command::Dominance => {
            let d = dominance(&ops[1], &ops[0])?;
            r.verdict = Some(d.holds);
            let mut line = format!("{} <= {}: {}", ops[1], ops[0], d.holds);
            if d.dimension_mismatch {
                let note = format!("dimensions differ ({} vs {})", ops[1].dim(), ops[0].dim());
                line.push_str(&format!(" ({note})"));
                r.detail = Some(note);
            }
            let v = d.holds.to_string();
            return Ok(Report {
                text: vec![line],
                csv_header: vec!["lower", "upper", "holds"],
                csv_rows: vec![vec![ops[1].to_string(), ops[0].to_string(), v]],
                records: vec![r],
                violation: None,
            });
        }
        _ => unreachable!(),
    };
    r.jt = Some(value.clone());
    Ok(Report {
        text: vec![line],
        csv_header: vec!["operands", "type"],
        csv_rows: vec![vec![cfg.operands.join(" "), value]],
        records: vec![r],
        violation: None,
    })
}

fn run_suite(cfg: &RunConfig) -> CliResult<Report> {
    let seed = cfg.seed.unwrap_or(crate::config::DEFAULT_SUITE_SEED);
    let p = cfg.p.unwrap_or(3);
    let mut rep = Report {
        csv_header: vec!["check", "passed", "detail"],
        ..Default::default()
    };
    let mut failed = Vec::new();
    let mut push = |rep: &mut Report, name: String, passed: bool, detail: String, line: String| {
        if !passed {
            failed.push(name.clone());
        }
        rep.text.push(line);
        rep.csv_rows.push(vec![name.clone(), passed.to_string(), detail.clone()]);
        let mut r = ReportRecord::new("suite", "check");
        r.seed = Some(seed);
        r.detail = Some(format!("{name}: {detail}"));
        r.verdict = Some(passed);
        rep.records.push(r);
    };
    if cfg.level == Level::Full {
        for o in suite::run_acceptance(seed) {
            push(&mut rep, format!("criterion {}", o.id), o.passed, o.detail.clone(), o.line());
        }
    }
    for (name, res) in suite::property_battery(p, seed) {
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let line = format!("{} property {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        push(&mut rep, name, passed, detail, line);
    }
    if !failed.is_empty() {
        rep.violation = Some(format!("failed: {}", failed.join(", ")));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Args};
    use clap::Parser;

    fn run(v: &[&str]) -> CliResult<Report> {
        let args = Args::try_parse_from(std::iter::once("jtcalc").chain(v.iter().copied())).unwrap();
        dispatch(&parse_config(args, None)?)
    }

    #[test]
    fn dominance_line() {
        let rep = run(&["dominance", "[3]", "[2]+[1]", "--p", "3"]).unwrap();
        assert_eq!(rep.text, ["[2]+[1] <= [3]: true"]);
        let rep = run(&["dominance", "[2]+[1]", "[3]", "--p", "3"]).unwrap();
        assert_eq!(rep.text, ["[3] <= [2]+[1]: false"]);
    }

    #[test]
    fn calculus_lines() {
        assert_eq!(run(&["tensor", "[2]", "[2]", "--p", "3"]).unwrap().text, ["[2] (x) [2] = [3]+[1]"]);
        assert_eq!(run(&["perp", "[2]+[1]", "--p", "3"]).unwrap().text, ["perp([2]+[1]) = [2]+[1]"]);
        assert_eq!(run(&["power", "[3]", "--j", "2", "--p", "3"]).unwrap().text, ["([3])^2 = [2]+[1]"]);
    }

    #[test]
    fn point_evaluation() {
        let rep = run(&[
            "jt", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--point",
            "a=0,b=1,c=0,l0=1,l1=1",
        ])
        .unwrap();
        assert_eq!(rep.records[0].jt.as_deref(), Some("[3]+[1]"));
    }

    #[test]
    fn sampled_sweeps_need_a_seed() {
        let args = ["strata", "--p", "5", "--chart", "ga_r", "--r", "2", "--module", "Std(2)", "--budget", "10"];
        assert!(matches!(run(&args), Err(CliError::Usage(m)) if m.contains("--seed")));
        let mut with_seed = args.to_vec();
        with_seed.extend(["--seed", "3", "--samples", "20"]);
        let rep = run(&with_seed).unwrap();
        assert!(rep.records.iter().all(|r| r.seed == Some(3)));
        assert_eq!(rep.records[0].total, Some(20));
    }

    #[test]
    fn explicit_curve() {
        let rep = run(&[
            "semicont", "--p", "3", "--chart", "sl2_line", "--r", "2", "--module", "Std(2)*Tw(1,Std(2))", "--curve",
            "a=0,b=1,c=0,l0=t,l1=1",
        ])
        .unwrap();
        assert_eq!(rep.text, ["a=0, b=1, c=0, l0=t, l1=1: special 2[2] <= generic [3]+[1]: true"]);
        assert!(rep.violation.is_none());
    }
}
