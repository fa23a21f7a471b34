use rand::Rng;

use super::chart::{upper_name, Chart, ChartKind};
use crate::error::{Error, Result};
use crate::fields::{Fe, FiniteField, Matrix, RationalFunctionField, Ring, UniPoly, UniPolyRing};
use crate::jordan::{dominance_leq, JordanType};
use crate::modules::{validate_commuting_tuple, ModuleExpr, TupleCheck};
use crate::theta::{jt_at_point, CommutingTuple, Variant};

/// A one-parameter family `t -> chart point`, specialised at `t = 0`.
#[derive(Clone, Debug)]
pub struct Curve {
    chart: Chart,
    field: FiniteField,
    subs: Vec<UniPoly>,
}

impl Curve {
    /// Checks that the substituted constraints vanish in `GF(q)[t]` and that
    /// the substituted templates form a commuting p-nilpotent tuple there.
    pub fn new(chart: &Chart, field: &FiniteField, subs: Vec<UniPoly>) -> Result<Self> {
        if field.characteristic() != chart.p() {
            return Err(Error::CharacteristicMismatch(chart.p(), field.characteristic()));
        }
        if subs.len() != chart.nparams() {
            return Err(Error::DimensionMismatch(format!(
                "{} substitutions for {} parameters",
                subs.len(),
                chart.nparams()
            )));
        }
        let pr = UniPolyRing::new(field.clone(), "t");
        for c in chart.constraints() {
            let v = chart.ring().eval_in(c, &pr, &subs)?;
            if !v.is_zero() {
                return Err(Error::CurveConstraint(format!(
                    "{} becomes {}",
                    chart.ring().display(c),
                    pr.display(&v)
                )));
            }
        }
        let mats = chart.eval_templates(&pr, &subs)?;
        if let TupleCheck::Violation(v) = validate_commuting_tuple(&pr, &mats) {
            return Err(Error::CurveConstraint(v.to_string()));
        }
        Ok(Curve {
            chart: chart.clone(),
            field: field.clone(),
            subs,
        })
    }

    /// A seeded random curve through the chart. Built-in charts use
    /// parametrisations that satisfy their constraints identically; custom
    /// charts are supported only without constraints.
    pub fn random<G: Rng + ?Sized>(chart: &Chart, field: &FiniteField, rng: &mut G) -> Result<Self> {
        let pr = UniPolyRing::new(field.clone(), "t");
        let mut poly = |deg: usize| UniPoly::from_coeffs((0..=deg).map(|_| field.random(rng)).collect());
        let subs = match chart.kind() {
            ChartKind::GaR | ChartKind::MultiGa => (0..chart.nparams()).map(|_| poly(2)).collect(),
            ChartKind::Custom if chart.constraints().is_empty() => (0..chart.nparams()).map(|_| poly(2)).collect(),
            ChartKind::Custom => {
                return Err(Error::InvalidArgument(format!(
                    "no random curves for constrained custom chart `{}`",
                    chart.name()
                )))
            }
            ChartKind::Sl2Line => {
                // (a, b, c) = w (uv, u^2, -v^2) lies on a^2 + bc = 0
                let (w, u, v) = (poly(1), poly(1), poly(1));
                let a = pr.mul(&w, &pr.mul(&u, &v));
                let b = pr.mul(&w, &pr.mul(&u, &u));
                let c = pr.neg(&pr.mul(&w, &pr.mul(&v, &v)));
                let mut subs = vec![a, b, c];
                subs.extend((0..chart.height()).map(|_| poly(2)));
                subs
            }
            ChartKind::UpperGl => {
                // polynomials in one strictly upper U commute
                let n = chart.size();
                let mut u = Matrix::zeros(&pr, n, n);
                for i in 0..n {
                    for j in i + 1..n {
                        u[(i, j)] = poly(1);
                    }
                }
                let mut subs = vec![pr.zero(); chart.nparams()];
                for k in 0..chart.height() {
                    let mut b = Matrix::zeros(&pr, n, n);
                    let mut power = u.clone();
                    for _ in 1..n.max(2) {
                        b = b.add(&pr, &power.scale_by(&pr, &poly(1)));
                        power = power.mul(&pr, &u);
                    }
                    for i in 0..n {
                        for j in i + 1..n {
                            let idx = chart.ring().index_of(&upper_name(k, i, j)).expect("upper chart parameter");
                            subs[idx] = b[(i, j)].clone();
                        }
                    }
                }
                subs
            }
        };
        Curve::new(chart, field, subs)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn substitutions(&self) -> &[UniPoly] {
        &self.subs
    }

    /// The chart point at `t = 0`.
    pub fn special_point(&self) -> Vec<Fe> {
        self.subs.iter().map(|f| f.coeff(0)).collect()
    }

    /// The tuple over `GF(q)(t)`.
    pub fn generic_tuple(&self) -> Result<(RationalFunctionField, CommutingTuple<crate::fields::RatFn>)> {
        let k = RationalFunctionField::new(self.field.clone(), "t");
        let vals: Vec<_> = self.subs.iter().map(|f| k.from_poly(f.clone())).collect();
        let mats = self.chart.eval_templates(&k, &vals)?;
        let tuple = CommutingTuple::new(&k, mats)?;
        Ok((k, tuple))
    }

    pub fn fmt_substitutions(&self) -> String {
        let pr = UniPolyRing::new(self.field.clone(), "t");
        let parts: Vec<String> = self
            .chart
            .params()
            .iter()
            .zip(&self.subs)
            .map(|(n, f)| format!("{n}={}", pr.display(f)))
            .collect();
        parts.join(", ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemicontinuityReport {
    pub generic: JordanType,
    pub special: JordanType,
    pub holds: bool,
}

/// Jordan type over `GF(q)(t)` against the type at `t = 0`.
pub fn semicontinuity_check(curve: &Curve, e: &ModuleExpr, variant: Variant) -> Result<SemicontinuityReport> {
    let (k, tuple) = curve.generic_tuple()?;
    let generic = jt_at_point(&k, e, &tuple, variant)?;
    let special_tuple = curve.chart.tuple_at(&curve.field, &curve.special_point())?;
    let special = jt_at_point(&curve.field, e, &special_tuple, variant)?;
    let holds = dominance_leq(&special, &generic)?;
    Ok(SemicontinuityReport { generic, special, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{builtin_chart, ChartParams, CHART_NAMES};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(p: u32, v: &[u32]) -> UniPoly {
        UniPoly::from_coeffs(v.iter().map(|&x| Fe(x % p)).collect())
    }

    #[test]
    fn worked_sl2_curve() {
        let chart = builtin_chart("sl2_line", ChartParams::new(3).r(2)).unwrap();
        let f = chart.field().clone();
        // B = E, (l0, l1) = (t, 1)
        let curve = Curve::new(&chart, &f, vec![c(3, &[]), c(3, &[1]), c(3, &[]), c(3, &[0, 1]), c(3, &[1])]).unwrap();
        let e = ModuleExpr::parse("Std(2)*Tw(1,Std(2))").unwrap();
        for v in [Variant::Full, Variant::Exp] {
            let rep = semicontinuity_check(&curve, &e, v).unwrap();
            assert_eq!(rep.generic.to_string(), "[3]+[1]");
            assert_eq!(rep.special.to_string(), "2[2]");
            assert!(rep.holds);
        }
    }

    #[test]
    fn degenerate_curves() {
        let chart = builtin_chart("ga_r", ChartParams::new(5).r(2)).unwrap();
        let f = chart.field().clone();
        let e = ModuleExpr::parse("Sym(2,Std(2))*Tw(1,Std(2))").unwrap();
        let constant = Curve::new(&chart, &f, vec![c(5, &[2]), c(5, &[3])]).unwrap();
        let rep = semicontinuity_check(&constant, &e, Variant::Full).unwrap();
        assert_eq!(rep.generic, rep.special);
        let into_zero = Curve::new(&chart, &f, vec![c(5, &[0, 1]), c(5, &[0, 0, 4])]).unwrap();
        let rep = semicontinuity_check(&into_zero, &e, Variant::Full).unwrap();
        assert_eq!(rep.special, JordanType::trivial(5, 6));
        assert!(rep.holds);
    }

    #[test]
    fn constraint_violations_are_rejected() {
        let chart = builtin_chart("sl2_line", ChartParams::new(3).r(1)).unwrap();
        let f = chart.field().clone();
        let bad = Curve::new(&chart, &f, vec![c(3, &[0, 1]), c(3, &[]), c(3, &[]), c(3, &[1])]);
        assert!(matches!(bad, Err(Error::CurveConstraint(_))));
    }

    #[test]
    fn random_curves_satisfy_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = ModuleExpr::parse("Std(2)*Std(2)").unwrap();
        for name in CHART_NAMES {
            let chart = builtin_chart(name, ChartParams::new(3).r(2).n(2).s(1)).unwrap();
            let f = chart.field().clone();
            for _ in 0..5 {
                let curve = Curve::random(&chart, &f, &mut rng).unwrap();
                if chart.size() == 2 {
                    assert!(semicontinuity_check(&curve, &e, Variant::Full).unwrap().holds);
                }
            }
        }
        let chart = builtin_chart("upper_glN", ChartParams::new(5).r(2).n(3)).unwrap();
        let curve = Curve::random(&chart, chart.field(), &mut rng).unwrap();
        assert_eq!(curve.substitutions().len(), 6);
    }
}
