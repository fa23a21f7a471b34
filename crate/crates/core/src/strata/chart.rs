use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{Fe, FiniteField, Matrix, PolyRing, Polynomial, Ring};
use crate::theta::CommutingTuple;

/// Which construction produced a chart. Random curves depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    GaR,
    MultiGa,
    Sl2Line,
    UpperGl,
    Custom,
}

/// Size parameters for [`builtin_chart`]. Each chart reads the fields it
/// needs: `r` (height), `n` (matrix size for `upper_glN`), `s` (number of
/// additive factors for `multi_ga`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartParams {
    pub p: u32,
    pub r: usize,
    pub n: usize,
    pub s: usize,
}

impl ChartParams {
    pub fn new(p: u32) -> Self {
        ChartParams { p, r: 1, n: 2, s: 1 }
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn s(mut self, s: usize) -> Self {
        self.s = s;
        self
    }
}

/// A polynomial family of commuting tuples: templates `B_0, ..., B_{r-1}`
/// over a weighted polynomial ring, cut out by constraint polynomials.
#[derive(Clone, Debug)]
pub struct Chart {
    name: String,
    kind: ChartKind,
    ring: PolyRing,
    templates: Vec<Matrix<Polynomial>>,
    constraints: Vec<Polynomial>,
}

pub const CHART_NAMES: [&str; 4] = ["ga_r", "multi_ga", "sl2_line", "upper_glN"];

pub fn builtin_chart(name: &str, params: ChartParams) -> Result<Chart> {
    let ChartParams { p, r, n, s } = params;
    let field = FiniteField::prime(p)?;
    let weight = |s: usize| -> Result<u32> {
        p.checked_pow(s as u32)
            .ok_or_else(|| Error::OutOfRange(format!("weight {p}^{s} overflows")))
    };
    if r == 0 {
        return Err(Error::InvalidArgument("chart height r must be positive".into()));
    }
    match name {
        "ga_r" => {
            let vars = (0..r)
                .map(|i| Ok((format!("a{i}"), weight(i)?)))
                .collect::<Result<Vec<_>>>()?;
            let ring = PolyRing::with_weights(field, &vars)?;
            let templates = (0..r).map(|i| e_times(&ring, ring.variable(i))).collect();
            Chart::from_parts("ga_r", ChartKind::GaR, ring, templates, vec![])
        }
        "multi_ga" => {
            if s == 0 {
                return Err(Error::InvalidArgument("multi_ga needs s >= 1".into()));
            }
            let vars: Vec<(String, u32)> = (0..s).map(|i| (format!("a{i}"), 1)).collect();
            let ring = PolyRing::with_weights(field, &vars)?;
            let blocks: Vec<_> = (0..s).map(|i| e_times(&ring, ring.variable(i))).collect();
            let b0 = Matrix::block_diag(&ring, &blocks);
            Chart::from_parts("multi_ga", ChartKind::MultiGa, ring, vec![b0], vec![])
        }
        "sl2_line" => {
            if p < 3 {
                return Err(Error::InvalidArgument("sl2_line requires p >= 3".into()));
            }
            let mut vars: Vec<(String, u32)> = ["a", "b", "c"].iter().map(|v| (v.to_string(), 1)).collect();
            for i in 0..r {
                vars.push((format!("l{i}"), weight(i)?));
            }
            let ring = PolyRing::with_weights(field, &vars)?;
            let (a, b, c) = (ring.variable(0), ring.variable(1), ring.variable(2));
            let base = Matrix::from_vec(2, 2, vec![a.clone(), b.clone(), c.clone(), ring.neg(&a)]);
            let templates = (0..r).map(|i| base.scale_by(&ring, &ring.variable(3 + i))).collect();
            let cone = ring.add(&ring.mul(&a, &a), &ring.mul(&b, &c));
            Chart::from_parts("sl2_line", ChartKind::Sl2Line, ring, templates, vec![cone])
        }
        "upper_glN" => {
            if n == 0 || n as u32 > p {
                return Err(Error::InvalidArgument(format!(
                    "upper_glN needs 1 <= N <= p, got N = {n}, p = {p}"
                )));
            }
            let mut vars = Vec::new();
            for k in 0..r {
                for i in 0..n {
                    for j in i + 1..n {
                        vars.push((upper_name(k, i, j), weight(k)?));
                    }
                }
            }
            let ring = PolyRing::with_weights(field, &vars)?;
            let mut idx = 0;
            let mut templates = Vec::new();
            for _ in 0..r {
                let mut m = Matrix::zeros(&ring, n, n);
                for i in 0..n {
                    for j in i + 1..n {
                        m[(i, j)] = ring.variable(idx);
                        idx += 1;
                    }
                }
                templates.push(m);
            }
            let mut constraints = Vec::new();
            for x in 0..r {
                for y in x + 1..r {
                    let c = templates[x].commutator(&ring, &templates[y]);
                    for f in c.entries() {
                        if !f.is_zero() && !constraints.contains(f) {
                            constraints.push(f.clone());
                        }
                    }
                }
            }
            Chart::from_parts("upper_glN", ChartKind::UpperGl, ring, templates, constraints)
        }
        other => Err(Error::UnknownChart(other.to_string())),
    }
}

/// Parameter name of the `(i, j)` entry of `B_k` in `upper_glN`.
pub fn upper_name(k: usize, i: usize, j: usize) -> String {
    format!("x{k}_{}_{}", i + 1, j + 1)
}

fn e_times(ring: &PolyRing, a: Polynomial) -> Matrix<Polynomial> {
    let mut m = Matrix::zeros(ring, 2, 2);
    m[(0, 1)] = a;
    m
}

impl Chart {
    fn from_parts(
        name: &str,
        kind: ChartKind,
        ring: PolyRing,
        templates: Vec<Matrix<Polynomial>>,
        constraints: Vec<Polynomial>,
    ) -> Result<Self> {
        if templates.is_empty() {
            return Err(Error::InvalidChart("no templates".into()));
        }
        let n = templates[0].rows();
        if templates.iter().any(|t| t.rows() != n || t.cols() != n) {
            return Err(Error::InvalidChart("templates must be square of one size".into()));
        }
        Ok(Chart {
            name: name.to_string(),
            kind,
            ring,
            templates,
            constraints,
        })
    }

    /// Custom chart from its parts.
    pub fn new(
        name: &str,
        ring: PolyRing,
        templates: Vec<Matrix<Polynomial>>,
        constraints: Vec<Polynomial>,
    ) -> Result<Self> {
        Self::from_parts(name, ChartKind::Custom, ring, templates, constraints)
    }

    /// Loads the plain-text chart format:
    ///
    /// ```text
    /// name = cone
    /// field = GF(3)
    /// r = 2
    /// N = 2
    /// params = a:1, b:1, c:1, l0:1, l1:3
    /// template 0
    /// l0*a, l0*b
    /// l0*c, -l0*a
    /// template 1
    /// l1*a, l1*b
    /// l1*c, -l1*a
    /// constraint = a^2 + b*c
    /// ```
    pub fn from_config(text: &str) -> Result<Self> {
        let mut name = "custom".to_string();
        let mut field = None;
        let mut r = None;
        let mut n = None;
        let mut ring: Option<PolyRing> = None;
        let mut templates: Vec<Option<Matrix<Polynomial>>> = Vec::new();
        let mut constraints = Vec::new();
        let mut pending: Option<(usize, Vec<Vec<Polynomial>>)> = None;

        let need_ring = |ring: &Option<PolyRing>, line: usize| -> Result<PolyRing> {
            ring.clone()
                .ok_or_else(|| Error::parse(line, 1, "`params` must precede templates and constraints"))
        };

        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            if let Some((s, rows)) = pending.as_mut() {
                let n = n.unwrap();
                let ring = need_ring(&ring, line)?;
                let row = body
                    .split(',')
                    .map(|x| ring.parse_at(x.trim(), line, 0))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != n {
                    return Err(Error::parse(line, 1, format!("expected {n} entries, found {}", row.len())));
                }
                rows.push(row);
                if rows.len() == n {
                    let (s, rows) = (*s, std::mem::take(rows));
                    templates[s] = Some(Matrix::from_rows(rows)?);
                    pending = None;
                }
                continue;
            }
            if let Some(rest) = body.strip_prefix("template") {
                let s: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, 10, "expected `template <index>`"))?;
                let (rr, _) = match (r, n) {
                    (Some(r), Some(n)) => (r, n),
                    _ => return Err(Error::parse(line, 1, "`r` and `N` must precede templates")),
                };
                if s >= rr {
                    return Err(Error::parse(line, 10, format!("template index {s} >= r = {rr}")));
                }
                if templates[s].is_some() {
                    return Err(Error::parse(line, 1, format!("template {s} given twice")));
                }
                pending = Some((s, Vec::new()));
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, 1, format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let vcol = raw.find('=').unwrap_or(0) + 2;
            match key {
                "name" => name = value.to_string(),
                "field" => field = Some(FiniteField::parse(value).map_err(|e| relocate(e, line, vcol))?),
                "r" | "N" => {
                    let v: usize = value
                        .parse()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| Error::parse(line, vcol, format!("`{key}` must be a positive integer")))?;
                    if key == "r" {
                        r = Some(v);
                        templates = vec![None; v];
                    } else {
                        n = Some(v);
                    }
                }
                "params" => {
                    let f = field
                        .clone()
                        .ok_or_else(|| Error::parse(line, 1, "`field` must precede `params`"))?;
                    let desc = format!("{}[{}]", f.descriptor(), value);
                    ring = Some(PolyRing::parse_descriptor(&desc).map_err(|e| relocate(e, line, vcol))?);
                }
                "constraint" => {
                    let ring = need_ring(&ring, line)?;
                    constraints.push(ring.parse_at(value, line, vcol - 1)?);
                }
                other => return Err(Error::parse(line, 1, format!("unknown key `{other}`"))),
            }
        }
        if pending.is_some() {
            return Err(Error::parse(text.lines().count(), 1, "incomplete template"));
        }
        let ring = ring.ok_or_else(|| Error::InvalidChart("missing `params`".into()))?;
        let r = r.ok_or_else(|| Error::InvalidChart("missing `r`".into()))?;
        let templates = templates
            .into_iter()
            .enumerate()
            .map(|(s, t)| t.ok_or_else(|| Error::InvalidChart(format!("missing template {s}"))))
            .collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(templates.len(), r);
        Self::new(&name, ring, templates, constraints)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_config(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn field(&self) -> &FiniteField {
        self.ring.field()
    }

    pub fn p(&self) -> u32 {
        self.ring.field().characteristic()
    }

    pub fn height(&self) -> usize {
        self.templates.len()
    }

    pub fn size(&self) -> usize {
        self.templates[0].rows()
    }

    pub fn nparams(&self) -> usize {
        self.ring.nvars()
    }

    pub fn params(&self) -> &[String] {
        self.ring.names()
    }

    pub fn weights(&self) -> &[u32] {
        self.ring.weights()
    }

    pub fn templates(&self) -> &[Matrix<Polynomial>] {
        &self.templates
    }

    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    /// The templates as a tuple over the coordinate ring. Valid only modulo
    /// the constraints.
    pub fn symbolic_tuple(&self) -> CommutingTuple<Polynomial> {
        CommutingTuple::unchecked(self.templates.clone())
    }

    pub fn satisfies(&self, field: &FiniteField, point: &[Fe]) -> Result<bool> {
        for c in &self.constraints {
            if !self.ring.evaluate(c, point, field)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Templates evaluated at `point`, without constraint or tuple checks.
    pub fn eval_templates<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> Result<Vec<Matrix<R::Elem>>> {
        self.templates
            .iter()
            .map(|t| t.try_map(|f| self.ring.eval_in(f, ring, point)))
            .collect()
    }

    /// The tuple at an admissible point. A point satisfying the constraints
    /// whose tuple is not commuting p-nilpotent means the chart is wrong.
    pub fn tuple_at(&self, field: &FiniteField, point: &[Fe]) -> Result<CommutingTuple<Fe>> {
        if !self.satisfies(field, point)? {
            return Err(Error::InvalidArgument(format!(
                "point {} violates the constraints of chart `{}`",
                self.fmt_point(field, point),
                self.name
            )));
        }
        let mats = self.eval_templates(field, point)?;
        CommutingTuple::new(field, mats).map_err(|e| {
            Error::InvalidChart(format!(
                "chart `{}` at {}: {e}",
                self.name,
                self.fmt_point(field, point)
            ))
        })
    }

    pub fn fmt_point(&self, field: &FiniteField, point: &[Fe]) -> String {
        let parts: Vec<String> = self
            .ring
            .names()
            .iter()
            .zip(point)
            .map(|(n, &x)| format!("{n}={}", field.fmt_fe(x)))
            .collect();
        format!("({})", parts.join(", "))
    }

    /// Parses `a=1,b=g+1,...` or a bare comma-separated coordinate list.
    pub fn parse_point(&self, field: &FiniteField, s: &str) -> Result<Vec<Fe>> {
        let items: Vec<&str> = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .collect();
        let named = items.iter().any(|x| x.contains('='));
        let mut out = vec![None; self.nparams()];
        for (i, item) in items.iter().enumerate() {
            let (idx, val) = if named {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("mixed named and positional coordinates in `{s}`")))?;
                let idx = self
                    .ring
                    .index_of(k.trim())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter `{}`", k.trim())))?;
                (idx, v.trim())
            } else {
                (i, *item)
            };
            if idx >= out.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} coordinates for {} parameters",
                    items.len(),
                    self.nparams()
                )));
            }
            out[idx] = Some(field.parse_element(val)?);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, x)| {
                x.ok_or_else(|| Error::InvalidArgument(format!("missing coordinate `{}`", self.ring.names()[i])))
            })
            .collect()
    }
}

fn relocate(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { message, .. } => Error::parse(line, col, message),
        other => Error::parse(line, col, other.to_string()),
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} over {}: r={}, N={}, {} constraint(s)",
            self.name,
            self.ring.descriptor(),
            self.height(),
            self.size(),
            self.constraints.len()
        )
    }
}
