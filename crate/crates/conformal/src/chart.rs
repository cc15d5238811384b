//! Coordinate charts carrying a Riemannian metric with exact partials.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{norm_squared, Jet, JetFn};

const POLY_FIXTURE: &str = include_str!("../../../fixtures/poly_metric.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn cube(n: usize, r: f64) -> Self {
        BoxDomain { lo: vec![-r; n], hi: vec![r; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    /// Uniform points in the box shrunk about its center by `shrink`.
    pub fn sample(&self, count: usize, seed: u64, shrink: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = self.center();
        (0..count)
            .map(|_| {
                (0..self.dim())
                    .map(|i| {
                        let half = 0.5 * (self.hi[i] - self.lo[i]) * shrink;
                        c[i] + rng.gen_range(-half..=half)
                    })
                    .collect()
            })
            .collect()
    }

    fn corners_and_center(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut pts = vec![self.center()];
        if n <= 6 {
            for mask in 0..(1usize << n) {
                pts.push((0..n).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }).collect());
            }
        }
        pts
    }
}

/// A metric evaluator on a box in ℝⁿ.
///
/// `metric_jets` returns the n×n matrix g_{ab} row-major as jets of the
/// requested order (at most 3). Implementations must be thread safe.
pub trait MetricChart: Send + Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> &BoxDomain;
    /// Name of the scale the metric represents.
    fn scale(&self) -> &str;
    fn metric_jets(&self, x: &[f64], order: u8) -> Vec<Jet>;
}

pub type ChartRef = Arc<dyn MetricChart>;

type MetricFn = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;

/// A chart given by a closed-form metric expression.
#[derive(Clone)]
pub struct ExprChart {
    n: usize,
    domain: BoxDomain,
    scale: String,
    g: MetricFn,
}

impl ExprChart {
    pub fn new(
        n: usize,
        domain: BoxDomain,
        scale: impl Into<String>,
        g: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        if domain.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: domain.dim() });
        }
        Ok(ExprChart { n, domain, scale: scale.into(), g: Arc::new(g) })
    }

    pub fn with_domain(mut self, domain: BoxDomain) -> Result<Self> {
        if domain.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: domain.dim() });
        }
        self.domain = domain;
        Ok(self)
    }

    /// Euclidean ℝⁿ on [−1, 1]ⁿ.
    pub fn flat(n: usize) -> Result<Self> {
        ExprChart::new(n, BoxDomain::cube(n, 1.0), "flat", move |x| {
            let (n, o) = (x.len(), x[0].order());
            let mut g = vec![Jet::constant(n, o, 0.0); n * n];
            for i in 0..n {
                g[i * n + i] = Jet::constant(n, o, 1.0);
            }
            g
        })
    }

    /// Unit round sphere in stereographic coordinates, g = 4(1 + |x|²)⁻² δ.
    pub fn sphere(n: usize) -> Result<Self> {
        ExprChart::new(n, BoxDomain::cube(n, 2.0), "sphere", move |x| {
            let (n, o) = (x.len(), x[0].order());
            let f = norm_squared(x).add_const(1.0).powf(-2.0).scale(4.0);
            let mut g = vec![Jet::constant(n, o, 0.0); n * n];
            for i in 0..n {
                g[i * n + i] = f.clone();
            }
            g
        })
    }

    /// δ plus a symmetric polynomial perturbation.
    pub fn poly(n: usize, domain: BoxDomain, terms: Vec<PolyTerm>) -> Result<Self> {
        for t in &terms {
            if t.i >= n || t.j >= n || t.powers.len() != n {
                return Err(Error::InvalidChart(format!("polynomial term {t:?} does not fit dimension {n}")));
            }
        }
        let max_pow = terms.iter().flat_map(|t| t.powers.iter().copied()).max().unwrap_or(0);
        ExprChart::new(n, domain, "poly", move |x| {
            let (n, o) = (x.len(), x[0].order());
            let mut pows: Vec<Vec<Jet>> = Vec::with_capacity(n);
            for xi in x {
                let mut p = vec![Jet::constant(n, o, 1.0)];
                for k in 1..=max_pow as usize {
                    p.push(p[k - 1].mul(xi));
                }
                pows.push(p);
            }
            let mut g = vec![Jet::constant(n, o, 0.0); n * n];
            for i in 0..n {
                g[i * n + i] = Jet::constant(n, o, 1.0);
            }
            for t in &terms {
                let mut m = Jet::constant(n, o, t.coef);
                for (v, &p) in t.powers.iter().enumerate() {
                    if p > 0 {
                        m = m.mul(&pows[v][p as usize]);
                    }
                }
                g[t.i * n + t.j] = g[t.i * n + t.j].add(&m);
                if t.i != t.j {
                    g[t.j * n + t.i] = g[t.j * n + t.i].add(&m);
                }
            }
            g
        })
    }

    /// The frozen polynomial test metric in dimension n (3, 4 or 5).
    pub fn frozen_poly(n: usize) -> Result<Self> {
        let spec = frozen_poly_spec(n)?;
        spec.build_expr()
    }
}

impl MetricChart for ExprChart {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn scale(&self) -> &str {
        &self.scale
    }

    fn metric_jets(&self, x: &[f64], order: u8) -> Vec<Jet> {
        (self.g)(&Jet::variables(x, order))
    }
}

/// Ω > 0 as an analytic expression.
#[derive(Clone, Debug)]
pub struct ConformalFactor {
    pub name: String,
    pub omega: JetFn,
}

impl ConformalFactor {
    pub fn new(name: impl Into<String>, omega: JetFn) -> Self {
        ConformalFactor { name: name.into(), omega }
    }

    pub fn one() -> Self {
        ConformalFactor::new("one", JetFn::constant(1.0))
    }

    /// Ω = 2 / (1 + |x|²), taking flat ℝⁿ to the round sphere.
    pub fn inverse_stereographic() -> Self {
        ConformalFactor::new(
            "inverse-stereographic",
            JetFn::new(|x| norm_squared(x).add_const(1.0).recip().scale(2.0)),
        )
    }

    pub fn jet(&self, x: &[f64], order: u8) -> Jet {
        self.omega.eval(x, order)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.omega.value(x)
    }

    /// Ω^p as an expression.
    pub fn power(&self, p: f64) -> JetFn {
        let om = self.omega.clone();
        JetFn::new(move |x| om.apply(x).powf(p))
    }

    fn check_positive(&self, domain: &BoxDomain) -> Result<()> {
        let mut pts = domain.corners_and_center();
        pts.extend(domain.sample(64, 0x5eed, 1.0));
        for p in pts {
            let v = self.value(&p);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveFactor { point: p, value: v });
            }
        }
        Ok(())
    }
}

/// Υ_a = Ω⁻¹ ∂_a Ω at x.
pub fn upsilon(omega: &ConformalFactor, x: &[f64]) -> Vec<f64> {
    let j = omega.jet(x, 1);
    j.gradient().iter().map(|d| d / j.value()).collect()
}

/// The metric Ω² g.
#[derive(Clone)]
pub struct RescaledChart {
    base: ChartRef,
    omega: ConformalFactor,
    scale: String,
}

impl RescaledChart {
    pub fn base(&self) -> &ChartRef {
        &self.base
    }

    pub fn factor(&self) -> &ConformalFactor {
        &self.omega
    }
}

impl MetricChart for RescaledChart {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn domain(&self) -> &BoxDomain {
        self.base.domain()
    }

    fn scale(&self) -> &str {
        &self.scale
    }

    fn metric_jets(&self, x: &[f64], order: u8) -> Vec<Jet> {
        let om = self.omega.jet(x, order);
        let om2 = om.mul(&om);
        self.base.metric_jets(x, order).iter().map(|g| g.mul(&om2)).collect()
    }
}

/// ĝ = Ω² g, after checking Ω at the domain corners and random points.
pub fn rescale(chart: ChartRef, omega: &ConformalFactor) -> Result<RescaledChart> {
    omega.check_positive(chart.domain())?;
    let scale = format!("{}*{}^2", chart.scale(), omega.name);
    Ok(RescaledChart { base: chart, omega: omega.clone(), scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Flat,
    Sphere,
    Poly,
}

impl std::str::FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(ChartKind::Flat),
            "sphere" => Ok(ChartKind::Sphere),
            "poly" => Ok(ChartKind::Poly),
            other => Err(Error::InvalidChart(format!("unknown chart kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub i: usize,
    pub j: usize,
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// JSON chart specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart: ChartKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoxDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_coeffs: Option<Vec<PolyTerm>>,
}

#[derive(Deserialize)]
struct PolyFixture {
    charts: Vec<ChartSpec>,
}

/// The frozen polynomial chart spec for dimension n.
pub fn frozen_poly_spec(n: usize) -> Result<ChartSpec> {
    frozen_poly_from_str(POLY_FIXTURE, n)
}

/// Look up dimension n in a polynomial fixture document.
pub fn frozen_poly_from_str(text: &str, n: usize) -> Result<ChartSpec> {
    let fx: PolyFixture = serde_json::from_str(text).map_err(|e| Error::InvalidChart(e.to_string()))?;
    fx.charts
        .into_iter()
        .find(|c| c.n == n)
        .ok_or_else(|| Error::InvalidChart(format!("no frozen polynomial metric for n = {n}")))
}

/// The embedded polynomial fixture text.
pub fn frozen_poly_fixture() -> &'static str {
    POLY_FIXTURE
}

impl ChartSpec {
    pub fn new(chart: ChartKind, n: usize) -> Self {
        ChartSpec { chart, n, domain: None, poly_coeffs: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidChart(e.to_string()))
    }

    fn build_expr(&self) -> Result<ExprChart> {
        let mut c = match self.chart {
            ChartKind::Flat => ExprChart::flat(self.n)?,
            ChartKind::Sphere => ExprChart::sphere(self.n)?,
            ChartKind::Poly => match &self.poly_coeffs {
                Some(terms) => {
                    let dom = self.domain.clone().unwrap_or_else(|| BoxDomain::cube(self.n, 0.5));
                    ExprChart::poly(self.n, dom, terms.clone())?
                }
                None => {
                    let mut frozen = frozen_poly_spec(self.n)?;
                    frozen.domain = self.domain.clone().or(frozen.domain);
                    return frozen.build_expr();
                }
            },
        };
        if let Some(d) = &self.domain {
            c = c.with_domain(d.clone())?;
        }
        Ok(c)
    }

    pub fn build(&self) -> Result<ChartRef> {
        Ok(Arc::new(self.build_expr()?))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartValidation {
    pub points: usize,
    pub max_asymmetry: f64,
    pub min_pivot: f64,
    pub max_fd_error: f64,
}

impl ChartValidation {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_asymmetry <= tol && self.min_pivot > 0.0 && self.max_fd_error <= tol
    }
}

/// Smallest pivot of a symmetric-pivoted LDLᵀ; positive iff g is positive definite.
pub fn min_ldl_pivot(g: &[f64], n: usize) -> f64 {
    let mut a = g.to_vec();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut min = f64::INFINITY;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[idx[i] * n + idx[i]].total_cmp(&a[idx[j] * n + idx[j]])).unwrap();
        idx.swap(k, p);
        let pk = idx[k];
        let d = a[pk * n + pk];
        min = min.min(d);
        if d <= 0.0 {
            return d;
        }
        for i in k + 1..n {
            let ri = idx[i];
            let l = a[ri * n + pk] / d;
            for j in k + 1..n {
                let cj = idx[j];
                a[ri * n + cj] -= l * a[pk * n + cj];
            }
        }
    }
    min
}

/// Symmetry, positive definiteness and finite-difference agreement of the
/// supplied partials at `points` sample points.
pub fn validate_chart(chart: &dyn MetricChart, points: usize, seed: u64) -> ChartValidation {
    let n = chart.dim();
    let h = 1e-4;
    let mut out = ChartValidation { points, max_asymmetry: 0.0, min_pivot: f64::INFINITY, max_fd_error: 0.0 };
    for x in chart.domain().sample(points, seed, 0.9) {
        let g = chart.metric_jets(&x, 3);
        let vals: Vec<f64> = g.iter().map(Jet::value).collect();
        for i in 0..n {
            for j in 0..n {
                out.max_asymmetry = out.max_asymmetry.max((vals[i * n + j] - vals[j * n + i]).abs());
            }
        }
        out.min_pivot = out.min_pivot.min(min_ldl_pivot(&vals, n));
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let gp = chart.metric_jets(&xp, 2);
            let gm = chart.metric_jets(&xm, 2);
            for e in 0..n * n {
                let fd1 = (gp[e].value() - gm[e].value()) / (2.0 * h);
                let mut err = (fd1 - g[e].d1(k)).abs();
                for i in 0..n {
                    let fd2 = (gp[e].d1(i) - gm[e].d1(i)) / (2.0 * h);
                    err = err.max((fd2 - g[e].d2(k, i)).abs());
                    for j in 0..n {
                        let fd3 = (gp[e].d2(i, j) - gm[e].d2(i, j)) / (2.0 * h);
                        err = err.max((fd3 - g[e].d3(k, i, j)).abs());
                    }
                }
                out.max_fd_error = out.max_fd_error.max(err);
            }
        }
    }
    out
}
