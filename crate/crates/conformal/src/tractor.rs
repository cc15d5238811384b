//! Standard tractors in a chosen scale: the connection, parallel transport,
//! loop holonomy and recovery of Einstein scales from parallel tractors.
//!
//! A tractor is stored as (σ, μ_a, ρ) in the scale of the chart; the
//! transport state vector is laid out as [σ, μ_0, …, μ_{n−1}, ρ].

use std::ops::{Add, Mul, Sub};

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chart::MetricChart;
use crate::density::{geometry_for, prolong_jets, DensityField};
use crate::error::{Error, Result};
use crate::geometry::check_point;
use crate::jet::{Jet, JetFn};
use crate::report::{Residual, ResidualAcc};

mod weight_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&w.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TractorVec {
    pub sigma: f64,
    pub mu: Vec<f64>,
    pub rho: f64,
    pub scale: String,
    /// Weight of the tractor bundle the value lives in (0 for plain tractors).
    #[serde(with = "weight_str")]
    pub weight: Rational64,
}

impl TractorVec {
    pub fn new(sigma: f64, mu: Vec<f64>, rho: f64, scale: impl Into<String>) -> Self {
        TractorVec { sigma, mu, rho, scale: scale.into(), weight: Rational64::zero() }
    }

    pub fn zero(n: usize, scale: impl Into<String>) -> Self {
        TractorVec::new(0.0, vec![0.0; n], 0.0, scale)
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn components(&self) -> usize {
        self.mu.len() + 2
    }

    pub fn to_state(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.components());
        v.push(self.sigma);
        v.extend_from_slice(&self.mu);
        v.push(self.rho);
        v
    }

    pub fn from_state(v: &[f64], scale: impl Into<String>) -> Self {
        let n = v.len() - 2;
        TractorVec::new(v[0], v[1..=n].to_vec(), v[n + 1], scale)
    }

    /// 2σρ + g^{ab}μ_aμ_b with g⁻¹ row-major.
    pub fn metric(&self, ginv: &[f64]) -> f64 {
        let n = self.n();
        let mut m = 2.0 * self.sigma * self.rho;
        for a in 0..n {
            for b in 0..n {
                m += ginv[a * n + b] * self.mu[a] * self.mu[b];
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &TractorVec) -> f64 {
        self.to_state().iter().zip(other.to_state()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_state().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// ∇_ξ of a standard tractor in a scale, from the covariant derivatives of its slots:
///
/// (ξ^a∇_aσ − ξ^aμ_a, ξ^a∇_aμ_b + ξ_bρ + ξ^aP_{ab}σ, ξ^a∇_aρ − ξ^aP_{ab}g^{bc}μ_c).
///
/// `nabla` holds (ξ^a∇_aσ, ξ^a∇_aμ_b, ξ^a∇_aρ). Generic so that it runs on exact scalars.
pub fn standard_tractor_connection<T>(
    xi: &[T],
    g: &[Vec<T>],
    ginv: &[Vec<T>],
    p: &[Vec<T>],
    v: (&T, &[T], &T),
    nabla: (&T, &[T], &T),
) -> (T, Vec<T>, T)
where
    T: Clone + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let n = xi.len();
    let (sigma, mu, rho) = v;
    let contract = |row: &dyn Fn(usize) -> T| (0..n).fold(T::zero(), |acc, a| acc + xi[a].clone() * row(a));
    let xi_mu = contract(&|a| mu[a].clone());
    let top = nabla.0.clone() - xi_mu;
    let mid = (0..n)
        .map(|b| {
            let xi_b = contract(&|a| g[a][b].clone());
            let p_xb = contract(&|a| p[a][b].clone());
            nabla.1[b].clone() + xi_b * rho.clone() + p_xb * sigma.clone()
        })
        .collect();
    let mut pmu = T::zero();
    for b in 0..n {
        let p_xb = contract(&|a| p[a][b].clone());
        for c in 0..n {
            pmu = pmu + p_xb.clone() * ginv[b][c].clone() * mu[c].clone();
        }
    }
    let bot = nabla.2.clone() - pmu;
    (top, mid, bot)
}

/// A tractor field whose slots can be evaluated as jets.
pub trait TractorField {
    fn scale(&self) -> &str;
    fn jets(&self, x: &[f64], order: u8) -> Result<(Jet, Vec<Jet>, Jet)>;
}

/// Slots given by explicit expressions.
#[derive(Clone, Debug)]
pub struct ExprTractorField {
    pub sigma: JetFn,
    pub mu: Vec<JetFn>,
    pub rho: JetFn,
    pub scale: String,
}

impl ExprTractorField {
    /// The flat-model parallel field through v0 at x0:
    /// (σ⁰ + μ⁰·Δx − ½ρ⁰|Δx|², μ⁰ − ρ⁰Δx, ρ⁰).
    pub fn flat_parallel(x0: &[f64], v0: &TractorVec) -> Self {
        let n = x0.len();
        let (x0s, mu0, s0, r0) = (x0.to_vec(), v0.mu.clone(), v0.sigma, v0.rho);
        let sigma = {
            let (x0s, mu0) = (x0s.clone(), mu0.clone());
            JetFn::new(move |x| {
                let mut acc = Jet::constant(n, x[0].order(), s0);
                for i in 0..n {
                    let d = x[i].add_const(-x0s[i]);
                    acc = acc.add(&d.scale(mu0[i])).sub(&d.mul(&d).scale(0.5 * r0));
                }
                acc
            })
        };
        let mu = (0..n)
            .map(|i| {
                let (x0i, m) = (x0s[i], mu0[i]);
                JetFn::new(move |x| x[i].add_const(-x0i).scale(-r0).add_const(m))
            })
            .collect();
        ExprTractorField { sigma, mu, rho: JetFn::constant(r0), scale: v0.scale.clone() }
    }
}

impl TractorField for ExprTractorField {
    fn scale(&self) -> &str {
        &self.scale
    }

    fn jets(&self, x: &[f64], order: u8) -> Result<(Jet, Vec<Jet>, Jet)> {
        let vars = Jet::variables(x, order);
        Ok((self.sigma.apply(&vars), self.mu.iter().map(|m| m.apply(&vars)).collect(), self.rho.apply(&vars)))
    }
}

/// The prolongation of a weight-one density, as a tractor field.
pub struct ProlongedField<'a> {
    pub chart: &'a dyn MetricChart,
    pub sigma: DensityField,
}

impl TractorField for ProlongedField<'_> {
    fn scale(&self) -> &str {
        &self.sigma.scale
    }

    fn jets(&self, x: &[f64], order: u8) -> Result<(Jet, Vec<Jet>, Jet)> {
        prolong_jets(self.chart, &self.sigma, x, order)
    }
}

/// ∇_ξ of a tractor field at x.
pub fn tractor_connection_along(chart: &dyn MetricChart, field: &dyn TractorField, xi: &[f64], x: &[f64]) -> Result<TractorVec> {
    if field.scale() != chart.scale() {
        return Err(Error::Invalid(format!("tractor field in scale {:?}, chart in {:?}", field.scale(), chart.scale())));
    }
    let geo = geometry_for(chart, x, 2)?;
    let n = geo.n;
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
    }
    let (s, mu, r) = field.jets(x, 1)?;
    let dir = |j: &Jet| (0..n).map(|a| xi[a] * j.d1(a)).sum::<f64>();
    let mut dmu = Vec::with_capacity(n);
    for b in 0..n {
        let mut v = dir(&mu[b]);
        for a in 0..n {
            for c in 0..n {
                v -= xi[a] * geo.gamma(c, a, b).value() * mu[c].value();
            }
        }
        dmu.push(v);
    }
    let mat = |js: &[Jet]| (0..n).map(|a| (0..n).map(|b| js[a * n + b].value()).collect()).collect::<Vec<Vec<f64>>>();
    let (g, ginv, p) = (mat(&geo.g), mat(&geo.ginv), mat(&geo.schouten));
    let mu_v: Vec<f64> = mu.iter().map(Jet::value).collect();
    let (top, mid, bot) =
        standard_tractor_connection(xi, &g, &ginv, &p, (&s.value(), &mu_v, &r.value()), (&dir(&s), &dmu, &dir(&r)));
    Ok(TractorVec::new(top, mid, bot, chart.scale()))
}

/// ∇_a of a tractor field at x, along coordinate direction a.
pub fn tractor_connection_apply(chart: &dyn MetricChart, field: &dyn TractorField, a: usize, x: &[f64]) -> Result<TractorVec> {
    let n = chart.dim();
    if a >= n {
        return Err(Error::Invalid(format!("direction {a} out of range for dimension {n}")));
    }
    let mut xi = vec![0.0; n];
    xi[a] = 1.0;
    tractor_connection_along(chart, field, &xi, x)
}

/// A path c: [0, 1] → ℝⁿ.
pub trait Curve {
    fn point(&self, t: f64) -> Vec<f64>;
    fn velocity(&self, t: f64) -> Vec<f64>;
    /// Arc length, used to turn a step length into a step count.
    fn length(&self) -> f64;
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
}

impl Segment {
    pub fn new(from: &[f64], to: &[f64]) -> Self {
        Segment { from: from.to_vec(), to: to.to_vec() }
    }
}

impl Curve for Segment {
    fn point(&self, t: f64) -> Vec<f64> {
        self.from.iter().zip(&self.to).map(|(a, b)| a + t * (b - a)).collect()
    }

    fn velocity(&self, _t: f64) -> Vec<f64> {
        self.from.iter().zip(&self.to).map(|(a, b)| b - a).collect()
    }

    fn length(&self) -> f64 {
        self.from.iter().zip(&self.to).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

/// Circular arc in the coordinate plane spanned by axes (i, j).
#[derive(Clone, Debug)]
pub struct CircleArc {
    pub center: Vec<f64>,
    pub radius: f64,
    pub axes: (usize, usize),
    pub start: f64,
    pub end: f64,
}

impl Curve for CircleArc {
    fn point(&self, t: f64) -> Vec<f64> {
        let th = self.start + t * (self.end - self.start);
        let mut p = self.center.clone();
        p[self.axes.0] += self.radius * th.cos();
        p[self.axes.1] += self.radius * th.sin();
        p
    }

    fn velocity(&self, t: f64) -> Vec<f64> {
        let dth = self.end - self.start;
        let th = self.start + t * dth;
        let mut v = vec![0.0; self.center.len()];
        v[self.axes.0] = -self.radius * th.sin() * dth;
        v[self.axes.1] = self.radius * th.cos() * dth;
        v
    }

    fn length(&self) -> f64 {
        self.radius * (self.end - self.start).abs()
    }
}

/// v ↦ dv/dt along the curve at one parameter value, as a dense matrix.
fn transport_generator(chart: &dyn MetricChart, x: &[f64], vel: &[f64]) -> Result<Vec<f64>> {
    let geo = geometry_for(chart, x, 2)?;
    let n = geo.n;
    let m = n + 2;
    let mut a = vec![0.0; m * m];
    let (rho, sig) = (n + 1, 0);
    for c in 0..n {
        // σ' = ċ^a μ_a
        a[sig * m + 1 + c] = vel[c];
    }
    for b in 0..n {
        let row = 1 + b;
        for k in 0..n {
            let ca = vel[k];
            if ca == 0.0 {
                continue;
            }
            for c in 0..n {
                a[row * m + 1 + c] += ca * geo.gamma(c, k, b).value();
            }
            a[row * m + rho] -= ca * geo.g[k * n + b].value();
            a[row * m + sig] -= ca * geo.schouten[k * n + b].value();
        }
    }
    for c in 0..n {
        let mut v = 0.0;
        for k in 0..n {
            for b in 0..n {
                v += vel[k] * geo.schouten[k * n + b].value() * geo.ginv[b * n + c].value();
            }
        }
        a[rho * m + 1 + c] = v;
    }
    Ok(a)
}

fn matvec(a: &[f64], v: &[f64]) -> Vec<f64> {
    let m = v.len();
    (0..m).map(|i| (0..m).map(|j| a[i * m + j] * v[j]).sum()).collect()
}

/// Fixed-step RK4 for all states at once; `h` is a step in arc length.
fn transport_states(chart: &dyn MetricChart, curve: &dyn Curve, h: f64, states: &mut [Vec<f64>]) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("step {h} must be positive")));
    }
    let steps = ((curve.length() / h).ceil() as usize).max(1);
    let dt = 1.0 / steps as f64;
    let eval = |t: f64| -> Result<Vec<f64>> {
        let x = curve.point(t);
        check_point(chart, &x)?;
        transport_generator(chart, &x, &curve.velocity(t))
    };
    let mut a0 = eval(0.0)?;
    for s in 0..steps {
        let t = s as f64 * dt;
        let am = eval(t + 0.5 * dt)?;
        let a1 = eval(t + dt)?;
        for v in states.iter_mut() {
            let k1 = matvec(&a0, v);
            let y: Vec<f64> = v.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k2 = matvec(&am, &y);
            let y: Vec<f64> = v.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
            let k3 = matvec(&am, &y);
            let y: Vec<f64> = v.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
            let k4 = matvec(&a1, &y);
            for i in 0..v.len() {
                v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        a0 = a1;
    }
    Ok(())
}

/// Solve ∇_ċ v = 0 along the curve by RK4 with step length h.
pub fn parallel_transport(chart: &dyn MetricChart, curve: &dyn Curve, v0: &TractorVec, h: f64) -> Result<TractorVec> {
    if v0.n() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), got: v0.n() });
    }
    let mut st = vec![v0.to_state()];
    transport_states(chart, curve, h, &mut st)?;
    let mut out = TractorVec::from_state(&st[0], v0.scale.clone());
    out.weight = v0.weight;
    Ok(out)
}

/// Transport matrix along a curve; column j is the image of basis state j.
pub fn transport_matrix(chart: &dyn MetricChart, curve: &dyn Curve, h: f64) -> Result<Vec<Vec<f64>>> {
    let m = chart.dim() + 2;
    let mut st: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    transport_states(chart, curve, h, &mut st)?;
    Ok((0..m).map(|i| (0..m).map(|j| st[j][i]).collect()).collect())
}

/// Closed polygon; the last vertex joins back to the first.
#[derive(Clone, Debug)]
pub struct Polygon {
    pub vertices: Vec<Vec<f64>>,
}

impl Polygon {
    /// Axis-aligned square with one corner at `corner`, in the plane of axes (i, j).
    pub fn square(corner: &[f64], axes: (usize, usize), side: f64) -> Self {
        let mut v1 = corner.to_vec();
        v1[axes.0] += side;
        let mut v2 = v1.clone();
        v2[axes.1] += side;
        let mut v3 = corner.to_vec();
        v3[axes.1] += side;
        Polygon { vertices: vec![corner.to_vec(), v1, v2, v3] }
    }

    /// Square centred at `center`.
    pub fn centered_square(center: &[f64], axes: (usize, usize), side: f64) -> Self {
        let mut c = center.to_vec();
        c[axes.0] -= 0.5 * side;
        c[axes.1] -= 0.5 * side;
        Polygon::square(&c, axes, side)
    }

    pub fn edges(&self) -> Vec<Segment> {
        let k = self.vertices.len();
        (0..k).map(|i| Segment::new(&self.vertices[i], &self.vertices[(i + 1) % k])).collect()
    }
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = a.len();
    (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Transport matrix once around the loop, edge by edge with step length h.
pub fn holonomy_loop(chart: &dyn MetricChart, lp: &Polygon, h: f64) -> Result<Vec<Vec<f64>>> {
    let m = chart.dim() + 2;
    let mut acc: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for e in lp.edges() {
        acc = matmul(&transport_matrix(chart, &e, h)?, &acc);
    }
    Ok(acc)
}

/// Frobenius norm of M − I.
pub fn deviation_from_identity(m: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let d = v - if i == j { 1.0 } else { 0.0 };
            s += d * d;
        }
    }
    s.sqrt()
}

/// Holonomy deviation of squares of the given sides, each edge split into
/// `steps_per_side` RK4 steps.
pub fn holonomy_study(
    chart: &dyn MetricChart,
    corner: &[f64],
    axes: (usize, usize),
    sides: &[f64],
    steps_per_side: usize,
) -> Result<Vec<f64>> {
    sides
        .iter()
        .map(|&s| {
            let m = holonomy_loop(chart, &Polygon::square(corner, axes, s), s / steps_per_side as f64)?;
            Ok(deviation_from_identity(&m))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RecoverOptions {
    pub h: f64,
    pub fd_delta: f64,
    pub probe_side: f64,
    pub probe_steps: usize,
    pub probe_tol: f64,
    pub tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions { h: 1e-3, fd_delta: 0.01, probe_side: 0.1, probe_steps: 8, probe_tol: 1e-6, tol: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EinsteinRecovery {
    pub samples: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub tractors: Vec<TractorVec>,
    pub probe_deviation: f64,
    pub residual: Residual,
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Transport `v0` radially from `base` to each sample and read off σ.
///
/// The Einstein residual at a sample uses a Richardson-extrapolated
/// central-difference Hessian of σ; the stencil values come from short
/// transports starting at the sample, so the radial integration error is
/// shared by the whole stencil.
pub fn einstein_recover(
    chart: &dyn MetricChart,
    base: &[f64],
    v0: &TractorVec,
    samples: &[Vec<f64>],
    opts: &RecoverOptions,
) -> Result<EinsteinRecovery> {
    let n = chart.dim();
    let axes: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut probe = 0.0f64;
    for x in std::iter::once(base).chain(samples.iter().map(|v| v.as_slice())) {
        for &ax in axes.iter().take(2) {
            let lp = Polygon::centered_square(x, ax, opts.probe_side);
            let dev = deviation_from_identity(&holonomy_loop(chart, &lp, opts.probe_side / opts.probe_steps as f64)?);
            probe = probe.max(dev);
            if !(dev <= opts.probe_tol) {
                return Err(Error::NotFlat { point: x.to_vec(), deviation: dev });
            }
        }
    }
    let d = opts.fd_delta;
    let mut acc = ResidualAcc::new("einstein");
    let mut sigma = Vec::with_capacity(samples.len());
    let mut tractors = Vec::with_capacity(samples.len());
    for x in samples {
        let v = parallel_transport(chart, &Segment::new(base, x), v0, opts.h)?;
        let at = |offset: &[(usize, f64)]| -> Result<f64> {
            let mut y = x.clone();
            for &(i, s) in offset {
                y[i] += s;
            }
            Ok(parallel_transport(chart, &Segment::new(x, &y), &v, opts.h)?.sigma)
        };
        let s0 = v.sigma;
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for a in 0..n {
            let (p1, m1, p2, m2) = (at(&[(a, d)])?, at(&[(a, -d)])?, at(&[(a, 2.0 * d)])?, at(&[(a, -2.0 * d)])?);
            grad[a] = richardson((p2 - m2) / (4.0 * d), (p1 - m1) / (2.0 * d));
            hess[a * n + a] = richardson((p2 - 2.0 * s0 + m2) / (4.0 * d * d), (p1 - 2.0 * s0 + m1) / (d * d));
            for b in a + 1..n {
                let mixed = |e: f64| -> Result<f64> {
                    Ok((at(&[(a, e), (b, e)])? - at(&[(a, e), (b, -e)])? - at(&[(a, -e), (b, e)])?
                        + at(&[(a, -e), (b, -e)])?)
                        / (4.0 * e * e))
                };
                let hab = richardson(mixed(2.0 * d)?, mixed(d)?);
                hess[a * n + b] = hab;
                hess[b * n + a] = hab;
            }
        }
        let geo = geometry_for(chart, x, 2)?;
        let mut t = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut h = hess[a * n + b];
                for (c, gc) in grad.iter().enumerate() {
                    h -= geo.gamma(c, a, b).value() * gc;
                }
                t[a * n + b] = h + geo.schouten[a * n + b].value() * s0;
            }
        }
        let tr: f64 = (0..n * n).map(|k| geo.ginv[k].value() * t[k]).sum();
        let tf: Vec<f64> = (0..n * n).map(|k| t[k] - tr / n as f64 * geo.g[k].value()).collect();
        acc.push_max(&tf);
        sigma.push(s0);
        tractors.push(v);
    }
    Ok(EinsteinRecovery { samples: samples.to_vec(), sigma, tractors, probe_deviation: probe, residual: acc.finish(opts.tol) })
}
