//! Levi-Civita connection and curvature of a chart metric, as jets.
//!
//! Index conventions: `gamma(i, j, k)` is Γ^i_{jk}; `riemann(a, b, c, d)` is
//! R_{ab}{}^c{}_d with [∇_a, ∇_b]V^c = R_{ab}{}^c{}_d V^d; Ricci contracts
//! the first and third slots.

use serde::Serialize;

use crate::chart::MetricChart;
use crate::error::{Error, Result};
use crate::jet::Jet;

pub(crate) fn zero_jet(n: usize, order: u8) -> Jet {
    Jet::constant(n, order, 0.0)
}

/// Connection and curvature jets at one point.
#[derive(Clone, Debug)]
pub struct JetGeometry {
    pub n: usize,
    pub x: Vec<f64>,
    pub g: Vec<Jet>,
    pub ginv: Vec<Jet>,
    pub gamma: Vec<Jet>,
    pub riemann: Vec<Jet>,
    pub ricci: Vec<Jet>,
    pub scalar: Option<Jet>,
    pub schouten: Vec<Jet>,
    pub schouten_trace: Option<Jet>,
}

pub fn check_point(chart: &dyn MetricChart, x: &[f64]) -> Result<()> {
    if x.len() != chart.dim() {
        return Err(Error::DimensionMismatch { expected: chart.dim(), got: x.len() });
    }
    if !chart.domain().contains(x) {
        return Err(Error::OutsideDomain { point: x.to_vec() });
    }
    Ok(())
}

/// Inverse of a symmetric matrix of jets by Gauss-Jordan with partial pivoting.
pub fn invert_jets(m: &[Jet], n: usize, x: &[f64]) -> Result<Vec<Jet>> {
    let order = m[0].order();
    let scale = m.iter().map(|j| j.value().abs()).fold(0.0, f64::max);
    let mut a: Vec<Jet> = m.to_vec();
    let mut inv: Vec<Jet> = (0..n * n).map(|k| Jet::constant(n, order, if k / n == k % n { 1.0 } else { 0.0 })).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i * n + col].value().abs().total_cmp(&a[j * n + col].value().abs())).unwrap();
        if a[p * n + col].value().abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularMetric { point: x.to_vec() });
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
                inv.swap(p * n + k, col * n + k);
            }
        }
        let r = a[col * n + col].recip();
        for k in 0..n {
            a[col * n + k] = a[col * n + k].mul(&r);
            inv[col * n + k] = inv[col * n + k].mul(&r);
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[i * n + col].clone();
            if f.value() == 0.0 && f.gradient().iter().all(|v| *v == 0.0) {
                continue;
            }
            for k in 0..n {
                a[i * n + k] = a[i * n + k].sub(&f.mul(&a[col * n + k]));
                inv[i * n + k] = inv[i * n + k].sub(&f.mul(&inv[col * n + k]));
            }
        }
    }
    Ok(inv)
}

impl JetGeometry {
    /// Build from metric jets of the given order (1 gives Γ only, 2 adds
    /// curvature values, 3 adds first derivatives of curvature).
    pub fn new(chart: &dyn MetricChart, x: &[f64], order: u8) -> Result<Self> {
        check_point(chart, x)?;
        let n = chart.dim();
        let g = chart.metric_jets(x, order);
        if g.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: g.len() });
        }
        JetGeometry::from_metric(n, x, g)
    }

    pub fn from_metric(n: usize, x: &[f64], g: Vec<Jet>) -> Result<Self> {
        let order = g[0].order();
        assert!(order >= 1, "connection needs first derivatives of the metric");
        let ginv = invert_jets(&g, n, x)?;
        // dg[(l*n + j)*n + k] = ∂_k g_{lj}
        let mut dg = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for j in 0..n {
                let p = &g[l * n + j];
                for k in 0..n {
                    dg.push(p.partial(k));
                }
            }
        }
        let d = |l: usize, j: usize, k: usize| &dg[(l * n + j) * n + k];
        let mut gamma = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = zero_jet(n, order - 1);
                    for l in 0..n {
                        let s = d(l, j, k).add(d(l, k, j)).sub(d(j, k, l));
                        acc = acc.add(&ginv[i * n + l].truncate(order - 1).mul(&s));
                    }
                    gamma.push(acc.scale(0.5));
                }
            }
        }
        let mut geo = JetGeometry {
            n,
            x: x.to_vec(),
            g,
            ginv,
            gamma,
            riemann: Vec::new(),
            ricci: Vec::new(),
            scalar: None,
            schouten: Vec::new(),
            schouten_trace: None,
        };
        if order >= 2 {
            geo.fill_curvature(order - 2);
        }
        Ok(geo)
    }

    fn fill_curvature(&mut self, o: u8) {
        let n = self.n;
        let gam = |i: usize, j: usize, k: usize| &self.gamma[(i * n + j) * n + k];
        let gt: Vec<Jet> = self.gamma.iter().map(|j| j.truncate(o)).collect();
        let gl = |i: usize, j: usize, k: usize| &gt[(i * n + j) * n + k];
        let mut riem = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for dd in 0..n {
                        if a == b {
                            riem.push(zero_jet(n, o));
                            continue;
                        }
                        let mut acc = gam(c, b, dd).partial(a).sub(&gam(c, a, dd).partial(b));
                        for e in 0..n {
                            acc = acc.add(&gl(c, a, e).mul(gl(e, b, dd))).sub(&gl(c, b, e).mul(gl(e, a, dd)));
                        }
                        riem.push(acc);
                    }
                }
            }
        }
        let mut ricci = Vec::with_capacity(n * n);
        for b in 0..n {
            for dd in 0..n {
                let mut acc = zero_jet(n, o);
                for a in 0..n {
                    acc = acc.add(&riem[((a * n + b) * n + a) * n + dd]);
                }
                ricci.push(acc);
            }
        }
        let gi: Vec<Jet> = self.ginv.iter().map(|j| j.truncate(o)).collect();
        let gg: Vec<Jet> = self.g.iter().map(|j| j.truncate(o)).collect();
        let mut scalar = zero_jet(n, o);
        for k in 0..n * n {
            scalar = scalar.add(&gi[k].mul(&ricci[k]));
        }
        let nn = n as f64;
        let c = 1.0 / (2.0 * (nn - 1.0));
        let schouten: Vec<Jet> =
            (0..n * n).map(|k| ricci[k].sub(&gg[k].mul(&scalar).scale(c)).scale(1.0 / (nn - 2.0))).collect();
        let mut trace = zero_jet(n, o);
        for k in 0..n * n {
            trace = trace.add(&gi[k].mul(&schouten[k]));
        }
        self.riemann = riem;
        self.ricci = ricci;
        self.scalar = Some(scalar);
        self.schouten = schouten;
        self.schouten_trace = Some(trace);
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Jet {
        &self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> &Jet {
        &self.riemann[((a * self.n + b) * self.n + c) * self.n + d]
    }

    pub fn point(&self) -> PointCurvature {
        let n = self.n;
        let v = |js: &[Jet]| js.iter().map(Jet::value).collect::<Vec<f64>>();
        let g = v(&self.g);
        let ginv = v(&self.ginv);
        let riemann = v(&self.riemann);
        let schouten = v(&self.schouten);
        // P_a{}^c = g^{ce} P_{ae}
        let mut p_up = vec![0.0; n * n];
        for a in 0..n {
            for c in 0..n {
                p_up[a * n + c] = (0..n).map(|e| ginv[c * n + e] * schouten[a * n + e]).sum();
            }
        }
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let mut weyl = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let k = ((a * n + b) * n + c) * n + d;
                        weyl[k] = riemann[k]
                            - (delta(a, c) * schouten[b * n + d] - delta(b, c) * schouten[a * n + d]
                                + p_up[a * n + c] * g[b * n + d]
                                - p_up[b * n + c] * g[a * n + d]);
                    }
                }
            }
        }
        PointCurvature {
            n,
            x: self.x.clone(),
            g,
            ginv,
            gamma: v(&self.gamma),
            riemann,
            ricci: v(&self.ricci),
            scalar: self.scalar.as_ref().map_or(0.0, Jet::value),
            schouten,
            schouten_trace: self.schouten_trace.as_ref().map_or(0.0, Jet::value),
            weyl,
        }
    }
}

/// Curvature quantities at a point, flattened row-major.
#[derive(Clone, Debug, Serialize)]
pub struct PointCurvature {
    pub n: usize,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    pub gamma: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub schouten: Vec<f64>,
    pub schouten_trace: f64,
    pub weyl: Vec<f64>,
}

impl PointCurvature {
    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.n + b]
    }

    pub fn ginv(&self, a: usize, b: usize) -> f64 {
        self.ginv[a * self.n + b]
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann[((a * self.n + b) * self.n + c) * self.n + d]
    }

    pub fn ricci(&self, a: usize, b: usize) -> f64 {
        self.ricci[a * self.n + b]
    }

    pub fn schouten(&self, a: usize, b: usize) -> f64 {
        self.schouten[a * self.n + b]
    }

    pub fn weyl(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.weyl[((a * self.n + b) * self.n + c) * self.n + d]
    }

    /// Largest violation of the algebraic curvature symmetries: Riemann
    /// antisymmetry in both pairs, first Bianchi, Ricci symmetry, and the
    /// Weyl traces.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        // R_{abcd} with the upper index lowered into the third slot
        let low = |a: usize, b: usize, c: usize, d: usize| (0..n).map(|e| self.g(c, e) * self.riemann(a, b, e, d)).sum::<f64>();
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                m = m.max((self.ricci(a, b) - self.ricci(b, a)).abs());
                for c in 0..n {
                    for d in 0..n {
                        m = m.max((self.riemann(a, b, c, d) + self.riemann(b, a, c, d)).abs());
                        m = m.max((low(a, b, c, d) + low(a, b, d, c)).abs());
                        m = m.max((self.riemann(a, b, c, d) + self.riemann(b, d, c, a) + self.riemann(d, a, c, b)).abs());
                    }
                    let tr: f64 = (0..n).map(|e| self.weyl(e, a, e, c)).sum();
                    m = m.max(tr.abs());
                }
            }
        }
        m
    }
}

/// Γ^i_{jk} at x, flattened as (i*n + j)*n + k.
pub fn christoffel(chart: &dyn MetricChart, x: &[f64]) -> Result<Vec<f64>> {
    let geo = JetGeometry::new(chart, x, 1)?;
    Ok(geo.gamma.iter().map(Jet::value).collect())
}

pub fn curvature_suite(chart: &dyn MetricChart, x: &[f64]) -> Result<PointCurvature> {
    Ok(JetGeometry::new(chart, x, 2)?.point())
}

/// ∇_a g_{bc} at x, flattened as (a*n + b)*n + c.
pub fn metric_covariant_derivative(chart: &dyn MetricChart, x: &[f64]) -> Result<Vec<f64>> {
    let geo = JetGeometry::new(chart, x, 1)?;
    let n = geo.n;
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = geo.g[b * n + c].d1(a);
                for d in 0..n {
                    v -= geo.gamma(d, a, b).value() * geo.g[d * n + c].value();
                    v -= geo.gamma(d, a, c).value() * geo.g[b * n + d].value();
                }
                out[(a * n + b) * n + c] = v;
            }
        }
    }
    Ok(out)
}
