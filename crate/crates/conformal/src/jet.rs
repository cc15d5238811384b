//! Truncated Taylor jets in n variables up to order three.
//!
//! All geometric quantities are assembled from these, so every partial
//! derivative is analytic; no finite differencing happens in the pipeline.

use std::fmt;
use std::sync::Arc;

pub const MAX_ORDER: u8 = 3;

/// Value and partial derivatives of a scalar function at one point.
///
/// `d2` and `d3` hold the full (symmetric) tensors, row-major.
#[derive(Clone, PartialEq)]
pub struct Jet {
    n: usize,
    order: u8,
    v: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order {}, v = {}, d1 = {:?})", self.order, self.v, self.d1)
    }
}

impl Jet {
    pub fn constant(n: usize, order: u8, v: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order above {MAX_ORDER}");
        Jet {
            n,
            order,
            v,
            d1: if order >= 1 { vec![0.0; n] } else { Vec::new() },
            d2: if order >= 2 { vec![0.0; n * n] } else { Vec::new() },
            d3: if order >= 3 { vec![0.0; n * n * n] } else { Vec::new() },
        }
    }

    /// The coordinate function x_i at the point x.
    pub fn variable(x: &[f64], i: usize, order: u8) -> Self {
        let mut j = Jet::constant(x.len(), order, x[i]);
        if order >= 1 {
            j.d1[i] = 1.0;
        }
        j
    }

    /// All n coordinate functions at x.
    pub fn variables(x: &[f64], order: u8) -> Vec<Jet> {
        (0..x.len()).map(|i| Jet::variable(x, i, order)).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.n + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d3[(i * self.n + j) * self.n + k]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.d1
    }

    /// Drop derivatives above `order`.
    pub fn truncate(&self, order: u8) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let mut j = self.clone();
        j.order = order;
        if order < 3 {
            j.d3.clear();
        }
        if order < 2 {
            j.d2.clear();
        }
        if order < 1 {
            j.d1.clear();
        }
        j
    }

    /// ∂_k of this jet, one order lower.
    pub fn partial(&self, k: usize) -> Jet {
        assert!(self.order >= 1, "partial of an order-0 jet");
        let n = self.n;
        let mut j = Jet::constant(n, self.order - 1, self.d1[k]);
        if self.order >= 2 {
            for i in 0..n {
                j.d1[i] = self.d2[k * n + i];
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for l in 0..n {
                    j.d2[i * n + l] = self.d3[(k * n + i) * n + l];
                }
            }
        }
        j
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.n, other.n, "jets over different dimensions");
        let order = self.order.min(other.order);
        let a = self.truncate(order);
        let b = other.truncate(order);
        Jet {
            n: self.n,
            order,
            v: f(a.v, b.v),
            d1: a.d1.iter().zip(&b.d1).map(|(x, y)| f(*x, *y)).collect(),
            d2: a.d2.iter().zip(&b.d2).map(|(x, y)| f(*x, *y)).collect(),
            d3: a.d3.iter().zip(&b.d3).map(|(x, y)| f(*x, *y)).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            v: self.v * s,
            d1: self.d1.iter().map(|x| x * s).collect(),
            d2: self.d2.iter().map(|x| x * s).collect(),
            d3: self.d3.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut j = self.clone();
        j.v += c;
        j
    }

    /// Leibniz rule up to the smaller of the two orders.
    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.n, other.n, "jets over different dimensions");
        let n = self.n;
        let order = self.order.min(other.order);
        let (u, w) = (self, other);
        let mut out = Jet::constant(n, order, u.v * w.v);
        if order >= 1 {
            for i in 0..n {
                out.d1[i] = u.d1[i] * w.v + u.v * w.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i * n + j] = u.d2(i, j) * w.v
                        + u.d1[i] * w.d1[j]
                        + u.d1[j] * w.d1[i]
                        + u.v * w.d2(i, j);
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[(i * n + j) * n + k] = u.d3(i, j, k) * w.v
                            + u.d2(i, j) * w.d1[k]
                            + u.d2(i, k) * w.d1[j]
                            + u.d2(j, k) * w.d1[i]
                            + u.d1[i] * w.d2(j, k)
                            + u.d1[j] * w.d2(i, k)
                            + u.d1[k] * w.d2(i, j)
                            + u.v * w.d3(i, j, k);
                    }
                }
            }
        }
        out
    }

    /// f ∘ u given f and its first three derivatives at u's value.
    pub fn compose(&self, f: [f64; 4]) -> Jet {
        let n = self.n;
        let u = self;
        let mut out = Jet::constant(n, self.order, f[0]);
        if self.order >= 1 {
            for i in 0..n {
                out.d1[i] = f[1] * u.d1[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i * n + j] = f[2] * u.d1[i] * u.d1[j] + f[1] * u.d2(i, j);
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[(i * n + j) * n + k] = f[3] * u.d1[i] * u.d1[j] * u.d1[k]
                            + f[2] * (u.d2(i, j) * u.d1[k] + u.d2(i, k) * u.d1[j] + u.d2(j, k) * u.d1[i])
                            + f[1] * u.d3(i, j, k);
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let x = self.v;
        assert!(x != 0.0, "reciprocal of a vanishing jet");
        self.compose([1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x)])
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self.mul(&other.recip())
    }

    /// u^p for real p; u must be positive unless p is a nonnegative integer.
    pub fn powf(&self, p: f64) -> Jet {
        let x = self.v;
        self.compose([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Jet {
        let e = self.v.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Jet {
        let x = self.v;
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.compose([c, -s, -c, s])
    }
}

/// A scalar expression in the coordinates, evaluated on jets.
#[derive(Clone)]
pub struct JetFn(Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>);

impl JetFn {
    pub fn new(f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        JetFn(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        JetFn::new(move |x| Jet::constant(x.len(), x[0].order(), c))
    }

    pub fn eval(&self, x: &[f64], order: u8) -> Jet {
        (self.0)(&Jet::variables(x, order))
    }

    pub fn apply(&self, vars: &[Jet]) -> Jet {
        (self.0)(vars)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.eval(x, 0).value()
    }
}

impl fmt::Debug for JetFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JetFn")
    }
}

/// Σ x_i² as a jet.
pub fn norm_squared(vars: &[Jet]) -> Jet {
    let mut acc = Jet::constant(vars[0].n(), vars[0].order(), 0.0);
    for v in vars {
        acc = acc.add(&v.mul(v));
    }
    acc
}
