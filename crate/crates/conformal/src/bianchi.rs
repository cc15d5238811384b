//! Differential identities of the curvature, evaluated from order-3 metric jets.

use crate::chart::MetricChart;
use crate::density::{hessian_jets, trace_jets};
use crate::error::Result;
use crate::geometry::JetGeometry;
use crate::jet::JetFn;
use crate::report::{Report, ResidualAcc};

/// The test density used for the Laplacian commutator.
pub fn default_test_density() -> JetFn {
    JetFn::new(|x| {
        let n = x.len();
        x[0].sin().mul(&x[1].scale(0.5).exp()).add(&x[n - 1].mul(&x[n - 1]).mul(&x[n - 1]).scale(0.3))
    })
}

pub fn bianchi_checks(chart: &dyn MetricChart, samples: &[Vec<f64>], tol: f64) -> Result<Report> {
    bianchi_checks_with(chart, samples, &default_test_density(), tol)
}

/// First and second Bianchi identities, ∇^aP_{ac} = ∇_cJ, and
/// ∇_cΔσ − Δ∇_cσ = R_{cb}{}^b{}_d∇^dσ.
pub fn bianchi_checks_with(chart: &dyn MetricChart, samples: &[Vec<f64>], sigma: &JetFn, tol: f64) -> Result<Report> {
    let mut first = ResidualAcc::new("first_bianchi");
    let mut second = ResidualAcc::new("second_bianchi");
    let mut contracted = ResidualAcc::new("contracted_bianchi");
    let mut commutator = ResidualAcc::new("laplacian_commutator");
    let n = chart.dim();
    for x in samples {
        let geo = JetGeometry::new(chart, x, 3)?;
        let gam = |i: usize, j: usize, k: usize| geo.gamma(i, j, k).value();
        let r = |a: usize, b: usize, c: usize, d: usize| geo.riemann(a, b, c, d);
        let gi = |a: usize, b: usize| geo.ginv[a * n + b].value();

        let mut d1 = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        d1.push(r(a, b, c, d).value() + r(b, d, c, a).value() + r(d, a, c, b).value());
                    }
                }
            }
        }
        first.push_max(&d1);

        let nabla_r = |e: usize, a: usize, b: usize, c: usize, d: usize| {
            let mut v = r(a, b, c, d).d1(e);
            for f in 0..n {
                v -= gam(f, e, a) * r(f, b, c, d).value();
                v -= gam(f, e, b) * r(a, f, c, d).value();
                v += gam(c, e, f) * r(a, b, f, d).value();
                v -= gam(f, e, d) * r(a, b, c, f).value();
            }
            v
        };
        let mut d2 = Vec::new();
        for e in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            d2.push(nabla_r(e, a, b, c, d) + nabla_r(a, b, e, c, d) + nabla_r(b, e, a, c, d));
                        }
                    }
                }
            }
        }
        second.push_max(&d2);

        let p = |a: usize, b: usize| &geo.schouten[a * n + b];
        let j = geo.schouten_trace.as_ref().expect("curvature present");
        let mut d3 = Vec::new();
        for c in 0..n {
            let mut div = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let mut nab = p(a, c).d1(b);
                    for d in 0..n {
                        nab -= gam(d, b, a) * p(d, c).value() + gam(d, b, c) * p(a, d).value();
                    }
                    div += gi(a, b) * nab;
                }
            }
            d3.push(div - j.d1(c));
        }
        contracted.push_max(&d3);

        let s = sigma.eval(x, 3);
        let h = hessian_jets(&geo, &s);
        let lap = trace_jets(&geo, &h);
        let hh = |a: usize, b: usize| &h[a * n + b];
        let grad_up: Vec<f64> = (0..n).map(|d| (0..n).map(|e| gi(d, e) * s.d1(e)).sum()).collect();
        let mut d4 = Vec::new();
        for c in 0..n {
            let mut rough = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let mut nab = hh(b, c).d1(a);
                    for e in 0..n {
                        nab -= gam(e, a, b) * hh(e, c).value() + gam(e, a, c) * hh(b, e).value();
                    }
                    rough += gi(a, b) * nab;
                }
            }
            let mut curv = 0.0;
            for b in 0..n {
                for d in 0..n {
                    curv += r(c, b, b, d).value() * grad_up[d];
                }
            }
            d4.push(lap.d1(c) - rough - curv);
        }
        commutator.push_max(&d4);
    }
    Ok(Report::new(vec![first.finish(tol), second.finish(tol), contracted.finish(tol), commutator.finish(tol)]))
}

