//! Behaviour of connections, tractors and invariant operators under ĝ = Ω²g.

use num_rational::Rational64;

use crate::chart::{rescale, upsilon, ChartRef, ConformalFactor, MetricChart};
use crate::density::{einstein_operator, prolong, thomas_d, weight_f64, yamabe, yamabe_weight, DensityField};
use crate::error::Result;
use crate::geometry::JetGeometry;
use crate::jet::{Jet, JetFn};
use crate::report::{Report, ResidualAcc};
use crate::tractor::TractorVec;

/// Components of the same tractor (of weight `weight`) in the scale Ω²g,
/// given its components in g:
/// σ̂ = Ωσ, μ̂ = Ω(μ + σΥ), ρ̂ = Ω⁻¹(ρ − Υ·μ − ½|Υ|²σ), all times Ω^weight.
pub fn tractor_change(v: &TractorVec, ups: &[f64], ginv: &[f64], omega: f64, scale: &str) -> TractorVec {
    let n = v.n();
    let mut ups_mu = 0.0;
    let mut ups2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            ups_mu += ginv[a * n + b] * ups[a] * v.mu[b];
            ups2 += ginv[a * n + b] * ups[a] * ups[b];
        }
    }
    let k = omega.powf(weight_f64(v.weight));
    let mut out = TractorVec::new(
        k * omega * v.sigma,
        v.mu.iter().zip(ups).map(|(m, u)| k * omega * (m + v.sigma * u)).collect(),
        k / omega * (v.rho - ups_mu - 0.5 * ups2 * v.sigma),
        scale,
    );
    out.weight = v.weight;
    out
}

/// Fixed analytic test fields used by the law checks.
pub struct TestFields {
    pub vector: Vec<JetFn>,
    pub covector: Vec<JetFn>,
    pub scalar: JetFn,
    pub scale_density: JetFn,
}

impl TestFields {
    pub fn new(n: usize) -> Self {
        let vector = (0..n)
            .map(|b| {
                let nb = (b + 1) % n;
                let c = 0.3 + 0.1 * b as f64;
                JetFn::new(move |x| x[b].scale(0.7).add_const(c).sin().add(&x[nb].mul(&x[b]).scale(0.5)))
            })
            .collect();
        let covector = (0..n)
            .map(|b| {
                let nb = (b + 2) % n;
                let c = 0.2 * (b as f64 + 1.0);
                JetFn::new(move |x| x[nb].scale(c).exp().sub(&x[b].mul(&x[b]).scale(0.4)))
            })
            .collect();
        let scalar = JetFn::new(move |x| {
            let n = x.len();
            x[0].scale(0.2).exp().add(&x[1].mul(&x[n - 1])).add_const(0.5)
        });
        let scale_density = JetFn::new(|x| {
            let n = x.len();
            x[0].sin().scale(0.3).add(&x[1].mul(&x[1]).mul(&x[n - 1]).scale(0.2)).add_const(1.0)
        });
        TestFields { vector, covector, scalar, scale_density }
    }
}

fn eval_all(fs: &[JetFn], vars: &[Jet]) -> Vec<Jet> {
    fs.iter().map(|f| f.apply(vars)).collect()
}

/// Residuals of the rescaling laws at each sample: Christoffel symbols,
/// inverse metric, vectors, covectors, densities of weight `w`, and the
/// tractor change applied to a prolonged scale.
pub fn check_rescale_laws(chart: ChartRef, omega: &ConformalFactor, samples: &[Vec<f64>], w: Rational64, tol: f64) -> Result<Report> {
    let hat = rescale(chart.clone(), omega)?;
    let n = chart.dim();
    let tf = TestFields::new(n);
    let wf = weight_f64(w);
    let mut r_gamma = ResidualAcc::new("christoffel");
    let mut r_inv = ResidualAcc::new("inverse_metric");
    let mut r_vec = ResidualAcc::new("vector");
    let mut r_cov = ResidualAcc::new("covector");
    let mut r_den = ResidualAcc::new("density");
    let mut r_tt = ResidualAcc::new("tractor_change");
    let sigma = DensityField::new(Rational64::from_integer(1), tf.scale_density.clone(), chart.scale());
    let sigma_hat = sigma.rescale(omega, hat.scale());
    for x in samples {
        let geo = JetGeometry::new(chart.as_ref(), x, 1)?;
        let geoh = JetGeometry::new(&hat, x, 1)?;
        let ups = upsilon(omega, x);
        let om = omega.value(x);
        let g = |a: usize, b: usize| geo.g[a * n + b].value();
        let gi = |a: usize, b: usize| geo.ginv[a * n + b].value();
        let ups_up: Vec<f64> = (0..n).map(|c| (0..n).map(|d| gi(c, d) * ups[d]).sum()).collect();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

        let mut d = Vec::new();
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let want = geo.gamma(c, a, b).value() + delta(c, a) * ups[b] + delta(c, b) * ups[a] - g(a, b) * ups_up[c];
                    d.push(geoh.gamma(c, a, b).value() - want);
                }
            }
        }
        r_gamma.push_max(&d);

        let d: Vec<f64> = (0..n * n).map(|k| geoh.ginv[k].value() - geo.ginv[k].value() / (om * om)).collect();
        r_inv.push_max(&d);

        let vars = Jet::variables(x, 1);
        let xi = eval_all(&tf.vector, &vars);
        let xi_low: Vec<f64> = (0..n).map(|a| (0..n).map(|b| g(a, b) * xi[b].value()).sum()).collect();
        let ups_xi: f64 = (0..n).map(|c| ups[c] * xi[c].value()).sum();
        let mut d = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let mut lhs = xi[b].d1(a);
                let mut rhs = xi[b].d1(a);
                for c in 0..n {
                    lhs += geoh.gamma(b, a, c).value() * xi[c].value();
                    rhs += geo.gamma(b, a, c).value() * xi[c].value();
                }
                rhs += ups[a] * xi[b].value() - xi_low[a] * ups_up[b] + delta(a, b) * ups_xi;
                d.push(lhs - rhs);
            }
        }
        r_vec.push_max(&d);

        let om_f = eval_all(&tf.covector, &vars);
        let ups_om: f64 = (0..n).map(|c| ups_up[c] * om_f[c].value()).sum();
        let mut d = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let mut lhs = om_f[b].d1(a);
                let mut rhs = om_f[b].d1(a);
                for c in 0..n {
                    lhs -= geoh.gamma(c, a, b).value() * om_f[c].value();
                    rhs -= geo.gamma(c, a, b).value() * om_f[c].value();
                }
                rhs += -ups[a] * om_f[b].value() - ups[b] * om_f[a].value() + g(a, b) * ups_om;
                d.push(lhs - rhs);
            }
        }
        r_cov.push_max(&d);

        let f = tf.scalar.eval(x, 1);
        let f_hat = omega.power(wf).eval(x, 1).mul(&f);
        let scale_back = om.powf(-wf);
        let d: Vec<f64> = (0..n).map(|a| scale_back * f_hat.d1(a) - (f.d1(a) + wf * ups[a] * f.value())).collect();
        r_den.push_max(&d);

        let v = prolong(chart.as_ref(), &sigma, x)?;
        let native = prolong(&hat, &sigma_hat, x)?;
        let ginv: Vec<f64> = geo.ginv.iter().map(Jet::value).collect();
        let moved = tractor_change(&v, &ups, &ginv, om, hat.scale());
        r_tt.push(native.max_abs_diff(&moved));
    }
    Ok(Report::new(vec![
        r_gamma.finish(tol),
        r_inv.finish(tol),
        r_vec.finish(tol),
        r_cov.finish(tol),
        r_den.finish(tol),
        r_tt.finish(tol),
    ]))
}

/// Each invariant operator computed in scale Ω²g on the rescaled density,
/// against its value in g transported by the weight law.
pub fn scale_naturality(chart: ChartRef, omega: &ConformalFactor, samples: &[Vec<f64>], thomas_weight: Rational64, tol: f64) -> Result<Report> {
    let hat = rescale(chart.clone(), omega)?;
    let n = chart.dim();
    let tf = TestFields::new(n);
    let sigma = DensityField::new(Rational64::from_integer(1), tf.scale_density.clone(), chart.scale());
    let sigma_hat = sigma.rescale(omega, hat.scale());
    let yw = yamabe_weight(n);
    let f = DensityField::new(yw, tf.scalar.clone(), chart.scale());
    let f_hat = f.rescale(omega, hat.scale());
    let h = DensityField::new(thomas_weight, tf.scalar.clone(), chart.scale());
    let h_hat = h.rescale(omega, hat.scale());
    let mut r_e = ResidualAcc::new("einstein_operator");
    let mut r_y = ResidualAcc::new("yamabe");
    let mut r_d = ResidualAcc::new("thomas_d");
    for x in samples {
        let om = omega.value(x);
        let e = einstein_operator(chart.as_ref(), &sigma, x)?;
        let e_hat = einstein_operator(&hat, &sigma_hat, x)?;
        r_e.push_max(&e.iter().zip(&e_hat).map(|(a, b)| b - om * a).collect::<Vec<_>>());

        let y = yamabe(chart.as_ref(), &f, x)?;
        let y_hat = yamabe(&hat, &f_hat, x)?;
        r_y.push(y_hat - om.powf(weight_f64(yw) - 2.0) * y);

        let dv = thomas_d(chart.as_ref(), &h, x)?;
        let dv_hat = thomas_d(&hat, &h_hat, x)?;
        let geo = JetGeometry::new(chart.as_ref(), x, 1)?;
        let ginv: Vec<f64> = geo.ginv.iter().map(Jet::value).collect();
        let moved = tractor_change(&dv, &upsilon(omega, x), &ginv, om, hat.scale());
        r_d.push(dv_hat.max_abs_diff(&moved));
    }
    Ok(Report::new(vec![r_e.finish(tol), r_y.finish(tol), r_d.finish(tol)]))
}
