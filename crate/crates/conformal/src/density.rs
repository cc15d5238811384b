//! Densities and the second-order operators built from them.

use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::chart::{ConformalFactor, MetricChart};
use crate::error::{Error, Result};
use crate::geometry::{zero_jet, JetGeometry};
use crate::jet::{Jet, JetFn};
use crate::report::{Residual, ResidualAcc};
use crate::tractor::TractorVec;

/// A density of weight w, stored as a plain function in the named scale.
#[derive(Clone, Debug)]
pub struct DensityField {
    pub weight: Rational64,
    pub f: JetFn,
    pub scale: String,
}

impl DensityField {
    pub fn new(weight: Rational64, f: JetFn, scale: impl Into<String>) -> Self {
        DensityField { weight, f, scale: scale.into() }
    }

    /// The same density written in the scale Ω²g: f̂ = Ω^w f.
    pub fn rescale(&self, omega: &ConformalFactor, scale: impl Into<String>) -> DensityField {
        let w = weight_f64(self.weight);
        let om = omega.omega.clone();
        let f = self.f.clone();
        DensityField {
            weight: self.weight,
            f: JetFn::new(move |x| om.apply(x).powf(w).mul(&f.apply(x))),
            scale: scale.into(),
        }
    }

    pub fn jet(&self, x: &[f64], order: u8) -> Jet {
        self.f.eval(x, order)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.f.value(x)
    }

    fn check_scale(&self, chart: &dyn MetricChart) -> Result<()> {
        if self.scale != chart.scale() {
            return Err(Error::Invalid(format!(
                "density is expressed in scale {:?} but the chart is in scale {:?}",
                self.scale,
                chart.scale()
            )));
        }
        Ok(())
    }

    fn check_weight(&self, w: Rational64) -> Result<()> {
        if self.weight != w {
            return Err(Error::WeightMismatch { expected: w.to_string(), got: self.weight.to_string() });
        }
        Ok(())
    }
}

pub fn weight_f64(w: Rational64) -> f64 {
    w.to_f64().expect("finite weight")
}

/// 1 − n/2.
pub fn yamabe_weight(n: usize) -> Rational64 {
    Rational64::new(2 - n as i64, 2)
}

/// ∇_a∇_b f = ∂_a∂_b f − Γ^c_{ab} ∂_c f, as jets two orders below f.
pub fn hessian_jets(geo: &JetGeometry, f: &Jet) -> Vec<Jet> {
    let n = geo.n;
    let o = f.order() - 2;
    let df: Vec<Jet> = (0..n).map(|c| f.partial(c)).collect();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut h = df[a].partial(b);
            for (c, dfc) in df.iter().enumerate() {
                h = h.sub(&geo.gamma(c, a, b).truncate(o).mul(&dfc.truncate(o)));
            }
            out.push(h);
        }
    }
    out
}

/// g^{ab} T_{ab}.
pub fn trace_jets(geo: &JetGeometry, t: &[Jet]) -> Jet {
    let o = t[0].order();
    let mut acc = zero_jet(geo.n, o);
    for (k, tk) in t.iter().enumerate() {
        acc = acc.add(&geo.ginv[k].truncate(o).mul(tk));
    }
    acc
}

pub(crate) fn geometry_for(chart: &dyn MetricChart, x: &[f64], order: u8) -> Result<JetGeometry> {
    JetGeometry::new(chart, x, order)
}

/// Trace-free part of ∇_a∇_bσ + P_{ab}σ, row-major n×n.
pub fn einstein_operator(chart: &dyn MetricChart, sigma: &DensityField, x: &[f64]) -> Result<Vec<f64>> {
    sigma.check_weight(Rational64::from_integer(1))?;
    sigma.check_scale(chart)?;
    let geo = geometry_for(chart, x, 2)?;
    let s = sigma.jet(x, 2);
    let h = hessian_jets(&geo, &s);
    let n = geo.n;
    let t: Vec<f64> = (0..n * n).map(|k| h[k].value() + geo.schouten[k].value() * s.value()).collect();
    let tr: f64 = (0..n * n).map(|k| geo.ginv[k].value() * t[k]).sum();
    Ok((0..n * n).map(|k| t[k] - tr / n as f64 * geo.g[k].value()).collect())
}

/// (σ, ∇σ, ρ) with ρ = −(Δσ + Jσ)/n, as jets of order `order`.
pub fn prolong_jets(chart: &dyn MetricChart, sigma: &DensityField, x: &[f64], order: u8) -> Result<(Jet, Vec<Jet>, Jet)> {
    sigma.check_weight(Rational64::from_integer(1))?;
    sigma.check_scale(chart)?;
    let geo = geometry_for(chart, x, order + 2)?;
    let s = sigma.jet(x, order + 2);
    let n = geo.n;
    let lap = trace_jets(&geo, &hessian_jets(&geo, &s));
    let j = geo.schouten_trace.clone().expect("curvature present");
    let rho = lap.add(&j.mul(&s.truncate(order))).scale(-1.0 / n as f64);
    let mu = (0..n).map(|a| s.partial(a).truncate(order)).collect();
    Ok((s.truncate(order), mu, rho))
}

pub fn prolong(chart: &dyn MetricChart, sigma: &DensityField, x: &[f64]) -> Result<TractorVec> {
    let (s, mu, rho) = prolong_jets(chart, sigma, x, 0)?;
    Ok(TractorVec::new(s.value(), mu.iter().map(Jet::value).collect(), rho.value(), chart.scale()))
}

/// Max over samples of |∇_cρ − P_c{}^a μ_a| with (μ, ρ) from the prolongation.
pub fn closure_residual(chart: &dyn MetricChart, sigma: &DensityField, samples: &[Vec<f64>], tol: f64) -> Result<Residual> {
    let mut acc = ResidualAcc::new("closure");
    for x in samples {
        let geo = geometry_for(chart, x, 3)?;
        let (_, mu, rho) = prolong_jets(chart, sigma, x, 1)?;
        let n = geo.n;
        let mut r = Vec::with_capacity(n);
        for c in 0..n {
            let mut v = rho.d1(c);
            for a in 0..n {
                for b in 0..n {
                    v -= geo.schouten[c * n + b].value() * geo.ginv[b * n + a].value() * mu[a].value();
                }
            }
            r.push(v);
        }
        acc.push_max(&r);
    }
    Ok(acc.finish(tol))
}

/// ((n+2w−2)w f, (n+2w−2)∇f, −(Δ + wJ)f), a tractor of weight w − 1.
pub fn thomas_d(chart: &dyn MetricChart, f: &DensityField, x: &[f64]) -> Result<TractorVec> {
    f.check_scale(chart)?;
    let geo = geometry_for(chart, x, 2)?;
    let fj = f.jet(x, 2);
    let n = geo.n as f64;
    let w = weight_f64(f.weight);
    let c = n + 2.0 * w - 2.0;
    let lap = trace_jets(&geo, &hessian_jets(&geo, &fj)).value();
    let j = geo.schouten_trace.as_ref().expect("curvature present").value();
    let mut out = TractorVec::new(
        c * w * fj.value(),
        fj.gradient().iter().map(|d| c * d).collect(),
        -(lap + w * j * fj.value()),
        chart.scale(),
    );
    out.weight = f.weight - 1;
    Ok(out)
}

/// Δf + (1 − n/2) J f for f of weight 1 − n/2.
pub fn yamabe(chart: &dyn MetricChart, f: &DensityField, x: &[f64]) -> Result<f64> {
    let w = yamabe_weight(chart.dim());
    f.check_weight(w)?;
    f.check_scale(chart)?;
    let geo = geometry_for(chart, x, 2)?;
    let fj = f.jet(x, 2);
    let lap = trace_jets(&geo, &hessian_jets(&geo, &fj)).value();
    let j = geo.schouten_trace.as_ref().expect("curvature present").value();
    Ok(lap + weight_f64(w) * j * fj.value())
}
