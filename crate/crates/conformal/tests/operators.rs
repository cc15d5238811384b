use std::sync::Arc;

use num_rational::Rational64;
use tractorlab_conformal::density::yamabe_weight;
use tractorlab_conformal::rescale::scale_naturality;
use tractorlab_conformal::tractor::{tractor_connection_along, ExprTractorField, ProlongedField};
use tractorlab_conformal::*;

fn one() -> Rational64 {
    Rational64::from_integer(1)
}

fn density(w: Rational64, f: JetFn, chart: &dyn MetricChart) -> DensityField {
    DensityField::new(w, f, chart.scale())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sample_fn() -> JetFn {
    JetFn::new(|x| x[0].mul(&x[1]).add(&x[2].scale(0.7).sin()).add(&x[0].mul(&x[0]).mul(&x[2]).scale(0.3)).add_const(0.4))
}

#[test]
fn einstein_operator_examples() {
    let sphere = ExprChart::sphere(3).unwrap();
    let x = [0.3, -0.2, 0.5];
    let e = einstein_operator(&sphere, &density(one(), JetFn::constant(1.0), &sphere), &x).unwrap();
    assert!(max_abs(&e) < 1e-12);

    let flat = ExprChart::flat(3).unwrap();
    let bowl = JetFn::new(|x| tractorlab_conformal::jet::norm_squared(x).add_const(1.0));
    assert!(max_abs(&einstein_operator(&flat, &density(one(), bowl, &flat), &x).unwrap()) < 1e-14);

    let sq = JetFn::new(|x| x[0].mul(&x[0]));
    let e = einstein_operator(&flat, &density(one(), sq, &flat), &x).unwrap();
    // trace-free part of 2 e¹⊗e¹
    let want = [4.0 / 3.0, 0.0, 0.0, 0.0, -2.0 / 3.0, 0.0, 0.0, 0.0, -2.0 / 3.0];
    for (a, b) in e.iter().zip(want) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(einstein_operator(&flat, &density(Rational64::from_integer(2), JetFn::constant(1.0), &flat), &x).is_err());
    assert!(einstein_operator(&flat, &DensityField::new(one(), JetFn::constant(1.0), "sphere"), &x).is_err());
}

#[test]
fn prolongation_examples() {
    let sphere = ExprChart::sphere(3).unwrap();
    let x = [0.1, 0.4, -0.2];
    let v = prolong(&sphere, &density(one(), JetFn::constant(1.0), &sphere), &x).unwrap();
    assert!((v.sigma - 1.0).abs() < 1e-15 && max_abs(&v.mu) < 1e-15 && (v.rho + 0.5).abs() < 1e-12);

    let flat = ExprChart::flat(4).unwrap();
    let bowl = JetFn::new(|x| tractorlab_conformal::jet::norm_squared(x).add_const(1.0));
    let v = prolong(&flat, &density(one(), bowl, &flat), &[0.0; 4]).unwrap();
    assert_eq!((v.sigma, v.mu.clone(), v.rho), (1.0, vec![0.0; 4], -2.0));

    let z = prolong(&flat, &density(one(), JetFn::constant(0.0), &flat), &[0.2; 4]).unwrap();
    assert_eq!(z, TractorVec::zero(4, "flat"));
}

#[test]
fn closure_examples() {
    let sphere = ExprChart::sphere(4).unwrap();
    let pts = sphere.domain().sample(10, 8, 0.3);
    let r = closure_residual(&sphere, &density(one(), JetFn::constant(1.0), &sphere), &pts, 1e-9).unwrap();
    assert!(r.pass, "{r:?}");

    let flat = ExprChart::flat(3).unwrap();
    let pts = flat.domain().sample(10, 9, 0.9);
    let bowl = JetFn::new(|x| tractorlab_conformal::jet::norm_squared(x).add_const(1.0));
    assert!(closure_residual(&flat, &density(one(), bowl, &flat), &pts, 1e-10).unwrap().pass);

    let cube = JetFn::new(|x| x[0].mul(&x[0]).mul(&x[0]));
    let r = closure_residual(&flat, &density(one(), cube, &flat), &pts, 1e-10).unwrap();
    assert!(r.max > 0.1);
}

#[test]
fn thomas_d_slots() {
    for n in 3..=5 {
        let sphere = ExprChart::sphere(n).unwrap();
        let poly = ExprChart::frozen_poly(n).unwrap();
        for chart in [&sphere as &dyn MetricChart, &poly] {
            let f = |w| DensityField::new(w, JetFn::new(|x| x[0].mul(&x[1]).add(&x[2].exp())), chart.scale());
            for x in chart.domain().sample(4, n as u64, 0.4) {
                let d0 = thomas_d(chart, &f(Rational64::from_integer(0)), &x).unwrap();
                assert_eq!(d0.sigma, 0.0);
                let grad = f(Rational64::from_integer(0)).jet(&x, 1);
                for a in 0..n {
                    assert!((d0.mu[a] - (n as f64 - 2.0) * grad.d1(a)).abs() < 1e-12);
                }

                let yw = yamabe_weight(n);
                let dy = thomas_d(chart, &f(yw), &x).unwrap();
                assert_eq!(dy.sigma, 0.0);
                assert!(dy.mu.iter().all(|m| *m == 0.0));
                let y = yamabe(chart, &f(yw), &x).unwrap();
                assert!((dy.rho + y).abs() < 1e-12, "{} vs {}", dy.rho, y);
                assert_eq!(dy.weight, yw - 1);

                let d1 = thomas_d(chart, &f(one()), &x).unwrap();
                let p = prolong(chart, &f(one()), &x).unwrap();
                let nf = n as f64;
                assert!((d1.sigma - nf * p.sigma).abs() < 1e-12);
                assert!((d1.rho - nf * p.rho).abs() < 1e-11);
                for a in 0..n {
                    assert!((d1.mu[a] - nf * p.mu[a]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn yamabe_examples() {
    let flat = ExprChart::flat(4).unwrap();
    let f = JetFn::new(|x| x[0].mul(&x[0]).mul(&x[1]).add(&x[3].sin()));
    let x = [0.3, 0.2, -0.1, 0.4];
    let y = yamabe(&flat, &density(yamabe_weight(4), f, &flat), &x).unwrap();
    assert!((y - (2.0 * 0.2 - 0.4f64.sin())).abs() < 1e-14);

    let sphere = ExprChart::sphere(4).unwrap();
    for x in sphere.domain().sample(5, 2, 0.5) {
        let y = yamabe(&sphere, &density(yamabe_weight(4), JetFn::constant(1.0), &sphere), &x).unwrap();
        assert!((y + 2.0).abs() < 1e-12);
    }
    assert!(matches!(
        yamabe(&sphere, &density(one(), JetFn::constant(1.0), &sphere), &[0.0; 4]),
        Err(Error::WeightMismatch { .. })
    ));
    assert_eq!(yamabe_weight(3), Rational64::new(-1, 2));
}

fn factor() -> ConformalFactor {
    ConformalFactor::new(
        "omega",
        JetFn::new(|x| x[0].scale(0.4).add(&x[1].mul(&x[2]).scale(0.3)).exp().add(&x[1].mul(&x[1]).scale(0.2))),
    )
}

#[test]
fn invariant_operators_are_scale_natural() {
    for (chart, w) in [
        (Arc::new(ExprChart::frozen_poly(4).unwrap()) as ChartRef, Rational64::new(3, 2)),
        (Arc::new(ExprChart::frozen_poly(3).unwrap()) as ChartRef, Rational64::new(-2, 3)),
        (Arc::new(ExprChart::sphere(4).unwrap().with_domain(BoxDomain::cube(4, 0.8)).unwrap()) as ChartRef, Rational64::from_integer(0)),
    ] {
        let pts = chart.domain().sample(12, 31, 0.9);
        let r = scale_naturality(chart, &factor(), &pts, w, 1e-8).unwrap();
        assert!(r.pass(), "{r:#?}");
    }
}

#[test]
fn tractor_connection_examples() {
    let flat = ExprChart::flat(3).unwrap();
    let v0 = TractorVec::new(0.7, vec![0.2, -0.5, 0.3], 1.1, "flat");
    let x0 = [0.1, 0.0, -0.2];
    let field = ExprTractorField::flat_parallel(&x0, &v0);
    for x in flat.domain().sample(10, 3, 0.9) {
        for a in 0..3 {
            let d = tractor_connection_apply(&flat, &field, a, &x).unwrap();
            assert!(d.max_abs() < 1e-14, "{d:?}");
        }
    }
    let zero = ExprTractorField::flat_parallel(&x0, &TractorVec::zero(3, "sphere"));
    let sphere = ExprChart::sphere(3).unwrap();
    assert_eq!(tractor_connection_apply(&sphere, &zero, 1, &[0.2, 0.1, 0.0]).unwrap().max_abs(), 0.0);
    assert!(tractor_connection_apply(&sphere, &field, 0, &[0.0; 3]).is_err());
}

#[test]
fn tractor_connection_leibniz_in_density_factor() {
    let sphere = ExprChart::sphere(3).unwrap();
    let v0 = TractorVec::new(0.7, vec![0.2, -0.5, 0.3], 1.1, "sphere");
    let base = ExprTractorField::flat_parallel(&[0.0; 3], &v0);
    let f = sample_fn();
    let times = |g: &JetFn| {
        let (f, g) = (f.clone(), g.clone());
        JetFn::new(move |x| f.apply(x).mul(&g.apply(x)))
    };
    let scaled = ExprTractorField {
        sigma: times(&base.sigma),
        mu: base.mu.iter().map(times).collect(),
        rho: times(&base.rho),
        scale: "sphere".into(),
    };
    for x in sphere.domain().sample(10, 12, 0.3) {
        let xi = [0.3, -1.2, 0.8];
        let lhs = tractor_connection_along(&sphere, &scaled, &xi, &x).unwrap();
        let dv = tractor_connection_along(&sphere, &base, &xi, &x).unwrap();
        let fj = f.eval(&x, 1);
        let df: f64 = (0..3).map(|a| xi[a] * fj.d1(a)).sum();
        let (s, mu, r) = tractorlab_conformal::tractor::TractorField::jets(&base, &x, 0).unwrap();
        let mut want = dv.to_state().iter().map(|v| fj.value() * v).collect::<Vec<_>>();
        let vals: Vec<f64> = std::iter::once(s.value()).chain(mu.iter().map(Jet::value)).chain([r.value()]).collect();
        for (w, v) in want.iter_mut().zip(vals) {
            *w += df * v;
        }
        let got = lhs.to_state();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn prolonged_einstein_scales_are_parallel() {
    let sphere = ExprChart::sphere(3).unwrap();
    let flat = ExprChart::flat(3).unwrap();
    let bowl = JetFn::new(|x| tractorlab_conformal::jet::norm_squared(x).add_const(1.0));
    // σ = 2/(1 + |x|²) makes σ⁻²g flat in the sphere chart: an Einstein scale
    let flat_scale_on_sphere = JetFn::new(|x| tractorlab_conformal::jet::norm_squared(x).add_const(1.0).recip().scale(2.0));
    let cases: Vec<(&dyn MetricChart, JetFn)> =
        vec![(&sphere, JetFn::constant(1.0)), (&sphere, flat_scale_on_sphere), (&flat, bowl)];
    for (chart, s) in cases {
        let sigma = density(one(), s, chart);
        let field = ProlongedField { chart, sigma: sigma.clone() };
        for x in chart.domain().sample(8, 44, 0.4) {
            let e = einstein_operator(chart, &sigma, &x).unwrap();
            assert!(max_abs(&e) < 1e-10, "{} {e:?}", chart.scale());
            for a in 0..3 {
                let d = tractor_connection_apply(chart, &field, a, &x).unwrap();
                assert!(d.max_abs() < 1e-7, "{d:?}");
            }
        }
    }
}

#[test]
fn non_einstein_prolongation_is_not_parallel() {
    let flat = ExprChart::flat(3).unwrap();
    let sigma = density(one(), JetFn::new(|x| x[0].mul(&x[0]).add_const(1.0)), &flat);
    let field = ProlongedField { chart: &flat, sigma };
    let d = tractor_connection_apply(&flat, &field, 0, &[0.1, 0.2, 0.3]).unwrap();
    assert!(d.max_abs() > 0.1);
}
