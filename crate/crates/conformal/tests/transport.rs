use num_rational::Rational64;
use tractorlab_conformal::tractor::{deviation_from_identity, holonomy_study, transport_matrix, CircleArc};
use tractorlab_conformal::*;

fn flat_closed_form(v0: &TractorVec, dx: &[f64]) -> TractorVec {
    let md: f64 = v0.mu.iter().zip(dx).map(|(m, d)| m * d).sum();
    let d2: f64 = dx.iter().map(|d| d * d).sum();
    TractorVec::new(
        v0.sigma + md - 0.5 * v0.rho * d2,
        v0.mu.iter().zip(dx).map(|(m, d)| m - v0.rho * d).collect(),
        v0.rho,
        v0.scale.clone(),
    )
}

#[test]
fn flat_transport_matches_cone_closed_form() {
    let flat = ExprChart::flat(3).unwrap();
    let v0 = TractorVec::new(0.4, vec![1.0, -0.3, 0.2], -0.8, "flat");
    let a = [-0.5, 0.2, 0.1];
    for b in flat.domain().sample(10, 5, 0.9) {
        let v = parallel_transport(&flat, &Segment::new(&a, &b), &v0, 0.05).unwrap();
        let dx: Vec<f64> = b.iter().zip(&a).map(|(p, q)| p - q).collect();
        assert!(v.max_abs_diff(&flat_closed_form(&v0, &dx)) < 1e-10);
    }
    let z = parallel_transport(&flat, &Segment::new(&a, &[0.3, 0.3, 0.3]), &TractorVec::zero(3, "flat"), 0.01).unwrap();
    assert_eq!(z.max_abs(), 0.0);
}

#[test]
fn rk4_converges_at_fourth_order_on_an_arc() {
    let flat = ExprChart::flat(3).unwrap();
    let v0 = TractorVec::new(0.4, vec![1.0, -0.3, 0.2], -0.8, "flat");
    let arc = CircleArc { center: vec![0.0, 0.0, 0.1], radius: 0.9, axes: (0, 1), start: -0.3, end: 2.4 };
    let dx: Vec<f64> = arc.point(1.0).iter().zip(arc.point(0.0)).map(|(p, q)| p - q).collect();
    let exact = flat_closed_form(&v0, &dx);
    let hs = [1e-2, 5e-3, 2.5e-3];
    let errs: Vec<f64> =
        hs.iter().map(|&h| parallel_transport(&flat, &arc, &v0, h).unwrap().max_abs_diff(&exact)).collect();
    let slope = loglog_slope(&hs, &errs);
    assert!((slope - 4.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
}

#[test]
fn sphere_transport_preserves_tractor_metric() {
    let sphere = ExprChart::sphere(3).unwrap();
    let v0 = TractorVec::new(0.9, vec![0.3, -0.6, 0.2], 0.7, "sphere");
    let arc = CircleArc { center: vec![0.0, 0.0, 0.2], radius: 0.5, axes: (0, 1), start: -0.6, end: 2.5 };
    let seg = Segment::new(&[0.4, -0.3, 0.2], &[-0.7, 0.5, -0.4]);
    for curve in [&seg as &dyn Curve, &arc] {
        let q0 = v0.metric(&curvature_suite(&sphere, &curve.point(0.0)).unwrap().ginv);
        let v = parallel_transport(&sphere, curve, &v0, 1e-3).unwrap();
        let q1 = v.metric(&curvature_suite(&sphere, &curve.point(1.0)).unwrap().ginv);
        assert!((q1 - q0).abs() < 1e-8, "{q0} -> {q1}");
        assert!(v.max_abs_diff(&v0) > 1e-2);
    }
}

#[test]
fn transport_errors() {
    let sphere = ExprChart::sphere(3).unwrap();
    let v0 = TractorVec::zero(3, "sphere");
    assert!(matches!(
        parallel_transport(&sphere, &Segment::new(&[0.0; 3], &[3.0, 0.0, 0.0]), &v0, 0.01),
        Err(Error::OutsideDomain { .. })
    ));
    assert!(parallel_transport(&sphere, &Segment::new(&[0.0; 3], &[1.0, 0.0, 0.0]), &TractorVec::zero(4, "sphere"), 0.01).is_err());
    assert!(parallel_transport(&sphere, &Segment::new(&[0.0; 3], &[1.0, 0.0, 0.0]), &v0, 0.0).is_err());
}

#[test]
fn transport_matrix_is_invertible_and_reverses() {
    let poly = ExprChart::frozen_poly(3).unwrap();
    let (a, b) = ([0.1, -0.2, 0.3], [-0.3, 0.25, -0.1]);
    let fwd = transport_matrix(&poly, &Segment::new(&a, &b), 1e-2).unwrap();
    let back = transport_matrix(&poly, &Segment::new(&b, &a), 1e-2).unwrap();
    let m = fwd.len();
    let prod: Vec<Vec<f64>> =
        (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| back[i][k] * fwd[k][j]).sum()).collect()).collect();
    assert!(deviation_from_identity(&prod) < 1e-9);
}

#[test]
fn flat_holonomy_is_identity() {
    let flat = ExprChart::flat(3).unwrap();
    for (corner, side) in [([0.1, 0.2, -0.3], 0.1), ([-0.5, 0.0, 0.4], 0.3)] {
        let m = holonomy_loop(&flat, &Polygon::square(&corner, (0, 2), side), side / 8.0).unwrap();
        assert!(deviation_from_identity(&m) <= 1e-10);
    }
}

#[test]
fn sphere_holonomy_vanishes_faster_than_area() {
    let sphere = ExprChart::sphere(3).unwrap();
    let sides = [0.1, 0.05, 0.025];
    let dev = holonomy_study(&sphere, &[0.2, -0.1, 0.15], (0, 1), &sides, 8).unwrap();
    let slope = loglog_slope(&sides, &dev);
    assert!(slope >= 2.5, "slope {slope}, deviations {dev:?}");
}

#[test]
fn curved_holonomy_scales_with_area() {
    let poly = ExprChart::frozen_poly(3).unwrap();
    let sides = [0.1, 0.05, 0.025];
    let dev = holonomy_study(&poly, &[0.05, -0.1, 0.1], (0, 1), &sides, 8).unwrap();
    let slope = loglog_slope(&sides, &dev);
    assert!((slope - 2.0).abs() < 0.2, "slope {slope}, deviations {dev:?}");
}

#[test]
fn recover_constant_scale_on_sphere() {
    let sphere = ExprChart::sphere(3).unwrap();
    let base = [0.0; 3];
    let sigma = DensityField::new(Rational64::from_integer(1), JetFn::constant(1.0), "sphere");
    let v0 = prolong(&sphere, &sigma, &base).unwrap();
    let samples = sphere.domain().sample(6, 21, 0.2);
    let r = einstein_recover(&sphere, &base, &v0, &samples, &RecoverOptions::default()).unwrap();
    for s in &r.sigma {
        assert!((s - 1.0).abs() < 1e-8, "{s}");
    }
    assert!(r.residual.pass, "{:?}", r.residual);
}

#[test]
fn recover_conical_scale_on_sphere() {
    let sphere = ExprChart::sphere(3).unwrap();
    let base = [0.0; 3];
    let v0 = TractorVec::new(1.0, vec![0.4, 0.0, -0.2], -0.5, "sphere");
    let samples = sphere.domain().sample(6, 22, 0.2);
    let r = einstein_recover(&sphere, &base, &v0, &samples, &RecoverOptions::default()).unwrap();
    let spread = r.sigma.iter().fold(0.0f64, |m, s| m.max((s - r.sigma[0]).abs()));
    assert!(spread > 1e-2);
    assert!(r.residual.pass, "{:?}", r.residual);
}

#[test]
fn recover_constant_on_flat() {
    let flat = ExprChart::flat(3).unwrap();
    let v0 = TractorVec::new(1.0, vec![0.0; 3], 0.0, "flat");
    let samples = flat.domain().sample(4, 23, 0.5);
    let r = einstein_recover(&flat, &[0.0; 3], &v0, &samples, &RecoverOptions { tol: 1e-10, ..Default::default() }).unwrap();
    assert!(r.sigma.iter().all(|s| (s - 1.0).abs() < 1e-14));
    assert!(r.residual.pass, "{:?}", r.residual);
}

#[test]
fn recover_refuses_curved_tractor_connection() {
    let poly = ExprChart::frozen_poly(3).unwrap();
    let v0 = TractorVec::new(1.0, vec![0.0; 3], -0.5, "poly");
    let samples = vec![vec![0.1, 0.1, 0.1]];
    assert!(matches!(
        einstein_recover(&poly, &[0.0; 3], &v0, &samples, &RecoverOptions::default()),
        Err(Error::NotFlat { .. })
    ));
}
