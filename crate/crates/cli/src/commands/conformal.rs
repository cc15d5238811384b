use num_rational::Rational64;
use serde_json::json;
use tractorlab_conformal::bianchi::bianchi_checks;
use tractorlab_conformal::density::yamabe_weight;
use tractorlab_conformal::rescale::scale_naturality;
use tractorlab_conformal::tractor::{deviation_from_identity, holonomy_study};
use tractorlab_conformal::{
    holonomy_loop, loglog_slope, thomas_d, yamabe, BoxDomain, ChartKind, ChartRef, ChartSpec, ConformalFactor,
    DensityField, JetFn, MetricChart, Polygon,
};

use super::{build_chart, max_abs, worse, Outcome};
use crate::config::{CommandConfig, Tolerances};
use crate::emit::to_value;
use crate::error::CliError;

pub const HOLONOMY_SIDES: [f64; 3] = [0.1, 0.05, 0.025];
const STEPS_PER_SIDE: usize = 8;

pub fn run(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    match cfg.suite_or("holonomy") {
        "holonomy" => holonomy(cfg),
        "operators" => operators(cfg),
        "bianchi" => bianchi(cfg),
        other => {
            Err(CliError::Usage(format!("unknown conformal-check suite `{other}`; expected holonomy, operators or bianchi")))
        }
    }
}

fn corner(n: usize) -> Vec<f64> {
    let base = [0.2, -0.1, 0.15];
    (0..n).map(|i| base.get(i).copied().unwrap_or(0.05)).collect()
}

fn holonomy(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let tol = Tolerances::resolve(&[("slope", 2.5), ("flat", 1e-10), ("area_band", 0.2)], &cfg.tol)?;
    let kind = cfg.chart.unwrap_or(ChartKind::Sphere);
    let n = cfg.n.unwrap_or(3);
    let chart = build_chart(&ChartSpec::new(kind, n))?;
    let x0 = corner(n);
    let dev = holonomy_study(chart.as_ref(), &x0, (0, 1), &HOLONOMY_SIDES, STEPS_PER_SIDE)?;
    let slope = loglog_slope(&HOLONOMY_SIDES, &dev);
    let mut out = Outcome::new("holonomy", Some(tol.clone()));
    let study = json!({ "chart": kind, "n": n, "corner": x0, "sides": HOLONOMY_SIDES, "deviation": dev, "slope": slope });
    match kind {
        // the tractor connection of the round sphere is flat: faster than area
        ChartKind::Sphere => out.push(slope >= tol.get("slope"), json!({ "check": "decay_slope", "study": study })),
        // a generic metric: holonomy of a small loop scales with its area
        ChartKind::Poly => {
            out.push((slope - 2.0).abs() <= tol.get("area_band"), json!({ "check": "area_slope", "study": study }))
        }
        ChartKind::Flat => {}
    }
    let flat = build_chart(&ChartSpec::new(ChartKind::Flat, n))?;
    let mut worst = 0.0f64;
    for (c, side) in [(x0.clone(), 0.1), (vec![-0.5; n], 0.3)] {
        let m = holonomy_loop(flat.as_ref(), &Polygon::square(&c, (0, n - 1), side), side / STEPS_PER_SIDE as f64)?;
        let d = deviation_from_identity(&m);
        worst = worse(worst, d);
    }
    out.push(worst <= tol.get("flat"), json!({ "check": "flat_chart", "n": n, "max_deviation": worst }));
    Ok(out)
}

fn probe_density(w: Rational64, chart: &dyn MetricChart) -> DensityField {
    DensityField::new(w, JetFn::new(|x| x[0].mul(&x[1]).add(&x[2].exp())), chart.scale())
}

fn operator_factor() -> ConformalFactor {
    ConformalFactor::new(
        "omega",
        JetFn::new(|x| x[0].scale(0.4).add(&x[1].mul(&x[2]).scale(0.3)).exp().add(&x[1].mul(&x[1]).scale(0.2))),
    )
}

fn operators(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let tol = Tolerances::resolve(&[("slots", 1e-12), ("covariance", 1e-8)], &cfg.tol)?;
    let kind = cfg.chart.unwrap_or(ChartKind::Poly);
    let n = cfg.n.unwrap_or(4);
    let mut spec = ChartSpec::new(kind, n);
    if kind == ChartKind::Sphere {
        spec.domain = Some(BoxDomain::cube(n, 0.8));
    }
    let chart: ChartRef = build_chart(&spec)?;
    let pts = chart.domain().sample(8, cfg.seed, 0.4);
    let mut out = Outcome::new("operators", Some(tol.clone()));
    out.note("chart", json!(spec));

    let f0 = probe_density(Rational64::from_integer(0), chart.as_ref());
    let yw = yamabe_weight(n);
    let fy = probe_density(yw, chart.as_ref());
    let (mut top0, mut top_y, mut bottom) = (0.0f64, 0.0f64, 0.0f64);
    for x in &pts {
        let d0 = thomas_d(chart.as_ref(), &f0, x)?;
        top0 = worse(top0, d0.sigma.abs());
        let dy = thomas_d(chart.as_ref(), &fy, x)?;
        top_y = worse(worse(top_y, dy.sigma.abs()), max_abs(&dy.mu));
        let y = yamabe(chart.as_ref(), &fy, x)?;
        // bottom slot is −Y f in this sign convention
        bottom = worse(bottom, (dy.rho + y).abs());
    }
    let t = tol.get("slots");
    out.push(top0 <= t, json!({ "check": "weight_zero_top_slot", "weight": "0", "max_top": top0 }));
    out.push(
        top_y <= t,
        json!({ "check": "yamabe_weight_top_two_slots", "weight": yw.to_string(), "max_top_two": top_y }),
    );
    out.push(
        bottom <= t,
        json!({ "check": "bottom_slot_is_yamabe", "bottom_over_yamabe": "-1", "max_residual": bottom }),
    );

    let cov_pts = chart.domain().sample(12, cfg.seed.wrapping_add(1), 0.9);
    let nat = scale_naturality(chart, &operator_factor(), &cov_pts, Rational64::new(3, 2), tol.get("covariance"))?;
    for r in &nat.residuals {
        out.push(r.pass, json!({ "check": format!("covariance_{}", r.name), "residual": to_value(r) }));
    }
    Ok(out)
}

fn bianchi(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let tol = Tolerances::resolve(&[("bianchi", 1e-7)], &cfg.tol)?;
    let kind = cfg.chart.unwrap_or(ChartKind::Poly);
    let ns: Vec<usize> = match cfg.n {
        Some(n) => vec![n],
        None => vec![3, 4],
    };
    let mut out = Outcome::new("bianchi", Some(tol.clone()));
    for n in ns {
        let chart = build_chart(&ChartSpec::new(kind, n))?;
        let pts = chart.domain().sample(6, cfg.seed, 0.9);
        let r = bianchi_checks(chart.as_ref(), &pts, tol.get("bianchi"))?;
        for res in &r.residuals {
            out.push(res.pass, json!({ "check": res.name, "chart": kind, "n": n, "residual": to_value(res) }));
        }
    }
    Ok(out)
}
