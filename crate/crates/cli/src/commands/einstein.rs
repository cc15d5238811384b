use num_rational::Rational64;
use serde_json::json;
use tractorlab_conformal::jet::norm_squared;
use tractorlab_conformal::tractor::ProlongedField;
use tractorlab_conformal::{
    closure_residual, einstein_operator, einstein_recover, prolong, tractor_connection_apply, ChartKind, ChartSpec,
    DensityField, Error as NumError, JetFn, RecoverOptions,
};

use super::{build_chart, max_abs, worse, Outcome};
use crate::config::{CommandConfig, Tolerances};
use crate::emit::to_value;
use crate::error::CliError;

pub const RECOVER_STEP: f64 = 1e-3;

/// Known Einstein scales of weight one on the model charts.
pub fn einstein_scales(kind: ChartKind) -> Vec<(&'static str, JetFn)> {
    match kind {
        ChartKind::Sphere => vec![
            ("constant", JetFn::constant(1.0)),
            // σ⁻²g is the flat metric
            ("stereographic", JetFn::new(|x| norm_squared(x).add_const(1.0).recip().scale(2.0))),
        ],
        ChartKind::Flat => vec![
            ("constant", JetFn::constant(1.0)),
            ("bowl", JetFn::new(|x| norm_squared(x).add_const(1.0))),
        ],
        ChartKind::Poly => Vec::new(),
    }
}

pub fn run(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    if let Some(s) = cfg.suite.as_deref() {
        if s != "recover" {
            return Err(CliError::Usage(format!("unknown einstein-solve suite `{s}`; expected recover")));
        }
    }
    let tol = Tolerances::resolve(&[("sigma", 1e-8), ("einstein", 1e-6), ("parallel", 1e-7), ("closure", 1e-9)], &cfg.tol)?;
    let kind = cfg.chart.unwrap_or(ChartKind::Sphere);
    let n = cfg.n.unwrap_or(3);
    let chart = build_chart(&ChartSpec::new(kind, n))?;
    let c = chart.as_ref();
    let mut out = Outcome::new("recover", Some(tol.clone()));
    out.note("chart", json!({ "chart": kind, "n": n }));
    out.note("step", json!(RECOVER_STEP));

    let one = Rational64::from_integer(1);
    let base = c.domain().center();
    let sigma = DensityField::new(one, JetFn::constant(1.0), c.scale());
    let v0 = prolong(c, &sigma, &base)?;
    let samples = c.domain().sample(6, cfg.seed, 0.2);
    let opts = RecoverOptions { h: RECOVER_STEP, tol: tol.get("einstein"), ..Default::default() };
    match einstein_recover(c, &base, &v0, &samples, &opts) {
        Ok(r) => {
            let err = r.sigma.iter().fold(0.0, |m, s| worse(m, (s - 1.0).abs()));
            let ok = err <= tol.get("sigma") && r.residual.pass;
            let expected_einstein = kind != ChartKind::Poly;
            out.push(
                ok || !expected_einstein,
                json!({
                    "check": "recover_constant_scale",
                    "asserted": expected_einstein,
                    "max_sigma_error": err,
                    "probe_deviation": r.probe_deviation,
                    "residual": to_value(&r.residual),
                    "recovered_sigma": r.sigma,
                }),
            );
        }
        // only flat tractor regions are covered by the correspondence
        Err(NumError::NotFlat { point, deviation }) if kind == ChartKind::Poly => out.push(
            true,
            json!({ "check": "recover_constant_scale", "asserted": false, "not_flat_at": point, "deviation": deviation }),
        ),
        Err(e) => return Err(e.into()),
    }

    let pts = c.domain().sample(8, cfg.seed.wrapping_add(1), 0.4);
    for (name, s) in einstein_scales(kind) {
        let sigma = DensityField::new(one, s, c.scale());
        let field = ProlongedField { chart: c, sigma: sigma.clone() };
        let (mut worst, mut einstein) = (0.0f64, 0.0f64);
        for x in &pts {
            einstein = worse(einstein, max_abs(&einstein_operator(c, &sigma, x)?));
            for a in 0..n {
                worst = worse(worst, tractor_connection_apply(c, &field, a, x)?.max_abs());
            }
        }
        out.push(
            worst <= tol.get("parallel"),
            json!({ "check": "prolonged_is_parallel", "scale": name, "max_derivative": worst, "einstein_operator": einstein }),
        );
        let cl = closure_residual(c, &sigma, &pts, tol.get("closure"))?;
        out.push(cl.pass, json!({ "check": "closure", "scale": name, "residual": to_value(&cl) }));
    }
    Ok(out)
}
