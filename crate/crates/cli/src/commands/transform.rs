use std::sync::Arc;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use tractorlab_conformal::rescale::check_rescale_laws;
use tractorlab_conformal::tractor::standard_tractor_connection;
use tractorlab_conformal::{BoxDomain, ChartKind, ChartSpec, ConformalFactor, JetFn};
use tractorlab_core::parabolic::{
    adjoint_complex, embed_grade, restrict_grade, rho_shift, tractor_derivative_components, weyl_connection_shift,
    ConformalSlots, RhoCochain, SplitModuleVector,
};
use tractorlab_core::rational::dot;
use tractorlab_core::{q, GradedLieAlgebra, Rational, Representation};

use super::{build_chart, Outcome};
use crate::config::{CommandConfig, Tolerances};
use crate::emit::to_value;
use crate::error::CliError;

pub const LAW_SAMPLES: usize = 100;
pub const CROSS_LAYER_TRIALS: usize = 100;
const DISPLAY_TRIALS: usize = 20;

pub fn run(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    match cfg.suite_or("laws") {
        "laws" => laws(cfg),
        "cross-layer" => cross_layer(cfg),
        other => Err(CliError::Usage(format!("unknown transform-check suite `{other}`; expected laws or cross-layer"))),
    }
}

fn rq(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn random_grade(alg: &GradedLieAlgebra, g: i8, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..alg.dim()).map(|i| if alg.grade(i) == g { rq(rng) } else { Rational::zero() }).collect()
}

/// Ω = 1.2 + 0.3x₀x₁ − 0.2x₁ + 0.4x₂² + 0.25x₀²x₂.
pub fn test_factor() -> ConformalFactor {
    ConformalFactor::new(
        "omega",
        JetFn::new(|x| {
            let p = x[0].mul(&x[1]).scale(0.3).add(&x[2].mul(&x[2]).scale(0.4)).sub(&x[1].scale(0.2));
            p.add(&x[0].mul(&x[0]).mul(&x[2]).scale(0.25)).add_const(1.2)
        }),
    )
}

fn laws(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let tol = Tolerances::resolve(&[("laws", 1e-9)], &cfg.tol)?;
    let kind = cfg.chart.unwrap_or(ChartKind::Poly);
    let n = cfg.n.unwrap_or(3);
    let mut spec = ChartSpec::new(kind, n);
    if kind == ChartKind::Sphere {
        // keeps the test factor positive
        spec.domain = Some(BoxDomain::cube(n, 0.8));
    }
    let chart = build_chart(&spec)?;
    let samples = chart.domain().sample(LAW_SAMPLES, cfg.seed, 0.9);
    let w = Rational64::new(3, 2);
    let report = check_rescale_laws(chart, &test_factor(), &samples, w, tol.get("laws"))?;
    let mut out = Outcome::new("laws", Some(tol));
    out.note("chart", json!(spec));
    out.note("density_weight", json!(w.to_string()));
    out.note("samples", json!(LAW_SAMPLES));
    for r in &report.residuals {
        out.push(r.pass, json!({ "check": r.name, "residual": to_value(r) }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (name, ok) in [
        ("projective_tangent", projective_display(&mut rng)?),
        ("grassmannian_tangent", grassmannian_display(&mut rng)?),
        ("conformal_tangent", conformal_tangent_display(&mut rng)?),
        ("conformal_density", conformal_density_display(&mut rng)?),
        ("conformal_rho", conformal_rho_display(&mut rng)?),
    ] {
        out.push(ok, json!({ "check": name, "exact": true, "trials": DISPLAY_TRIALS }));
    }
    Ok(out)
}

/// ∇̂_ξη − ∇_ξη = Υ(ξ)η + Υ(η)ξ.
fn projective_display(rng: &mut ChaCha8Rng) -> Result<bool, CliError> {
    let alg = Arc::new(GradedLieAlgebra::projective(3)?);
    let tangent = Representation::tangent(&alg);
    let mut ok = true;
    for _ in 0..DISPLAY_TRIALS {
        let u = random_grade(&alg, 1, rng);
        let xi = random_grade(&alg, -1, rng);
        let eta = restrict_grade(&alg, -1, &random_grade(&alg, -1, rng))?;
        let got = weyl_connection_shift(&tangent, &u, &xi, &eta)?;
        let ul = restrict_grade(&alg, 1, &u)?;
        let xl = restrict_grade(&alg, -1, &xi)?;
        let (ue, ux) = (dot(&ul, &eta), dot(&ul, &xl));
        ok &= (0..3).all(|t| got[t] == &ue * &xl[t] + &ux * &eta[t]);
    }
    Ok(ok)
}

/// The shift on Hom(S, Q) for Gr(2, 5), written in index form.
fn grassmannian_display(rng: &mut ChaCha8Rng) -> Result<bool, CliError> {
    let (p, qq) = (2, 3);
    let alg = Arc::new(GradedLieAlgebra::grassmannian(p, qq)?);
    let tangent = Representation::tangent(&alg);
    let mut ok = true;
    for _ in 0..DISPLAY_TRIALS {
        let u = random_grade(&alg, 1, rng);
        let xi = random_grade(&alg, -1, rng);
        let eta = random_grade(&alg, -1, rng);
        let got = weyl_connection_shift(&tangent, &u, &xi, &restrict_grade(&alg, -1, &eta)?)?;
        let got = alg.to_matrix(&embed_grade(&alg, -1, &got)?)?;
        let (um, xm, ym) = (alg.to_matrix(&u)?, alg.to_matrix(&xi)?, alg.to_matrix(&eta)?);
        for a in 0..qq {
            for b in 0..p {
                let mut want = Rational::zero();
                for c in 0..p {
                    for d in 0..qq {
                        let uu = um.get(c, p + d);
                        want += xm.get(p + a, c) * &uu * ym.get(p + d, b);
                        want += ym.get(p + a, c) * &uu * xm.get(p + d, b);
                    }
                }
                ok &= got.get(p + a, b) == want;
            }
        }
    }
    Ok(ok)
}

/// ∇̂_ξη − ∇_ξη = Υ(ξ)η + Υ(η)ξ − g(ξ, η)Υ♯ in an orthonormal frame.
fn conformal_tangent_display(rng: &mut ChaCha8Rng) -> Result<bool, CliError> {
    let n = 4;
    let alg = Arc::new(GradedLieAlgebra::conformal(n)?);
    let tangent = Representation::tangent(&alg);
    let mut ok = true;
    for _ in 0..DISPLAY_TRIALS {
        let u = random_grade(&alg, 1, rng);
        let xi = random_grade(&alg, -1, rng);
        let eta = restrict_grade(&alg, -1, &random_grade(&alg, -1, rng))?;
        let got = weyl_connection_shift(&tangent, &u, &xi, &eta)?;
        let ul = restrict_grade(&alg, 1, &u)?;
        let xl = restrict_grade(&alg, -1, &xi)?;
        let (ue, ux, xe) = (dot(&ul, &eta), dot(&ul, &xl), dot(&xl, &eta));
        ok &= (0..n).all(|t| got[t] == &ux * &eta[t] + &ue * &xl[t] - &xe * &ul[t]);
    }
    Ok(ok)
}

/// On densities of weight w the shift is w·Υ(ξ).
fn conformal_density_display(rng: &mut ChaCha8Rng) -> Result<bool, CliError> {
    let alg = Arc::new(GradedLieAlgebra::conformal(4)?);
    let mut ok = true;
    for w in [q(1, 1), q(-1, 1), q(3, 2), q(0, 1)] {
        let rep = Representation::density(&alg, w.clone());
        for _ in 0..DISPLAY_TRIALS {
            let u = random_grade(&alg, 1, rng);
            let xi = random_grade(&alg, -1, rng);
            let s = rq(rng);
            let got = weyl_connection_shift(&rep, &u, &xi, std::slice::from_ref(&s))?;
            let ux = dot(&restrict_grade(&alg, 1, &u)?, &restrict_grade(&alg, -1, &xi)?);
            ok &= got == vec![&w * &ux * &s];
        }
    }
    Ok(ok)
}

/// With Ρ = −P: P̂(ξ) = P(ξ) − ∇_ξΥ + Υ(ξ)Υ − ½|Υ|²ξ♭.
fn conformal_rho_display(rng: &mut ChaCha8Rng) -> Result<bool, CliError> {
    let n = 4;
    let alg = Arc::new(GradedLieAlgebra::conformal(n)?);
    let c = adjoint_complex(&alg)?;
    let mut ok = true;
    for _ in 0..DISPLAY_TRIALS {
        let rho = RhoCochain {
            coeffs: c
                .space(1)
                .homogeneity()
                .iter()
                .map(|h| if *h == Rational::from(2) { rq(rng) } else { Rational::zero() })
                .collect(),
        };
        let u = random_grade(&alg, 1, rng);
        let xi = random_grade(&alg, -1, rng);
        let nabla_u = random_grade(&alg, 1, rng);
        let out = restrict_grade(&alg, 1, &rho_shift(&alg, &u, &xi, &nabla_u, &rho)?)?;
        let p_old: Vec<Rational> = restrict_grade(&alg, 1, &rho.apply(&alg, &xi)?)?.iter().map(|v| -v).collect();
        let ul = restrict_grade(&alg, 1, &u)?;
        let xl = restrict_grade(&alg, -1, &xi)?;
        let nl = restrict_grade(&alg, 1, &nabla_u)?;
        let (ux, uu) = (dot(&ul, &xl), dot(&ul, &ul));
        let half = q(1, 2);
        ok &= (0..n).all(|b| {
            let p_new = &p_old[b] - &nl[b] + &ux * &ul[b] - &half * &uu * &xl[b];
            out[b] == -p_new
        });
    }
    Ok(ok)
}

fn cross_layer(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::new("cross-layer", None);
    let mut matched = 0usize;
    let mut first_mismatch = None;
    for trial in 0..CROSS_LAYER_TRIALS {
        let n = cfg.n.unwrap_or(3 + trial % 3);
        let alg = Arc::new(GradedLieAlgebra::conformal(n)?);
        let rep = Representation::standard(&alg);
        let slots = ConformalSlots::new(n);
        let vec_n = |rng: &mut ChaCha8Rng| (0..n).map(|_| rq(rng)).collect::<Vec<_>>();
        let xi = vec_n(&mut rng);
        let (sigma, rho, dsig, drho) = (rq(&mut rng), rq(&mut rng), rq(&mut rng), rq(&mut rng));
        let (mu, dmu) = (vec_n(&mut rng), vec_n(&mut rng));
        let mut p = vec![vec![Rational::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let v = rq(&mut rng);
                p[a][b] = v.clone();
                p[b][a] = v;
            }
        }
        let delta: Vec<Vec<Rational>> =
            (0..n).map(|a| (0..n).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect()).collect();
        let (top, mid, bot) =
            standard_tractor_connection(&xi, &delta, &delta, &p, (&sigma, &mu, &rho), (&dsig, &dmu, &drho));

        // Ρ(ξ) = −P(ξ, ·)
        let rho_xi: Vec<Rational> = (0..n).map(|b| -(0..n).map(|a| &xi[a] * &p[a][b]).sum::<Rational>()).collect();
        let v = SplitModuleVector::split(&rep, &slots.to_module(&sigma, &mu, &rho))?;
        let dv = SplitModuleVector::split(&rep, &slots.to_module(&dsig, &dmu, &drho))?;
        let d = tractor_derivative_components(
            &rep,
            &embed_grade(&alg, -1, &xi)?,
            &v,
            &dv,
            &embed_grade(&alg, 1, &rho_xi)?,
        )?;
        let (s2, m2, r2) = slots.from_module(&d.to_full());
        if s2 == top && m2 == mid && r2 == bot {
            matched += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(json!({
                "trial": trial,
                "algebraic": { "sigma": s2, "mu": m2, "rho": r2 },
                "chart": { "sigma": top, "mu": mid, "rho": bot },
            }));
        }
    }
    out.push(
        matched == CROSS_LAYER_TRIALS,
        json!({
            "check": "standard_tractor_connection",
            "trials": CROSS_LAYER_TRIALS,
            "matched": matched,
            "first_mismatch": first_mismatch,
        }),
    );
    Ok(out)
}
