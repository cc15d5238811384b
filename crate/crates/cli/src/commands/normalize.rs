use std::sync::Arc;

use serde_json::json;
use tractorlab_core::linalg;
use tractorlab_core::parabolic::{
    adjoint_complex, codifferential_as_trace, normalize_rho, normalize_rho_with_sign, round_sphere_curvature,
    NormalizationSign,
};
use tractorlab_core::{q, GradedLieAlgebra, RatMatrix, Rational};

use super::Outcome;
use crate::config::CommandConfig;
use crate::error::CliError;

/// c·I_n as nested rows.
pub fn scalar_matrix(n: usize, c: &Rational) -> Vec<Vec<Rational>> {
    (0..n).map(|a| (0..n).map(|b| if a == b { c.clone() } else { Rational::zero() }).collect()).collect()
}

fn dims(cfg: &CommandConfig) -> Vec<usize> {
    match cfg.n {
        Some(n) => vec![n],
        None => (3..=5).collect(),
    }
}

pub fn run(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    match cfg.suite_or("sphere") {
        "sphere" => sphere(cfg),
        "trace" => trace(cfg),
        other => Err(CliError::Usage(format!("unknown normalize suite `{other}`; expected sphere or trace"))),
    }
}

/// Ρ for the round sphere under both signs of the normalization equation.
pub fn sphere_candidates(n: usize) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>), CliError> {
    let c = adjoint_complex(&Arc::new(GradedLieAlgebra::conformal(n)?))?;
    let alg = c.algebra().clone();
    let r = round_sphere_curvature(&c)?;
    let minus = normalize_rho_with_sign(&c, &r, NormalizationSign::Minus)?.bilinear(&alg);
    let plus = normalize_rho_with_sign(&c, &r, NormalizationSign::Plus)?.bilinear(&alg);
    Ok((minus, plus))
}

fn sphere(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("sphere", None);
    out.note("sign", json!(NormalizationSign::Minus));
    for n in dims(cfg) {
        let c = adjoint_complex(&Arc::new(GradedLieAlgebra::conformal(n)?))?;
        let alg = c.algebra().clone();
        let r = round_sphere_curvature(&c)?;
        let rho = normalize_rho(&c, &r)?;
        let b = rho.bilinear(&alg);
        // the sphere has P = ½g in an orthonormal frame
        let minus_schouten = b == scalar_matrix(n, &q(-1, 2));
        let d1 = &c.coboundary(1)?.matrix;
        let corrected: Vec<Rational> = r.iter().zip(d1.apply(&rho.coeffs)).map(|(a, b)| a + &b).collect();
        let ds = &c.codifferential(2)?.matrix;
        let coclosed = ds.apply(&corrected).iter().all(Rational::is_zero);
        let aug = ds.hstack(&RatMatrix::from_columns(ds.nrows(), std::slice::from_ref(&rho.coeffs)));
        let in_image = linalg::rank(&aug) == linalg::rank(ds);
        let (_, plus) = sphere_candidates(n)?;
        out.push(
            minus_schouten && coclosed && in_image,
            json!({
                "n": n,
                "rho": b,
                "rho_is_minus_schouten": minus_schouten,
                "rho_opposite_sign": plus,
                "curvature_coclosed": coclosed,
                "rho_in_im_dstar": in_image,
            }),
        );
    }
    Ok(out)
}

fn trace(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new("trace", None);
    let multiple = q(-1, 2);
    out.note("ricci_multiple", json!(multiple));
    for n in dims(cfg) {
        let c = adjoint_complex(&Arc::new(GradedLieAlgebra::conformal(n)?))?;
        let r = round_sphere_curvature(&c)?;
        let b = codifferential_as_trace(&c, &r)?;
        let ric = Rational::from((n - 1) as i64);
        let is_trace = b == scalar_matrix(n, &(&multiple * &ric)) && b != scalar_matrix(n, &Rational::zero());
        let harmonic = c.harmonic_basis(2)?;
        let mut weyl_type = 0;
        let mut vanishes = true;
        for h in harmonic {
            if h.homogeneity == Rational::from(2) {
                weyl_type += 1;
                vanishes &= codifferential_as_trace(&c, &h.coeffs)? == scalar_matrix(n, &Rational::zero());
            }
        }
        // no Weyl-type harmonic curvature exists when n = 3
        out.push(
            is_trace && vanishes && (weyl_type > 0 || n == 3),
            json!({
                "n": n,
                "dstar_curvature": b,
                "ricci": scalar_matrix(n, &ric),
                "is_multiple_of_ricci": is_trace,
                "harmonic_homogeneity_2": weyl_type,
                "vanishes_on_harmonic": vanishes,
            }),
        );
    }
    Ok(out)
}
