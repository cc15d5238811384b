use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tractorlab_core::parabolic::NormalizationSign;
use tractorlab_core::{q, AlgebraKind};

use super::cohomology::adjoint_summary;
use super::normalize::sphere_candidates;
use super::Outcome;
use crate::config::{AlgebraSpec, CommandConfig};
use crate::emit::canonical_json;
use crate::error::CliError;

pub const FIXTURE_ENV: &str = "TRACTORLAB_FIXTURES";
pub const FIXTURE_FILES: [&str; 3] = ["cohomology.json", "normalization.json", "flat_tractor.json"];

pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("fixtures"))
}

pub fn cohomology_fixture() -> Result<Value, CliError> {
    let mut conformal = Vec::new();
    for n in 3..=5 {
        let spec = AlgebraSpec::new(AlgebraKind::Conformal, &[n]);
        conformal.push(json!({ "n": n, "H1": adjoint_summary(&spec, 1)?, "H2": adjoint_summary(&spec, 2)? }));
    }
    let mut projective = Vec::new();
    for n in [2, 3] {
        projective.push(adjoint_summary(&AlgebraSpec::new(AlgebraKind::Projective, &[n]), 1)?);
    }
    Ok(json!({
        "conformal_adjoint": conformal,
        "grassmannian_3_3_H2": adjoint_summary(&AlgebraSpec::new(AlgebraKind::Grassmannian, &[3, 3]), 2)?,
        "projective_adjoint_H1": projective,
    }))
}

pub fn normalization_fixture() -> Result<Value, CliError> {
    let mut candidates = serde_json::Map::new();
    for n in 3..=5 {
        let (minus, plus) = sphere_candidates(n)?;
        candidates.insert(n.to_string(), json!({ "minus": minus, "plus": plus }));
    }
    Ok(json!({
        "sign": NormalizationSign::Minus,
        "sphere_rho_candidates": candidates,
        "sphere_schouten_multiple": q(1, 2),
        "dstar_ricci_multiple": q(-1, 2),
    }))
}

/// Transport along a straight segment of the flat chart, in closed form.
pub fn flat_closed_form(sigma: f64, mu: &[f64], rho: f64, dx: &[f64]) -> Vec<f64> {
    let md: f64 = mu.iter().zip(dx).map(|(m, d)| m * d).sum();
    let d2: f64 = dx.iter().map(|d| d * d).sum();
    let mut out = vec![sigma + md - 0.5 * rho * d2];
    out.extend(mu.iter().zip(dx).map(|(m, d)| m - rho * d));
    out.push(rho);
    out
}

pub fn flat_tractor_fixture(seed: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3;
    let mut cases = Vec::new();
    for _ in 0..4 {
        let mut r = |s: f64| (rng.gen_range(-1.0..1.0) * s * 1e3).round() / 1e3;
        let sigma = r(1.0);
        let mu: Vec<f64> = (0..n).map(|_| r(1.0)).collect();
        let rho = r(1.0);
        let from: Vec<f64> = (0..n).map(|_| r(0.5)).collect();
        let to: Vec<f64> = (0..n).map(|_| r(0.5)).collect();
        let dx: Vec<f64> = to.iter().zip(&from).map(|(b, a)| b - a).collect();
        cases.push(json!({
            "from": from,
            "to": to,
            "start": { "sigma": sigma, "mu": mu, "rho": rho },
            "end": flat_closed_form(sigma, &mu, rho, &dx),
        }));
    }
    json!({
        "n": n,
        "layout": ["sigma", "mu", "rho"],
        "closed_form": {
            "sigma": "sigma0 + mu0.dx - rho0 |dx|^2 / 2",
            "mu": "mu0 - rho0 dx",
            "rho": "rho0",
        },
        "cases": cases,
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, canonical_json(v)).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn run(cfg: &CommandConfig) -> Result<Outcome, CliError> {
    let dir = fixture_dir();
    let existing: Vec<String> =
        FIXTURE_FILES.iter().filter(|f| dir.join(f).exists()).map(|f| dir.join(f).display().to_string()).collect();
    if !existing.is_empty() && !cfg.force {
        return Err(CliError::Usage(format!("refusing to overwrite {} without --force", existing.join(", "))));
    }
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let docs = [cohomology_fixture()?, normalization_fixture()?, flat_tractor_fixture(cfg.seed)];
    let mut out = Outcome::new("fixtures", None);
    for (name, doc) in FIXTURE_FILES.iter().zip(&docs) {
        write(&dir, name, doc)?;
        out.push(true, json!({ "file": dir.join(name).display().to_string() }));
    }
    out.note("overwrote", json!(existing));
    Ok(out)
}
