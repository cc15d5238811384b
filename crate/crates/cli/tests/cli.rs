use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::{json, Value};
use tractorlab::commands::fixtures::{flat_tractor_fixture, FIXTURE_ENV, FIXTURE_FILES};
use tractorlab::*;
use tractorlab_conformal::tractor::Segment;
use tractorlab_conformal::{parallel_transport, ExprChart, TractorVec};
use tractorlab_core::AlgebraKind;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tractorlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn repo_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(&["nonsense-cmd"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(dispatch(["tractorlab", "nonsense-cmd"]), EXIT_USAGE);
    assert_eq!(dispatch(["tractorlab"]), EXIT_USAGE);
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        &["cohomology", "--algebra", "conformal", "--degree", "1"][..],
        &["cohomology", "--algebra", "conformal:4", "--degree", "9"],
        &["cohomology", "--suite", "everything"],
        &["conformal-check", "--suite", "bianchi", "--tol", "nope=1"],
        &["conformal-check", "--suite", "bianchi", "--tol", "bianchi"],
        &["conformal-check", "--chart", "torus"],
        &["conformal-check", "--chart", "poly", "--n", "7", "--suite", "bianchi"],
        &["einstein-solve", "--chart", "flat", "--n", "2"],
        &["normalize", "--suite", "cubic"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn single_cohomology_report() {
    let out = run(&["cohomology", "--algebra", "conformal:4", "--rep", "adjoint", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let frozen: Value = serde_json::from_str(&std::fs::read_to_string(repo_fixtures().join("cohomology.json")).unwrap()).unwrap();
    let want = &frozen["conformal_adjoint"][1]["H2"];
    let r = &v["results"][0];
    assert_eq!(r["dim_H"], want["dim_H"]);
    assert_eq!(r["homogeneity_histogram"], want["homogeneity_histogram"]);
    assert_eq!(r["homogeneity_histogram"], json!({ "2": 10 }));
    assert_eq!(r["harmonic_basis"].as_array().unwrap().len(), 10);
    assert!(r["harmonic_basis"][0][0].as_str().unwrap().contains('/'));
    assert_eq!(v["pass"], json!(true));
}

#[test]
fn tolerance_breach_exits_one() {
    let out = run(&["conformal-check", "--suite", "bianchi", "--n", "3", "--tol", "bianchi=0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["pass"], json!(false));
}

#[test]
fn reports_are_byte_identical_for_equal_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    let seeds = ["11", "11", "12"];
    for (p, s) in paths.iter().zip(seeds) {
        let out = run(&["transform-check", "--suite", "laws", "--seed", s, "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let text: Vec<String> = paths.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
    assert!(text[0] == text[1], "equal seeds gave different reports");
    assert!(text[0] != text[2]);
}

#[test]
fn unwritable_output_path() {
    let out = run(&["normalize", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_result_set_is_valid_json() {
    let cfg = CommandConfig::new(Subcommand::Cohomology);
    let text = canonical_json(&build_report(&cfg, &Outcome::new("none", None)));
    assert!(text.contains("\"results\": []"));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["results"], json!([]));
    assert_eq!(v["pass"], json!(true));
}

#[test]
fn canonical_json_format() {
    let v = json!({ "b": 0.1, "a": { "z": [1, 2], "y": "1/3" }, "c": [] , "d": -2.5e-11 });
    let text = canonical_json(&v);
    assert_eq!(
        text,
        "{\n  \"a\": {\n    \"y\": \"1/3\",\n    \"z\": [1, 2]\n  },\n  \"b\": 1.0000000000000001e-1,\n  \"c\": [],\n  \"d\": -2.5000000000000001e-11\n}\n"
    );
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back["b"].as_f64(), Some(0.1));
}

#[test]
fn fixtures_refuse_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx");
    let go = |force: bool| {
        let mut c = bin();
        c.env(FIXTURE_ENV, &fx).arg("fixtures");
        if force {
            c.arg("--force");
        }
        c.output().unwrap()
    };
    assert_eq!(go(false).status.code(), Some(0));
    let first = std::fs::read(fx.join("cohomology.json")).unwrap();
    std::fs::write(fx.join("cohomology.json"), "{}").unwrap();
    let refused = go(false);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    assert_eq!(std::fs::read(fx.join("cohomology.json")).unwrap(), b"{}");
    assert_eq!(go(true).status.code(), Some(0));
    assert_eq!(std::fs::read(fx.join("cohomology.json")).unwrap(), first);
}

#[test]
fn checked_in_fixtures_are_current() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().env(FIXTURE_ENV, dir.path()).arg("fixtures").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    for f in FIXTURE_FILES {
        let fresh = std::fs::read_to_string(dir.path().join(f)).unwrap();
        let frozen = std::fs::read_to_string(repo_fixtures().join(f)).unwrap();
        assert_eq!(fresh, frozen, "{f} is stale; regenerate with `tractorlab fixtures --force`");
    }
}

#[test]
fn flat_fixture_matches_transport() {
    let fx: Value = serde_json::from_str(&std::fs::read_to_string(repo_fixtures().join("flat_tractor.json")).unwrap()).unwrap();
    assert_eq!(fx, flat_tractor_fixture(config::DEFAULT_SEED));
    let n = fx["n"].as_u64().unwrap() as usize;
    let flat = ExprChart::flat(n).unwrap();
    let f = |v: &Value| -> Vec<f64> { v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    for case in fx["cases"].as_array().unwrap() {
        let s = &case["start"];
        let v0 = TractorVec::new(s["sigma"].as_f64().unwrap(), f(&s["mu"]), s["rho"].as_f64().unwrap(), "flat");
        let seg = Segment::new(&f(&case["from"]), &f(&case["to"]));
        let v = parallel_transport(&flat, &seg, &v0, 0.02).unwrap();
        for (a, b) in v.to_state().iter().zip(f(&case["end"])) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn normalization_fixture_records_both_signs() {
    let fx: Value =
        serde_json::from_str(&std::fs::read_to_string(repo_fixtures().join("normalization.json")).unwrap()).unwrap();
    assert_eq!(fx["sign"], json!("minus"));
    for n in ["3", "4", "5"] {
        let c = &fx["sphere_rho_candidates"][n];
        assert_eq!(c["minus"][0][0], json!("-1/2"));
        assert_eq!(c["plus"][0][0], json!("1/2"));
        assert_eq!(c["minus"][0][1], json!("0/1"));
    }
}

#[test]
fn algebra_spec_parsing() {
    let g: AlgebraSpec = "grassmannian:3,3".parse().unwrap();
    assert_eq!(g, AlgebraSpec::new(AlgebraKind::Grassmannian, &[3, 3]));
    assert_eq!(g.to_string(), "grassmannian:3,3");
    for bad in ["conformal", "conformal:", "conformal:3,4", "grassmannian:3", "lorentz:4", "projective:x"] {
        assert!(bad.parse::<AlgebraSpec>().is_err(), "{bad}");
    }
    assert!("conformal:2".parse::<AlgebraSpec>().unwrap().build().is_err());
}

fn arb_config() -> impl Strategy<Value = CommandConfig> {
    let sub = prop_oneof![
        Just(Subcommand::Cohomology),
        Just(Subcommand::Normalize),
        Just(Subcommand::ConformalCheck),
        Just(Subcommand::EinsteinSolve),
        Just(Subcommand::TransformCheck),
        Just(Subcommand::Fixtures),
    ];
    let alg = prop_oneof![
        (3usize..9).prop_map(|n| AlgebraSpec::new(AlgebraKind::Conformal, &[n])),
        (2usize..9).prop_map(|n| AlgebraSpec::new(AlgebraKind::Projective, &[n])),
        (1usize..5, 1usize..5).prop_map(|(p, q)| AlgebraSpec::new(AlgebraKind::Grassmannian, &[p, q])),
    ];
    let chart = prop_oneof![
        Just(tractorlab_conformal::ChartKind::Flat),
        Just(tractorlab_conformal::ChartKind::Sphere),
        Just(tractorlab_conformal::ChartKind::Poly),
    ];
    (
        sub,
        proptest::option::of("[a-z-]{1,12}"),
        proptest::option::of(alg),
        proptest::option::of(prop_oneof![Just(RepChoice::Adjoint), Just(RepChoice::Standard)]),
        proptest::option::of(0usize..10),
        proptest::option::of(chart),
        proptest::option::of(3usize..8),
        proptest::collection::btree_map("[a-z_]{1,8}", 0.0f64..1.0, 0..4),
        any::<u64>(),
        proptest::option::of("[a-z/]{1,16}\\.json"),
        any::<bool>(),
    )
        .prop_map(|(subcommand, suite, algebra, rep, degree, chart, n, tol, seed, out, force)| CommandConfig {
            subcommand,
            suite,
            algebra,
            rep,
            degree,
            chart,
            n,
            tol: tol.into_iter().collect::<BTreeMap<_, _>>(),
            seed,
            out: out.map(PathBuf::from),
            force,
        })
}

proptest! {
    #[test]
    fn config_round_trips_through_json(cfg in arb_config()) {
        let text = cfg.to_json();
        prop_assert_eq!(CommandConfig::from_json(&text).unwrap(), cfg);
    }
}
