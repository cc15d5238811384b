use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tractorlab_conformal::ChartKind;
use tractorlab_core::{AlgebraKind, GradedLieAlgebra};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "tractorlab", version, about = "Exact and numeric checks for parabolic and conformal geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ClapSubcommand, Debug)]
pub enum Command {
    /// Lie algebra cohomology, Hodge data and structural sweeps.
    Cohomology(CommonArgs),
    /// Normalization of the round-sphere curvature cochain.
    Normalize(CommonArgs),
    /// Numeric checks on a chart: holonomy, invariant operators, Bianchi identities.
    ConformalCheck(CommonArgs),
    /// Recover an Einstein scale from a parallel tractor.
    EinsteinSolve(CommonArgs),
    /// Rescaling laws and the algebraic/numeric tractor connection comparison.
    TransformCheck(CommonArgs),
    /// Regenerate the frozen fixture files.
    Fixtures(CommonArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Algebra as kind:params, e.g. conformal:4 or grassmannian:3,3.
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long, value_enum)]
    pub rep: Option<RepChoice>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Tolerance override name=value; repeatable.
    #[arg(long = "tol")]
    pub tol: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub suite: Option<String>,
}

pub const DEFAULT_SEED: u64 = 20240613;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Cohomology,
    Normalize,
    ConformalCheck,
    EinsteinSolve,
    TransformCheck,
    Fixtures,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Cohomology => "cohomology",
            Subcommand::Normalize => "normalize",
            Subcommand::ConformalCheck => "conformal-check",
            Subcommand::EinsteinSolve => "einstein-solve",
            Subcommand::TransformCheck => "transform-check",
            Subcommand::Fixtures => "fixtures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RepChoice {
    Adjoint,
    Standard,
}

impl RepChoice {
    pub fn name(self) -> &'static str {
        match self {
            RepChoice::Adjoint => "adjoint",
            RepChoice::Standard => "standard",
        }
    }
}

/// `kind:params`, serialized in that same textual form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub params: Vec<usize>,
}

impl AlgebraSpec {
    pub fn new(kind: AlgebraKind, params: &[usize]) -> Self {
        AlgebraSpec { kind, params: params.to_vec() }
    }

    pub fn build(&self) -> Result<GradedLieAlgebra, CliError> {
        let alg = match (self.kind, self.params.as_slice()) {
            (AlgebraKind::Conformal, [n]) => GradedLieAlgebra::conformal(*n),
            (AlgebraKind::Projective, [n]) => GradedLieAlgebra::projective(*n),
            (AlgebraKind::Grassmannian, [p, q]) => GradedLieAlgebra::grassmannian(*p, *q),
            _ => return Err(CliError::Usage(format!("bad parameters for algebra `{self}`"))),
        };
        alg.map_err(|e| CliError::Usage(format!("algebra `{self}`: {e}")))
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(usize::to_string).collect();
        write!(f, "{}:{}", self.kind.name(), params.join(","))
    }
}

impl FromStr for AlgebraSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("algebra spec `{s}` is not kind:params"));
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let kind = match kind.trim() {
            "conformal" => AlgebraKind::Conformal,
            "projective" => AlgebraKind::Projective,
            "grassmannian" => AlgebraKind::Grassmannian,
            other => return Err(CliError::Usage(format!("unknown algebra kind `{other}`"))),
        };
        let params = params
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let want = if kind == AlgebraKind::Grassmannian { 2 } else { 1 };
        if params.len() != want {
            return Err(bad());
        }
        Ok(AlgebraSpec { kind, params })
    }
}

impl TryFrom<String> for AlgebraSpec {
    type Error = CliError;

    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

impl From<AlgebraSpec> for String {
    fn from(a: AlgebraSpec) -> String {
        a.to_string()
    }
}

/// Everything a subcommand needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandConfig {
    pub subcommand: Subcommand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<RepChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub force: bool,
}

impl CommandConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        CommandConfig {
            subcommand,
            suite: None,
            algebra: None,
            rep: None,
            degree: None,
            chart: None,
            n: None,
            tol: BTreeMap::new(),
            seed: DEFAULT_SEED,
            out: None,
            force: false,
        }
    }

    pub fn from_command(cmd: Command) -> Result<Self, CliError> {
        let (sub, args) = match cmd {
            Command::Cohomology(a) => (Subcommand::Cohomology, a),
            Command::Normalize(a) => (Subcommand::Normalize, a),
            Command::ConformalCheck(a) => (Subcommand::ConformalCheck, a),
            Command::EinsteinSolve(a) => (Subcommand::EinsteinSolve, a),
            Command::TransformCheck(a) => (Subcommand::TransformCheck, a),
            Command::Fixtures(a) => (Subcommand::Fixtures, a),
        };
        let mut tol = BTreeMap::new();
        for t in &args.tol {
            let (name, value) =
                t.split_once('=').ok_or_else(|| CliError::Usage(format!("--tol expects name=value, got `{t}`")))?;
            let v: f64 = value.trim().parse().map_err(|_| CliError::Usage(format!("bad tolerance value in `{t}`")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Usage(format!("tolerance must be finite and nonnegative: `{t}`")));
            }
            tol.insert(name.trim().to_string(), v);
        }
        let chart = args
            .chart
            .as_deref()
            .map(|c| c.parse::<ChartKind>().map_err(|e| CliError::Usage(e.to_string())))
            .transpose()?;
        Ok(CommandConfig {
            subcommand: sub,
            suite: args.suite,
            algebra: args.algebra.as_deref().map(str::parse).transpose()?,
            rep: args.rep,
            degree: args.degree,
            chart,
            n: args.n,
            tol,
            seed: args.seed,
            out: args.out,
            force: args.force,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn suite_or<'a>(&'a self, default: &'a str) -> &'a str {
        self.suite.as_deref().unwrap_or(default)
    }
}

/// Named tolerances for one suite, with user overrides applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn resolve(defaults: &[(&str, f64)], overrides: &BTreeMap<String, f64>) -> Result<Self, CliError> {
        let mut map: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            match map.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                    return Err(CliError::Usage(format!("unknown tolerance `{k}`; known: {}", known.join(", "))));
                }
            }
        }
        Ok(Tolerances(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}
