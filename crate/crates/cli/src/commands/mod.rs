pub mod cohomology;
pub mod conformal;
pub mod einstein;
pub mod fixtures;
pub mod normalize;
pub mod transform;

use serde_json::{Map, Value};

use crate::config::Tolerances;
use crate::error::CliError;

/// What a subcommand hands back for report assembly.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub suite: String,
    pub tolerances: Option<Tolerances>,
    pub results: Vec<Value>,
    pub summary: Map<String, Value>,
}

impl Outcome {
    pub fn new(suite: &str, tolerances: Option<Tolerances>) -> Self {
        Outcome { suite: suite.to_string(), tolerances, results: Vec::new(), summary: Map::new() }
    }

    pub fn push(&mut self, pass: bool, mut fields: Value) {
        if let Value::Object(m) = &mut fields {
            m.insert("pass".into(), Value::Bool(pass));
        }
        self.results.push(fields);
    }

    pub fn note(&mut self, key: &str, v: Value) {
        self.summary.insert(key.to_string(), v);
    }

    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(false))
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// max that lets NaN through.
pub(crate) fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Chart construction failures come from bad flags, so they are usage errors.
pub(crate) fn build_chart(spec: &tractorlab_conformal::ChartSpec) -> Result<tractorlab_conformal::ChartRef, CliError> {
    spec.build().map_err(|e| CliError::Usage(format!("chart: {e}")))
}
