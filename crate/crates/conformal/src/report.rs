use serde::{Deserialize, Serialize};

/// Summary of one residual over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ResidualAcc {
    name: String,
    max: f64,
    sum: f64,
    count: usize,
}

impl ResidualAcc {
    pub fn new(name: impl Into<String>) -> Self {
        ResidualAcc { name: name.into(), max: 0.0, sum: 0.0, count: 0 }
    }

    /// Record one sample; the magnitude is taken.
    pub fn push(&mut self, v: f64) {
        let a = v.abs();
        if a.is_nan() || a > self.max {
            self.max = if self.max.is_nan() { self.max } else { a };
        }
        self.sum += a;
        self.count += 1;
    }

    /// Record the largest magnitude of a slice as one sample.
    pub fn push_max(&mut self, vs: &[f64]) {
        let m = vs.iter().fold(0.0f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) });
        self.push(m);
    }

    pub fn finish(self, tol: f64) -> Residual {
        let mean = if self.count == 0 { 0.0 } else { self.sum / self.count as f64 };
        Residual { name: self.name, max: self.max, mean, samples: self.count, tol, pass: self.max <= tol }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub residuals: Vec<Residual>,
}

impl Report {
    pub fn new(residuals: Vec<Residual>) -> Self {
        Report { residuals }
    }

    pub fn pass(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn max(&self) -> f64 {
        self.residuals.iter().map(|r| r.max).fold(0.0, f64::max)
    }
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_and_slope() {
        let mut acc = ResidualAcc::new("r");
        acc.push(-2.0);
        acc.push(1.0);
        let r = acc.finish(1.5);
        assert_eq!((r.max, r.mean, r.samples, r.pass), (2.0, 1.5, 2, false));
        let mut nan = ResidualAcc::new("nan");
        nan.push(f64::NAN);
        nan.push(1.0);
        assert!(!nan.finish(1.0).pass);
        let xs = [0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        assert!((loglog_slope(&xs, &ys) - 4.0).abs() < 1e-12);
    }
}
