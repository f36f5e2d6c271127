use super::network::{Layer, ReluNetwork};
use crate::error::{arg, Result};

/// Behaviour outside the breakpoint range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Constant,
    Linear,
}

/// Continuous piecewise-linear function of one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct CpwlFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    pub left: Extension,
    pub right: Extension,
}

impl CpwlFunction {
    /// Left-constant, right-constant interpolant through `(breakpoints[i], values[i])`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return arg("a CPwL function needs at least one breakpoint");
        }
        if breakpoints.len() != values.len() {
            return arg(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return arg("breakpoints and values must be finite");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return arg("breakpoints must be strictly increasing");
        }
        Ok(Self { breakpoints, values, left: Extension::Constant, right: Extension::Constant })
    }

    pub fn with_extension(mut self, left: Extension, right: Extension) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        let k = bp.len() - 1;
        if x <= bp[0] {
            return match self.left {
                Extension::Linear if k > 0 && x < bp[0] => {
                    self.values[0] + self.slope(0) * (x - bp[0])
                }
                _ => self.values[0],
            };
        }
        if x >= bp[k] {
            return match self.right {
                Extension::Linear if k > 0 && x > bp[k] => {
                    self.values[k] + self.slope(k - 1) * (x - bp[k])
                }
                _ => self.values[k],
            };
        }
        let i = bp.partition_point(|b| *b <= x) - 1;
        if x == bp[i] {
            return self.values[i];
        }
        let t = (x - bp[i]) / (bp[i + 1] - bp[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

/// One-hidden-layer network equal to `f` on the real line.
///
/// Width is at most `k + 2` for `k + 1` breakpoints.
pub fn compile_cpwl(f: &CpwlFunction) -> ReluNetwork {
    let bp = f.breakpoints();
    let k = bp.len() - 1;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut out: Vec<f64> = Vec::new();
    let mut prev = 0.0;
    if k > 0 && f.left == Extension::Linear {
        let s0 = f.slope(0);
        rows.push((1.0, -bp[0]));
        out.push(s0);
        rows.push((-1.0, bp[0]));
        out.push(-s0);
        prev = s0;
    }
    for i in 0..k {
        let s = f.slope(i);
        if s != prev {
            rows.push((1.0, -bp[i]));
            out.push(s - prev);
        }
        prev = s;
    }
    if k > 0 && f.right == Extension::Constant && prev != 0.0 {
        rows.push((1.0, -bp[k]));
        out.push(-prev);
    }
    if rows.is_empty() {
        rows.push((0.0, 0.0));
        out.push(0.0);
    }
    let n = rows.len();
    let hidden = Layer::new(
        n,
        1,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )
    .expect("hidden layer shape");
    let output = Layer::new(1, n, out, vec![f.values()[0]]).expect("output layer shape");
    ReluNetwork::new(1, vec![hidden, output])
        .expect("consistent layers")
        .with_meta("construction", "compile_cpwl")
}
