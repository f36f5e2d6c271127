use std::cmp::Ordering;
use std::io::Read;
use std::sync::Arc;

use super::modulus::ModulusOfContinuity;
use crate::error::{arg, ForgeError, Result};

/// Relative slack allowed in the pairwise modulus check.
const PAIR_SLACK: f64 = 1e-12;

/// Finite set `E ⊆ [−R, R]^d` with function values.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDomain {
    dim: usize,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    half_width: f64,
    /// Point indices in lexicographic order.
    sorted: Vec<usize>,
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl SampledDomain {
    /// `half_width` defaults to the largest absolute coordinate, or 1 if all are 0.
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, half_width: Option<f64>) -> Result<Self> {
        let Some(first) = points.first() else {
            return arg("domain needs at least one point");
        };
        let dim = first.len();
        if dim == 0 {
            return arg("domain points need at least one coordinate");
        }
        if points.len() != values.len() {
            return arg(format!("{} points but {} values", points.len(), values.len()));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(ForgeError::Shape(format!("point {i} has {} coordinates, expected {dim}", p.len())));
        }
        if points.iter().flatten().chain(&values).any(|v| !v.is_finite()) {
            return Err(ForgeError::NumericDomain("domain coordinates and values must be finite".into()));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| lex(&points[a], &points[b]));
        if let Some(w) = order.windows(2).find(|w| points[w[0]] == points[w[1]]) {
            return arg(format!("domain points {} and {} coincide", w[0], w[1]));
        }
        let max_abs = points.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let half_width = match half_width {
            Some(r) if r > 0.0 && r.is_finite() && r >= max_abs => r,
            Some(r) => return arg(format!("half-width {r} does not cover the points (max |x_i| = {max_abs})")),
            None if max_abs > 0.0 => max_abs,
            None => 1.0,
        };
        Ok(Self { dim, points, values, half_width, sorted: order })
    }

    /// Reads CSV rows `x1,…,xd,value`. A header row is skipped when its first field is not a number.
    pub fn from_csv<R: Read>(input: R, half_width: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| ForgeError::Parse { location: format!("line {}", i + 1), message: e.to_string() })?;
            if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if rec.len() < 2 {
                return Err(ForgeError::Parse {
                    location: format!("line {}", i + 1),
                    message: "expected at least one coordinate and a value".into(),
                });
            }
            let nums = rec
                .iter()
                .enumerate()
                .map(|(c, f)| {
                    f.parse::<f64>().map_err(|_| ForgeError::Parse {
                        location: format!("line {}, column {}", i + 1, c + 1),
                        message: format!("not a number: {f:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (v, x) = nums.split_last().expect("len checked");
            points.push(x.to_vec());
            values.push(*v);
        }
        Self::new(points, values, half_width)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Index of the point equal to `x`, if any.
    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.sorted
            .binary_search_by(|&i| lex(&self.points[i], x))
            .ok()
            .map(|k| self.sorted[k])
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `g(x) = max_{z ∈ E} (f(z) − ω(‖z − x‖ + Δ))`.
#[derive(Clone, Debug)]
pub struct McShaneExtension {
    domain: Arc<SampledDomain>,
    modulus: ModulusOfContinuity,
    slack: f64,
}

impl McShaneExtension {
    /// On `E` the result is capped at the sampled value, so `g ≤ f` there survives rounding.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let sup = self
            .domain
            .points
            .iter()
            .zip(&self.domain.values)
            .map(|(z, v)| v - self.modulus.eval(dist(z, x) + self.slack))
            .fold(f64::NEG_INFINITY, f64::max);
        match self.domain.position(x) {
            Some(i) => sup.min(self.domain.values[i]),
            None => sup,
        }
    }

    pub fn domain(&self) -> &SampledDomain {
        &self.domain
    }

    pub fn modulus(&self) -> &ModulusOfContinuity {
        &self.modulus
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }
}

/// Extends the sampled function to all of `ℝ^d`.
///
/// Requires `|f(x₁) − f(x₂)| ≤ ω(‖x₁ − x₂‖ + Δ)` on every pair of `E`. Then `0 ≤ f − g ≤ ω(Δ)`
/// on `E` and `g` has modulus `ω`.
pub fn mcshane_extend(dom: &SampledDomain, modulus: &ModulusOfContinuity, slack: f64) -> Result<McShaneExtension> {
    if !(slack >= 0.0 && slack.is_finite()) {
        return arg(format!("Δ must be a finite nonnegative number, got {slack}"));
    }
    let (p, v) = (&dom.points, &dom.values);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let diff = (v[i] - v[j]).abs();
            let allowed = modulus.eval(dist(&p[i], &p[j]) + slack);
            if diff > allowed + PAIR_SLACK * (1.0 + diff.max(allowed)) {
                return Err(ForgeError::Precondition(format!(
                    "points {i} and {j} differ by {diff} but the modulus allows {allowed}"
                )));
            }
        }
    }
    Ok(McShaneExtension { domain: Arc::new(dom.clone()), modulus: modulus.clone(), slack })
}
