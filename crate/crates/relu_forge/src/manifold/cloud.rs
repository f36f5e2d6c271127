use std::io::Read;

use crate::error::{arg, ForgeError, Result};

/// Tag marking points that lie on the base manifold itself.
pub const BASE_TAG: &str = "base";

/// Finite sample of an `ε`-neighborhood of a manifold inside `[0,1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    epsilon: f64,
    tags: Vec<Option<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, epsilon: f64, tags: Option<Vec<Option<String>>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return arg("point cloud is empty");
        };
        let dim = first.len();
        if dim == 0 {
            return arg("cloud points need at least one coordinate");
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(ForgeError::Shape(format!("point {i} has {} coordinates, expected {dim}", p.len())));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|v| !(0.0..=1.0).contains(v))) {
            return arg(format!("point {i} is outside [0,1]^{dim}"));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return arg(format!("ε must lie in [0,1), got {epsilon}"));
        }
        let tags = tags.unwrap_or_else(|| vec![None; points.len()]);
        if tags.len() != points.len() {
            return arg(format!("{} tags for {} points", tags.len(), points.len()));
        }
        Ok(Self { dim, points, epsilon, tags })
    }

    /// Reads rows `x1,…,xd[,tag]`; a trailing non-numeric field is the tag. A header row is
    /// skipped when its first field is not a number.
    pub fn from_csv<R: Read>(input: R, epsilon: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut points = Vec::new();
        let mut tags = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| ForgeError::Parse { location: format!("line {}", i + 1), message: e.to_string() })?;
            if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            let mut fields: Vec<&str> = rec.iter().collect();
            let tag = match fields.last() {
                Some(t) if t.parse::<f64>().is_err() => {
                    let t = t.to_string();
                    fields.pop();
                    Some(t)
                }
                _ => None,
            };
            let x = fields
                .iter()
                .enumerate()
                .map(|(c, f)| {
                    f.parse::<f64>().map_err(|_| ForgeError::Parse {
                        location: format!("line {}, column {}", i + 1, c + 1),
                        message: format!("not a number: {f:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(x);
            tags.push(tag);
        }
        Self::new(points, epsilon, Some(tags))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tags(&self) -> &[Option<String>] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_base_tags(&self) -> bool {
        self.tags.iter().any(|t| t.as_deref() == Some(BASE_TAG))
    }

    /// Base-tagged points, or every point when nothing is tagged as base.
    pub fn base_points(&self) -> Vec<&[f64]> {
        let base = self.has_base_tags();
        self.points
            .iter()
            .zip(&self.tags)
            .filter(|(_, t)| !base || t.as_deref() == Some(BASE_TAG))
            .map(|(p, _)| p.as_slice())
            .collect()
    }

    /// Largest nearest-neighbor distance (0 for a single point).
    pub fn mesh(&self) -> f64 {
        let n = self.points.len();
        let mut nearest = vec![f64::INFINITY; n];
        for i in 0..n {
            for j in i + 1..n {
                let r = crate::domain_ext::dist(&self.points[i], &self.points[j]);
                nearest[i] = nearest[i].min(r);
                nearest[j] = nearest[j].min(r);
            }
        }
        nearest.into_iter().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }
}
