use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::cloud::PointCloud;
use crate::domain_ext::dist;
use crate::error::{arg, ForgeError, Result};

/// `A = √(d/d_δ)·Φ` with `Φ` a `d_δ × d` matrix of orthonormal rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMap {
    d: usize,
    reduced: usize,
    delta: f64,
    seed: u64,
    /// Row-major `d_δ × d`.
    a: Vec<f64>,
}

/// How projectors are screened against a cloud before use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidencePolicy {
    /// Extra seeds tried after the first.
    pub retries: usize,
    /// Point pairs examined per check.
    pub pairs: usize,
    /// Required fraction of pairs with ratio in `[1−δ, 1+δ]`.
    pub threshold: f64,
}

impl Default for ConfidencePolicy {
    fn default() -> Self {
        Self { retries: 32, pairs: 2000, threshold: 0.95 }
    }
}

/// Ratios `‖Ax₁ − Ax₂‖ / ‖x₁ − x₂‖` over sampled pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionStats {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub fraction_within: f64,
    pub pairs: usize,
}

impl ProjectionMap {
    /// Orthonormalizes a seeded Gaussian `d_δ × d` matrix.
    pub fn random(d: usize, reduced: usize, delta: f64, seed: u64) -> Result<Self> {
        if reduced == 0 || reduced > d {
            return arg(format!("reduced dimension must lie in 1..={d}, got {reduced}"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return arg(format!("distortion δ must lie in (0,1), got {delta}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // column j of g is row j of the Gaussian draw
        let g = DMatrix::<f64>::from_fn(d, reduced, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        let scale = (d as f64 / reduced as f64).sqrt();
        let mut a = Vec::with_capacity(reduced * d);
        for r in 0..reduced {
            for c in 0..d {
                a.push(scale * q[(c, r)]);
            }
        }
        Ok(Self { d, reduced, delta, seed, a })
    }

    /// The identity on `ℝ^d`, for when no reduction is wanted.
    pub fn identity(d: usize, delta: f64) -> Result<Self> {
        if d == 0 {
            return arg("dimension must be positive");
        }
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + i] = 1.0;
        }
        Ok(Self { d, reduced: d, delta, seed: 0, a })
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a.chunks_exact(self.d).map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum()).collect()
    }

    /// Largest entrywise deviation of `A·Aᵀ` from `(d/d_δ)·I`.
    pub fn gram_deviation(&self) -> f64 {
        let s = self.d as f64 / self.reduced as f64;
        let mut worst = 0.0f64;
        for i in 0..self.reduced {
            for j in 0..self.reduced {
                let ri = &self.a[i * self.d..(i + 1) * self.d];
                let rj = &self.a[j * self.d..(j + 1) * self.d];
                let v: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                let want = if i == j { s } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
        worst
    }
}

/// Suggested reduced dimension `⌈d_𝓜·ln(d/δ)/δ²⌉`, capped at `d`.
pub fn suggested_reduced_dim(manifold_dim: usize, d: usize, delta: f64) -> usize {
    let v = (manifold_dim as f64 * (d as f64 / delta).ln() / (delta * delta)).ceil();
    (v.max(1.0) as usize).min(d)
}

/// Distortion of `A` on the cloud, using only base-tagged points when any are tagged.
pub fn distortion_check(
    a: &ProjectionMap,
    cloud: &PointCloud,
    pairs: usize,
    seed: u64,
) -> Result<DistortionStats> {
    if pairs == 0 {
        return arg("pairs must be positive");
    }
    if cloud.dim() != a.ambient_dim() {
        return Err(ForgeError::Shape(format!(
            "cloud has dimension {}, projector expects {}",
            cloud.dim(),
            a.ambient_dim()
        )));
    }
    let pts = cloud.base_points();
    let n = pts.len();
    let mut ratios = Vec::new();
    let push = |i: usize, j: usize, out: &mut Vec<f64>| {
        let r = dist(pts[i], pts[j]);
        if r > 0.0 {
            out.push(dist(&a.apply(pts[i]), &a.apply(pts[j])) / r);
        }
    };
    if n * n.saturating_sub(1) / 2 <= pairs {
        for i in 0..n {
            for j in i + 1..n {
                push(i, j, &mut ratios);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pairs {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            push(i, j, &mut ratios);
        }
    }
    if ratios.is_empty() {
        return Err(ForgeError::DegenerateCloud("no pair of distinct points in the cloud".into()));
    }
    let lo = 1.0 - a.delta();
    let hi = 1.0 + a.delta();
    let within = ratios.iter().filter(|r| **r >= lo && **r <= hi).count();
    Ok(DistortionStats {
        min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        fraction_within: within as f64 / ratios.len() as f64,
        pairs: ratios.len(),
    })
}

/// Draws projectors from seeds `seed, seed+1, …` until one passes the policy.
///
/// Returns the first accepted projector, or the best one seen (highest fraction, then highest
/// minimum ratio) when none passes. The flag says whether the policy was met.
pub fn select_projector(
    d: usize,
    reduced: usize,
    delta: f64,
    seed: u64,
    cloud: &PointCloud,
    policy: &ConfidencePolicy,
) -> Result<(ProjectionMap, DistortionStats, bool)> {
    let mut best: Option<(ProjectionMap, DistortionStats)> = None;
    for attempt in 0..=policy.retries as u64 {
        let a = ProjectionMap::random(d, reduced, delta, seed.wrapping_add(attempt))?;
        let stats = distortion_check(&a, cloud, policy.pairs, seed)?;
        if stats.fraction_within >= policy.threshold {
            return Ok((a, stats, true));
        }
        let better = best.as_ref().is_none_or(|(_, b)| {
            (stats.fraction_within, stats.min_ratio) > (b.fraction_within, b.min_ratio)
        });
        if better {
            best = Some((a, stats));
        }
    }
    let (a, s) = best.expect("at least one attempt");
    Ok((a, s, false))
}

/// Lexicographic minimum: smallest first coordinate, ties broken by the next one.
pub fn sl_select<'a>(candidates: &[&'a [f64]]) -> Result<&'a [f64]> {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(a.len().cmp(&b.len()))
        })
        .ok_or_else(|| ForgeError::Argument("sl_select needs at least one candidate".into()))
}
