//! Target functions with known moduli, plus the bump functions and sampled geometric fixtures
//! used by the extension and manifold pipelines.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::approximator::TargetFunction;
use crate::domain_ext::{ModulusOfContinuity, SampledDomain};
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::CpwlFunction;
use crate::manifold::{PointCloud, BASE_TAG};

/// The cube `Q(x₀, η)` of side `η` centered at `x₀` and the exponent of its bump.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub eta: f64,
    pub alpha: f64,
}

fn bump_value(x: &[f64], center: &[f64], half: f64, peak: f64) -> f64 {
    let r = x.iter().zip(center).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    peak * (1.0 - r / half).max(0.0)
}

/// `ζ(x) = (η/2)^α/2 · (1 − ‖x − x₀‖_∞/(η/2))₊`: peak at the center, zero on the boundary and
/// linear along every ray from the center. Hölder with `λ = 1`.
pub fn bump(spec: &BumpSpec) -> Result<TargetFunction> {
    let BumpSpec { center, eta, alpha } = spec.clone();
    if center.is_empty() {
        return arg("bump center needs at least one coordinate");
    }
    if !(eta > 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
        return arg(format!("bump needs η > 0 and α ∈ (0,1], got η={eta}, α={alpha}"));
    }
    let half = eta / 2.0;
    if center.iter().any(|c| c - half < 0.0 || c + half > 1.0) {
        return arg("bump cube leaves [0,1]^d");
    }
    let peak = half.powf(alpha) / 2.0;
    Ok(TargetFunction::new(center.len(), "bump", ModulusOfContinuity::holder(1.0, alpha)?, move |x| {
        bump_value(x, &center, half, peak)
    }))
}

/// `Σ_β χ(β)·ζ_{Q_β}` over the `K^d` cubes of side `1/K`. `signs` lists `χ` in lexicographic
/// order of `β`, last coordinate fastest.
pub fn sign_patch_function(k: usize, d: usize, alpha: f64, signs: &[i8]) -> Result<TargetFunction> {
    if k == 0 || d == 0 {
        return arg("K and d must be positive");
    }
    let count = k
        .checked_pow(d as u32)
        .ok_or_else(|| ForgeError::Capacity(format!("K^d overflows for K={k}, d={d}")))?;
    if signs.len() != count {
        return arg(format!("expected {count} signs, got {}", signs.len()));
    }
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return arg("signs must be ±1");
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return arg(format!("α must lie in (0,1], got {alpha}"));
    }
    let half = 0.5 / k as f64;
    let peak = half.powf(alpha) / 2.0;
    let signs = signs.to_vec();
    Ok(TargetFunction::new(d, "sign_patch", ModulusOfContinuity::holder(1.0, alpha)?, move |x| {
        // the cube containing x is the only one that can be nonzero there
        let mut idx = 0usize;
        let mut center = Vec::with_capacity(x.len());
        for v in x {
            let b = ((v * k as f64).floor() as isize).clamp(0, k as isize - 1) as usize;
            idx = idx * k + b;
            center.push((b as f64 + 0.5) / k as f64);
        }
        signs[idx] as f64 * bump_value(x, &center, half, peak)
    }))
}

/// Seeded random sign pattern for [`sign_patch_function`].
pub fn random_signs(count: usize, seed: u64) -> Vec<i8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

pub const ZOO_NAMES: [&str; 7] = ["abs", "holder_sqrt", "const", "linear", "sin_sum", "cpwl:<seed>", "sign_patch:<seed>"];

/// Named fixture with its default dimension.
pub fn zoo(name: &str) -> Result<TargetFunction> {
    zoo_with_dim(name, None)
}

/// Named fixture. `abs` and `cpwl:*` are one-dimensional and `holder_sqrt` two-dimensional;
/// the others take `d` (default 1, or 2 for `sign_patch`).
pub fn zoo_with_dim(name: &str, d: Option<usize>) -> Result<TargetFunction> {
    let fixed = |want: usize| -> Result<()> {
        match d {
            Some(g) if g != want => arg(format!("fixture {name:?} has dimension {want}, not {g}")),
            _ => Ok(()),
        }
    };
    let dim = d.unwrap_or(1);
    if dim == 0 {
        return arg("d must be positive");
    }
    if let Some(seed) = name.strip_prefix("cpwl:") {
        fixed(1)?;
        return random_cpwl(parse_seed(name, seed)?);
    }
    if let Some(seed) = name.strip_prefix("sign_patch:") {
        let dim = d.unwrap_or(2);
        let k: usize = 4;
        let signs = random_signs(k.pow(dim as u32), parse_seed(name, seed)?);
        return sign_patch_function(k, dim, 0.5, &signs);
    }
    match name {
        "abs" => {
            fixed(1)?;
            Ok(TargetFunction::new(1, "abs", ModulusOfContinuity::lipschitz(1.0)?, |x| (x[0] - 0.5).abs()))
        }
        "holder_sqrt" => {
            fixed(2)?;
            let m = ModulusOfContinuity::holder(2f64.powf(0.25), 0.5)?;
            Ok(TargetFunction::new(2, "holder_sqrt", m, |x| (x[0] - x[1]).abs().sqrt()))
        }
        "const" => Ok(TargetFunction::new(dim, "const", ModulusOfContinuity::zero(), |_| 0.7)),
        "linear" => {
            let m = ModulusOfContinuity::lipschitz(1.0 / (dim as f64).sqrt())?;
            Ok(TargetFunction::new(dim, "linear", m, |x| x.iter().sum::<f64>() / x.len() as f64))
        }
        "sin_sum" => Ok(sin_sum(dim)),
        _ => Err(ForgeError::Lookup(format!(
            "unknown fixture {name:?}; known: {}",
            ZOO_NAMES.join(", ")
        ))),
    }
}

fn parse_seed(name: &str, s: &str) -> Result<u64> {
    s.parse().map_err(|_| ForgeError::Lookup(format!("bad seed in fixture name {name:?}")))
}

/// `Σ sin(x_i)/√d`, Lipschitz with constant 1.
pub fn sin_sum(d: usize) -> TargetFunction {
    let scale = 1.0 / (d as f64).sqrt();
    TargetFunction::new(d, "sin_sum", ModulusOfContinuity::lipschitz(1.0).expect("valid"), move |x| {
        x.iter().map(|v| v.sin()).sum::<f64>() * scale
    })
}

/// Random continuous piecewise-linear function on `[0,1]` with 9 breakpoints and values in
/// `[0,1]`, with its exact Lipschitz constant as modulus.
pub fn random_cpwl(seed: u64) -> Result<TargetFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inner: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut bp = vec![0.0];
    bp.extend(inner.into_iter().filter(|v| *v > 0.0 && *v < 1.0));
    bp.push(1.0);
    let values: Vec<f64> = bp.iter().map(|_| rng.random::<f64>()).collect();
    let lip = bp
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
        .fold(0.0, f64::max);
    let f = CpwlFunction::new(bp, values)?;
    Ok(TargetFunction::new(1, &format!("cpwl:{seed}"), ModulusOfContinuity::lipschitz(lip)?, move |x| f.eval(x[0])))
}

/// `count` points on the arc `θ ∈ [0, π/2]` of the unit circle with values `θ`.
///
/// On the arc `|θ₁ − θ₂| ≤ (π/2)·‖p₁ − p₂‖`, so the returned Lipschitz modulus is exact
/// for the sampled set.
pub fn arc_domain(count: usize) -> Result<(SampledDomain, ModulusOfContinuity)> {
    if count < 2 {
        return arg("arc domain needs at least two points");
    }
    let mut pts = Vec::with_capacity(count);
    let mut vals = Vec::with_capacity(count);
    for i in 0..count {
        let t = (PI / 2.0) * i as f64 / (count - 1) as f64;
        pts.push(vec![t.cos(), t.sin()]);
        vals.push(t);
    }
    Ok((SampledDomain::new(pts, vals, Some(1.0))?, ModulusOfContinuity::lipschitz(PI / 2.0)?))
}

/// Parameters of the helix cloud in `[0,1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HelixSpec {
    pub d: usize,
    pub base: usize,
    pub noisy: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for HelixSpec {
    fn default() -> Self {
        Self { d: 10, base: 400, noisy: 400, epsilon: 0.01, seed: 7 }
    }
}

/// A helix of radius 0.2 and height 0.4 with two turns, placed in a random 3-dimensional
/// subspace through the center of the cube. Base points lie on the curve; noisy points are
/// perturbed by at most `ε`.
pub fn helix_cloud(spec: &HelixSpec) -> Result<PointCloud> {
    let d = spec.d;
    if d < 3 {
        return arg("the helix needs d ≥ 3");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw = nalgebra::DMatrix::<f64>::from_fn(d, 3, |_, _| rng.sample(StandardNormal));
    let basis = raw.qr().q();
    let curve = |t: f64| -> Vec<f64> {
        let h = [0.2 * (4.0 * PI * t).cos(), 0.2 * (4.0 * PI * t).sin(), 0.4 * (t - 0.5)];
        (0..d).map(|i| 0.5 + (0..3).map(|j| basis[(i, j)] * h[j]).sum::<f64>()).collect()
    };
    let mut points = Vec::with_capacity(spec.base + spec.noisy);
    let mut tags = Vec::with_capacity(spec.base + spec.noisy);
    for i in 0..spec.base {
        points.push(curve(i as f64 / spec.base.max(2).saturating_sub(1) as f64));
        tags.push(Some(BASE_TAG.to_string()));
    }
    for _ in 0..spec.noisy {
        let t: f64 = rng.random();
        let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = spec.epsilon * rng.random::<f64>();
        let p = curve(t).iter().zip(&dir).map(|(c, v)| c + r * v / norm).collect();
        points.push(p);
        tags.push(Some("noise".to_string()));
    }
    PointCloud::new(points, spec.epsilon, Some(tags))
}
