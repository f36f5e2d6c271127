use super::cloud::{PointCloud, BASE_TAG};
use super::projector::{sl_select, ProjectionMap};
use crate::approximator::{rate_radius, Approximant, BuildOptions, TargetFunction};
use crate::domain_ext::{approximate_extension, dist, mcshane_extend, SampledDomain};
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::{format_hex_f64, precompose_affine, Layer};

/// Which cloud points define the projected function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    /// Every cloud point; each projection takes the lexicographically least nearby preimage.
    #[default]
    Neighborhood,
    /// Only points tagged as lying on the base manifold.
    BaseTagged,
}

#[derive(Clone, Debug, Default)]
pub struct ManifoldOptions {
    pub selection: Selection,
    /// Preimage matching tolerance; defaults to `1e-8 + (1+δ)·mesh`.
    pub tolerance: Option<f64>,
    pub build: BuildOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldReport {
    /// `sup |f(x) − φ(x)|` over the cloud.
    pub measured_sup: f64,
    /// `2ω_f((2ε/(1−δ))√(d/d_δ) + 2ε)`.
    pub projection_term: f64,
    /// `19√d·ω_f((2R/(1−δ))·N^{−2/d_δ}L^{−2/d_δ})`.
    pub network_term: f64,
    pub bound: f64,
    /// Half-width `R` of the box holding the projected cloud.
    pub half_width: f64,
    pub tolerance: f64,
    pub domain_points: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ManifoldApproximant {
    pub approximant: Approximant,
    pub projector: ProjectionMap,
    pub report: ManifoldReport,
}

/// Approximates `f` near a manifold sampled by `cloud` through the projection `A`.
///
/// The projected values are extended from `A(cloud)` with modulus `r ↦ ω_f(r/(1−δ))` and slack
/// `Δ = 2ε√(d/d_δ) + 2ε(1−δ)`, approximated in dimension `d_δ`, and composed with `A`.
pub fn build_manifold_approximant(
    f: &TargetFunction,
    cloud: &PointCloud,
    a: &ProjectionMap,
    n: usize,
    l: usize,
    opts: &ManifoldOptions,
) -> Result<ManifoldApproximant> {
    let d = f.dim();
    if cloud.dim() != d || a.ambient_dim() != d {
        return Err(ForgeError::Shape(format!(
            "target dimension {d}, cloud {}, projector {}",
            cloud.dim(),
            a.ambient_dim()
        )));
    }
    let delta = a.delta();
    let dr = a.reduced_dim();
    let eps = cloud.epsilon();
    let tol = match opts.tolerance {
        Some(t) if t >= 0.0 && t.is_finite() => t,
        Some(t) => return arg(format!("matching tolerance must be nonnegative, got {t}")),
        None => 1e-8 + (1.0 + delta) * cloud.mesh(),
    };

    let pool: Vec<&[f64]> = match opts.selection {
        Selection::Neighborhood => cloud.points().iter().map(|p| p.as_slice()).collect(),
        Selection::BaseTagged => {
            if !cloud.has_base_tags() {
                return arg(format!("base-tagged selection needs points tagged {BASE_TAG:?}"));
            }
            cloud.base_points()
        }
    };
    let projected: Vec<Vec<f64>> = pool.iter().map(|x| a.apply(x)).collect();
    let mut ys: Vec<Vec<f64>> = projected.clone();
    ys.sort_by(|p, q| p.iter().zip(q).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    ys.dedup();
    let mut values = Vec::with_capacity(ys.len());
    for y in &ys {
        let cands: Vec<&[f64]> = pool
            .iter()
            .zip(&projected)
            .filter(|(_, py)| dist(py, y) <= tol)
            .map(|(x, _)| *x)
            .collect();
        if cands.is_empty() {
            return Err(ForgeError::MatchingTolerance(format!(
                "no cloud point projects within {tol} of {y:?}"
            )));
        }
        values.push(f.eval(sl_select(&cands)?));
    }

    let ratio = (d as f64 / dr as f64).sqrt();
    let max_abs = ys.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let half_width = ratio.max(max_abs);
    let dom = SampledDomain::new(ys, values, Some(half_width))?;
    let omega_ext = f.modulus().scaled(1.0 / (1.0 - delta));
    let slack = 2.0 * eps * ratio + 2.0 * eps * (1.0 - delta);
    let ext = mcshane_extend(&dom, &omega_ext, slack)?;
    let mut approx = approximate_extension(&ext, &omega_ext, half_width, n, l, &opts.build)?;

    let meta = approx.network.metadata().clone();
    approx.network = precompose_affine(&approx.network, &Layer::new(dr, d, a.matrix().to_vec(), vec![0.0; dr])?)?;
    *approx.network.metadata_mut() = meta;
    let net = &mut approx.network;
    net.set_meta("construction", "manifold_approximant");
    net.set_meta("ambient_dim", d.to_string());
    net.set_meta("projector_seed", a.seed().to_string());
    net.set_meta("projector_delta", format!("{delta:?}"));
    net.set_meta(
        "projector",
        serde_json::to_string(&a.matrix().iter().map(|v| format_hex_f64(*v)).collect::<Vec<_>>())
            .expect("strings serialize"),
    );

    let projection_term = 2.0 * f.omega((2.0 * eps / (1.0 - delta)) * ratio + 2.0 * eps);
    let network_term = 19.0
        * (d as f64).sqrt()
        * f.omega((2.0 * half_width / (1.0 - delta)) * rate_radius(n, l, dr));
    let bound = projection_term + network_term;
    let mut ev = approx.network.evaluator();
    let measured_sup = cloud
        .points()
        .iter()
        .map(|x| (ev.eval_scalar(x) - f.eval(x)).abs())
        .fold(0.0f64, f64::max);
    let report = ManifoldReport {
        measured_sup,
        projection_term,
        network_term,
        bound,
        half_width,
        tolerance: tol,
        domain_points: dom.len(),
        pass: measured_sup <= bound,
    };
    Ok(ManifoldApproximant { approximant: approx, projector: a.clone(), report })
}
