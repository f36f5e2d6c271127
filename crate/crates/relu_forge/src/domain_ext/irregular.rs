use super::mcshane::{mcshane_extend, McShaneExtension, SampledDomain};
use super::modulus::ModulusOfContinuity;
use crate::approximator::{build_approximant_with, Approximant, BuildOptions, Norm, TargetFunction};
use crate::error::{arg, Result};
use crate::fnn_core::{precompose_affine, Layer};

/// `x ↦ x/(2R) + 1/2`, mapping `[−R, R]^d` onto `[0, 1]^d`.
pub fn to_unit_cube(x: &[f64], half_width: f64) -> Vec<f64> {
    x.iter().map(|v| v / (2.0 * half_width) + 0.5).collect()
}

/// Inverse of [`to_unit_cube`]: `u ↦ 2R·u − R`.
pub fn from_unit_cube(u: &[f64], half_width: f64) -> Vec<f64> {
    u.iter().map(|v| 2.0 * half_width * v - half_width).collect()
}

/// Approximates an extension `g` with modulus `ω` on `[−R, R]^d`.
///
/// Builds the sup-norm approximant of `u ↦ g(2Ru − R)` on the unit cube and precomposes the
/// rescaling, so the returned network acts on `[−R, R]^d` directly.
pub fn approximate_extension(
    ext: &McShaneExtension,
    modulus: &ModulusOfContinuity,
    half_width: f64,
    n: usize,
    l: usize,
    opts: &BuildOptions,
) -> Result<Approximant> {
    let d = ext.domain().dim();
    if !(half_width > 0.0 && half_width.is_finite()) {
        return arg(format!("half-width must be positive, got {half_width}"));
    }
    let g = ext.clone();
    let target = TargetFunction::new(d, "mcshane_extension", modulus.scaled(2.0 * half_width), move |u| {
        g.eval(&from_unit_cube(u, half_width))
    });
    let mut approx = build_approximant_with(&target, n, l, Norm::Inf, true, opts)?;
    let mut w = vec![0.0; d * d];
    for i in 0..d {
        w[i * d + i] = 1.0 / (2.0 * half_width);
    }
    let rescale = Layer::new(d, d, w, vec![0.5; d])?;
    let meta = approx.network.metadata().clone();
    approx.network = precompose_affine(&approx.network, &rescale)?;
    *approx.network.metadata_mut() = meta;
    approx.domain_half_width = Some(half_width);
    approx.annotate(target.label());
    Ok(approx)
}

/// Approximant of the sampled function on its domain via the exact (`Δ = 0`) extension.
///
/// The sup error over `E` is at most `19√d·ω(2R·N^{−2/d}L^{−2/d})`.
pub fn approximate_on_domain(
    dom: &SampledDomain,
    modulus: &ModulusOfContinuity,
    n: usize,
    l: usize,
    opts: &BuildOptions,
) -> Result<Approximant> {
    let ext = mcshane_extend(dom, modulus, 0.0)?;
    approximate_extension(&ext, modulus, dom.half_width(), n, l, opts)
}

/// Sup error of a domain approximant over the sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainReport {
    pub measured_sup: f64,
    pub bound: f64,
    pub points: usize,
    pub pass: bool,
}

pub fn certify_on_domain(approx: &Approximant, dom: &SampledDomain) -> Result<DomainReport> {
    let mut ev = approx.network.evaluator();
    let mut worst = 0.0f64;
    for (x, v) in dom.points().iter().zip(dom.values()) {
        if x.len() != approx.network.input_dim() {
            return Err(crate::ForgeError::Shape(format!(
                "domain has dimension {}, network {}",
                x.len(),
                approx.network.input_dim()
            )));
        }
        worst = worst.max((ev.eval_scalar(x) - v).abs());
    }
    Ok(DomainReport {
        measured_sup: worst,
        bound: approx.bound_global,
        points: dom.len(),
        pass: worst <= approx.bound_global,
    })
}
