use std::fmt;
use std::str::FromStr;

use super::lift::uniform_lift;
use super::partition::check_delta;
use super::target::TargetFunction;
use crate::constructions::{point_fit_net, step_count, step_function_net, SampleSequence};
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::{
    compose_serial, postcompose_affine, precompose_affine, selector, stack_parallel, CpwlFunction,
    Layer, ReluNetwork,
};

/// Environment variable overriding [`DEFAULT_EVAL_CAP`].
pub const EVAL_CAP_ENV: &str = "RELU_FORGE_EVAL_CAP";
pub const DEFAULT_EVAL_CAP: usize = 1_000_000;
/// Largest dimension for which the `3^d`-wide uniform lift is built.
pub const LIFT_DIM_CAP: usize = 4;

/// The `L^p` norm used for the global error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm {
    P(f64),
    Inf,
}

impl Norm {
    pub fn is_inf(self) -> bool {
        matches!(self, Norm::Inf)
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::P(p) => write!(f, "{p}"),
            Norm::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "Inf" => Ok(Norm::Inf),
            _ => match s.parse::<f64>() {
                Ok(p) if p >= 1.0 && p.is_finite() => Ok(Norm::P(p)),
                _ => arg(format!("norm must be a number ≥ 1 or 'inf', got {s:?}")),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Maximum number of target evaluations (`K^d + 2`).
    pub eval_cap: usize,
    /// Use this δ instead of the automatic choice.
    pub delta: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { eval_cap: DEFAULT_EVAL_CAP, delta: None }
    }
}

impl BuildOptions {
    /// Defaults with the evaluation cap taken from the environment when set.
    pub fn from_env() -> Result<Self> {
        let mut o = Self::default();
        if let Ok(v) = std::env::var(EVAL_CAP_ENV) {
            o.eval_cap = v
                .trim()
                .parse()
                .map_err(|_| ForgeError::Argument(format!("{EVAL_CAP_ENV} must be an integer, got {v:?}")))?;
        }
        Ok(o)
    }
}

/// A network together with the parameters it was built from and the bounds it must meet.
#[derive(Clone, Debug)]
pub struct Approximant {
    pub network: ReluNetwork,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    pub k: usize,
    pub delta: f64,
    pub norm: Norm,
    /// Output offset `f(0) − ω_f(√d)`.
    pub shift: f64,
    /// `18·√d·ω_f(N^{-2/d} L^{-2/d})`, valid outside the trifling region.
    pub bound_outside_trifling: f64,
    /// `19·√d·ω_f(N^{-2/d} L^{-2/d})`, valid for the chosen norm on the whole cube.
    pub bound_global: f64,
    pub uniform: bool,
    /// Half-width `R` when the network acts on `[−R, R]^d` instead of the unit cube.
    pub domain_half_width: Option<f64>,
}

impl Approximant {
    /// Writes the parameters into the network metadata.
    pub fn annotate(&mut self, label: &str) {
        let net = &mut self.network;
        net.set_meta("construction", "approximant");
        net.set_meta("paper_ref", "width-depth approximation pipeline");
        net.set_meta("target", label);
        net.set_meta("N", self.n.to_string());
        net.set_meta("L", self.l.to_string());
        net.set_meta("d", self.d.to_string());
        net.set_meta("K", self.k.to_string());
        net.set_meta("delta", format!("{:?}", self.delta));
        net.set_meta("norm", self.norm.to_string());
        net.set_meta("uniform", self.uniform.to_string());
        net.set_meta("shift", format!("{:?}", self.shift));
        net.set_meta("bound_outside_trifling", format!("{:?}", self.bound_outside_trifling));
        net.set_meta("bound_global", format!("{:?}", self.bound_global));
        if let Some(r) = self.domain_half_width {
            net.set_meta("domain_half_width", format!("{r:?}"));
        }
    }

    /// Rebuilds the parameters from a network carrying [`annotate`](Self::annotate) metadata.
    pub fn from_annotated(network: ReluNetwork) -> Result<Self> {
        let meta = network.metadata().clone();
        let get = |k: &str| {
            meta.get(k).ok_or_else(|| ForgeError::Parse {
                location: format!("metadata.{k}"),
                message: "missing approximant parameter".into(),
            })
        };
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| ForgeError::Parse {
                location: format!("metadata.{k}"),
                message: format!("cannot parse {v:?}"),
            })
        }
        Ok(Self {
            n: num("N", get("N")?)?,
            l: num("L", get("L")?)?,
            d: num("d", get("d")?)?,
            k: num("K", get("K")?)?,
            delta: num("delta", get("delta")?)?,
            norm: get("norm")?.parse()?,
            shift: num("shift", get("shift")?)?,
            bound_outside_trifling: num("bound_outside_trifling", get("bound_outside_trifling")?)?,
            bound_global: num("bound_global", get("bound_global")?)?,
            uniform: num("uniform", get("uniform")?)?,
            domain_half_width: match meta.get("domain_half_width") {
                Some(v) => Some(num("domain_half_width", v)?),
                None => None,
            },
            network,
        })
    }
}

/// `r = N^{-2/d} L^{-2/d}`.
pub fn rate_radius(n: usize, l: usize, d: usize) -> f64 {
    let e = -2.0 / d as f64;
    (n as f64).powf(e) * (l as f64).powf(e)
}

/// Depth-0 network `β ↦ β_d/(2K^d) + Σ_{i<d} β_i/K^i`.
pub fn index_map(k: usize, d: usize) -> Result<ReluNetwork> {
    if k == 0 || d == 0 {
        return arg("K and d must be positive");
    }
    let kf = k as f64;
    let mut w: Vec<f64> = (1..d).map(|i| kf.powi(-(i as i32))).collect();
    w.push(0.5 * kf.powi(-(d as i32)));
    Ok(ReluNetwork::affine(Layer::new(1, d, w, vec![0.0])?).with_meta("construction", "index_map"))
}

/// Integer position `j = β_d + Σ_{i<d} 2K^{d−i} β_i` of `ψ₁(β)` on the grid `j/(2K^d)`.
pub fn index_position(beta: &[usize], k: usize) -> usize {
    let d = beta.len();
    let mut j = beta[d - 1];
    for (i, b) in beta[..d - 1].iter().enumerate() {
        j += 2 * k.pow((d - 1 - i) as u32) * b;
    }
    j
}

fn eval_count(k: usize, d: usize) -> Option<usize> {
    k.checked_pow(d as u32)?.checked_add(2)
}

/// Values of `g` on the breakpoints `j/(2K^d)`, `j = 0 … 2K^d`.
fn g_values(f: &TargetFunction, k: usize) -> Result<Vec<f64>> {
    let d = f.dim();
    let kd = k.pow(d as u32);
    let f0 = f.eval(&vec![0.0; d]);
    let w = f.omega((d as f64).sqrt());
    let scale = f0.abs() + w + 1.0;
    let shifted = |v: f64| -> Result<f64> {
        if !v.is_finite() {
            return Err(ForgeError::NumericDomain(format!("target returned {v}")));
        }
        let s = v - f0 + w;
        if s < -1e-12 * scale {
            return Err(ForgeError::Precondition(format!(
                "target value {v} is below f(0) − ω(√d) = {}; the declared modulus does not bound f",
                f0 - w
            )));
        }
        Ok(s.max(0.0))
    };
    let mut y = vec![f64::NAN; 2 * kd + 1];
    let prefixes = kd / k;
    let mut beta = vec![0usize; d];
    for p in 0..prefixes {
        let mut rest = p;
        for b in beta[..d - 1].iter_mut().rev() {
            *b = rest % k;
            rest /= k;
        }
        for t in 0..k {
            beta[d - 1] = t;
            let x: Vec<f64> = beta.iter().map(|b| *b as f64 / k as f64).collect();
            y[index_position(&beta, k)] = shifted(f.eval(&x))?;
        }
    }
    y[2 * kd] = shifted(f.eval(&vec![1.0; d]))?;
    for p in 0..prefixes {
        let a_idx = 2 * k * p + k - 1;
        let b_idx = 2 * k * (p + 1);
        let (a, b) = (y[a_idx], y[b_idx]);
        for s in 1..=k {
            y[a_idx + s] = a + (b - a) * s as f64 / (k + 1) as f64;
        }
    }
    Ok(y)
}

/// The breakpoint function `g` on `{j/(2K^d)}` with `g(ψ₁(β)) = f(x_β) − f(0) + ω_f(√d)`.
pub fn build_g(f: &TargetFunction, k: usize) -> Result<CpwlFunction> {
    if k == 0 {
        return arg("K must be positive");
    }
    let d = f.dim();
    let kd = k
        .checked_pow(d as u32)
        .ok_or_else(|| ForgeError::Capacity(format!("K^d overflows for K={k}, d={d}")))?;
    let y = g_values(f, k)?;
    let bp: Vec<f64> = (0..=2 * kd).map(|j| j as f64 / (2 * kd) as f64).collect();
    CpwlFunction::new(bp, y)
}

/// The δ used for the trifling region.
///
/// Finite `p` without the lift: `δ = min{1/(3K), ω(r)^p / (K·d·(2|f(0)| + 2ω(√d))^p)}`.
/// Otherwise the largest δ with `d·ω(δ) ≤ ω(r)` found by bisection. Floored at `2^{-40}/K`.
pub fn choose_delta(f: &TargetFunction, k: usize, norm: Norm, uniform: bool, omega_r: f64) -> f64 {
    let d = f.dim() as f64;
    let cap = 1.0 / (3 * k) as f64;
    let floor = 2f64.powi(-40) / k as f64;
    if k == 1 {
        return cap;
    }
    let delta = match norm {
        Norm::P(p) if !uniform => {
            let f0 = f.eval(&vec![0.0; f.dim()]).abs();
            let denom = k as f64 * d * (2.0 * f0 + 2.0 * f.omega(d.sqrt())).powf(p);
            if denom > 0.0 {
                cap.min(omega_r.powf(p) / denom)
            } else {
                cap
            }
        }
        _ => {
            let ok = |t: f64| d * f.omega(t) <= omega_r;
            if ok(cap) {
                cap
            } else {
                let (mut lo, mut hi) = (0.0, cap);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    };
    delta.max(floor).min(cap)
}

/// Builds the approximant of `f` with width budget `N` and depth budget `L`.
pub fn build_approximant(
    f: &TargetFunction,
    n: usize,
    l: usize,
    norm: Norm,
    uniform: bool,
) -> Result<Approximant> {
    build_approximant_with(f, n, l, norm, uniform, &BuildOptions::default())
}

pub fn build_approximant_with(
    f: &TargetFunction,
    n: usize,
    l: usize,
    norm: Norm,
    uniform: bool,
    opts: &BuildOptions,
) -> Result<Approximant> {
    let d = f.dim();
    if n == 0 || l == 0 || d == 0 {
        return arg("N, L and d must be positive");
    }
    if uniform && d > LIFT_DIM_CAP {
        return Err(ForgeError::Capability(format!(
            "the uniform lift is limited to d ≤ {LIFT_DIM_CAP}, got d = {d}"
        )));
    }
    let k = step_count(n, l, d);
    let needed = eval_count(k, d);
    match needed {
        Some(c) if c <= opts.eval_cap => {}
        _ => {
            return Err(ForgeError::Capacity(format!(
                "the construction needs K^d + 2 = {} target evaluations (K = {k}, d = {d}) but the cap is {}; raise it with {EVAL_CAP_ENV}",
                needed.map_or_else(|| "overflow".to_string(), |c| c.to_string()),
                opts.eval_cap
            )))
        }
    }
    let r = rate_radius(n, l, d);
    let omega_r = f.omega(r);
    let sqrt_d = (d as f64).sqrt();
    let delta = match opts.delta {
        Some(v) => {
            check_delta(k, v)?;
            v
        }
        None => choose_delta(f, k, norm, uniform, omega_r),
    };
    let f0 = f.eval(&vec![0.0; d]);
    let w = f.omega(sqrt_d);
    let shift = f0 - w;
    let mut out = Approximant {
        network: ReluNetwork::constant(d, f0)?,
        n,
        l,
        d,
        k,
        delta,
        norm,
        shift,
        bound_outside_trifling: 18.0 * sqrt_d * omega_r,
        bound_global: 19.0 * sqrt_d * omega_r,
        uniform,
        domain_half_width: None,
    };
    if w == 0.0 {
        out.annotate(f.label());
        return Ok(out);
    }

    let kd = k.pow(d as u32);
    let mut y = g_values(f, k)?;
    y.truncate(2 * kd);
    let eps = f.omega(sqrt_d / k as f64);
    let fit = point_fit_net(&SampleSequence::new(y, eps)?, eps, n, 2 * l).map_err(|e| match e {
        ForgeError::Argument(m) => ForgeError::Precondition(format!(
            "breakpoint values violate the declared modulus: {m}"
        )),
        other => other,
    })?;

    let step = step_function_net(n, l, d, delta)?;
    let per_coord = (0..d)
        .map(|i| precompose_affine(&step, &selector(d, &[i])))
        .collect::<Result<Vec<_>>>()?;
    let phi1 = stack_parallel(&per_coord)?;
    let mut w_idx: Vec<f64> = (0..d - 1).map(|i| 2.0 * (k as f64).powi((d - 1 - i) as i32)).collect();
    w_idx.push(1.0);
    let phi1 = postcompose_affine(&phi1, &Layer::new(1, d, w_idx, vec![0.0])?)?;
    let net = compose_serial(&phi1, &fit)?;
    let mut net = postcompose_affine(&net, &Layer::new(1, 1, vec![1.0], vec![shift])?)?;
    if uniform {
        net = uniform_lift(&net, k, delta, d)?;
    }
    out.network = net;
    out.annotate(f.label());
    Ok(out)
}
