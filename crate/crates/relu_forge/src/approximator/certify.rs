use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::partition::in_trifling;
use super::pipeline::{build_approximant_with, Approximant, BuildOptions, Norm};
use super::target::TargetFunction;
use crate::error::{arg, Result};

const CHUNK: usize = 2048;

/// Where the error is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplePlan {
    /// Cell midpoints of a grid with `per_dim` cells per axis.
    Grid { per_dim: usize },
    /// Uniform points from a ChaCha8 stream.
    MonteCarlo { count: usize, seed: u64 },
}

impl SamplePlan {
    /// `10⁴` grid points for `d = 1`, `10⁵` seeded Monte-Carlo points otherwise.
    pub fn default_for(d: usize, seed: u64) -> Self {
        if d == 1 {
            SamplePlan::Grid { per_dim: 10_000 }
        } else {
            SamplePlan::MonteCarlo { count: 100_000, seed }
        }
    }

    pub fn count(&self, d: usize) -> usize {
        match *self {
            SamplePlan::Grid { per_dim } => per_dim.saturating_pow(d as u32),
            SamplePlan::MonteCarlo { count, .. } => count,
        }
    }

    /// The sample points in `[0,1]^d`, flattened row by row.
    pub fn points(&self, d: usize) -> Result<Vec<f64>> {
        match *self {
            SamplePlan::Grid { per_dim } => {
                if per_dim == 0 {
                    return arg("grid needs at least one point per dimension");
                }
                let total = per_dim
                    .checked_pow(d as u32)
                    .filter(|t| *t <= 100_000_000)
                    .ok_or_else(|| crate::ForgeError::Capacity(format!("grid {per_dim}^{d} is too large")))?;
                let h = 1.0 / per_dim as f64;
                let mut pts = Vec::with_capacity(total * d);
                for mut i in 0..total {
                    let start = pts.len();
                    for _ in 0..d {
                        pts.push(((i % per_dim) as f64 + 0.5) * h);
                        i /= per_dim;
                    }
                    pts[start..].reverse();
                }
                Ok(pts)
            }
            SamplePlan::MonteCarlo { count, seed } => {
                if count == 0 {
                    return arg("Monte-Carlo plan needs a positive sample count");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..count * d).map(|_| rng.random::<f64>()).collect())
            }
        }
    }
}

impl fmt::Display for SamplePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplePlan::Grid { per_dim } => write!(f, "grid({per_dim} per dim)"),
            SamplePlan::MonteCarlo { count, seed } => write!(f, "monte-carlo({count}, seed {seed})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub norm: Norm,
    /// Largest error over samples outside the trifling region.
    pub measured_outside_trifling: f64,
    /// Largest error over samples inside the trifling region (0 if there are none).
    pub measured_inside_trifling: f64,
    /// `L^p` error by sample-mean quadrature, or the sup over all samples for `p = ∞`.
    pub measured_global: f64,
    pub bound_outside_trifling: f64,
    pub bound_global: f64,
    /// Largest `|φ(x)|` seen.
    pub max_abs_output: f64,
    pub plan: SamplePlan,
    pub samples: usize,
    pub samples_outside: usize,
    pub pass: bool,
}

#[derive(Clone, Copy, Default)]
struct Acc {
    out_max: f64,
    in_max: f64,
    all_max: f64,
    pow_sum: f64,
    abs_max: f64,
    n_out: usize,
}

impl Acc {
    fn merge(self, o: Acc) -> Acc {
        Acc {
            out_max: self.out_max.max(o.out_max),
            in_max: self.in_max.max(o.in_max),
            all_max: self.all_max.max(o.all_max),
            pow_sum: self.pow_sum + o.pow_sum,
            abs_max: self.abs_max.max(o.abs_max),
            n_out: self.n_out + o.n_out,
        }
    }
}

/// Measures the error of `approx` against `f` on the sample plan.
///
/// Chunks are evaluated in parallel and merged in chunk order, so the report only depends
/// on the plan.
pub fn certify(approx: &Approximant, f: &TargetFunction, plan: SamplePlan) -> Result<ErrorReport> {
    let d = approx.d;
    if f.dim() != d {
        return arg(format!("target has dimension {}, approximant {d}", f.dim()));
    }
    let pts = plan.points(d)?;
    let total = pts.len() / d;
    let p = match approx.norm {
        Norm::P(p) => Some(p),
        Norm::Inf => None,
    };
    let net = &approx.network;
    let accs: Vec<Acc> = pts
        .par_chunks(CHUNK * d)
        .map(|chunk| {
            let mut ev = net.evaluator();
            let mut a = Acc::default();
            for x in chunk.chunks_exact(d) {
                let y = ev.eval_scalar(x);
                let e = (y - f.eval(x)).abs();
                a.abs_max = a.abs_max.max(y.abs());
                a.all_max = a.all_max.max(e);
                if let Some(p) = p {
                    a.pow_sum += e.powf(p);
                }
                if in_trifling(x, approx.k, approx.delta) {
                    a.in_max = a.in_max.max(e);
                } else {
                    a.out_max = a.out_max.max(e);
                    a.n_out += 1;
                }
            }
            a
        })
        .collect();
    let acc = accs.into_iter().fold(Acc::default(), Acc::merge);
    let measured_global = match p {
        Some(p) => (acc.pow_sum / total as f64).powf(1.0 / p),
        None => acc.all_max,
    };
    let pass = acc.out_max <= approx.bound_outside_trifling && measured_global <= approx.bound_global;
    Ok(ErrorReport {
        norm: approx.norm,
        measured_outside_trifling: acc.out_max,
        measured_inside_trifling: acc.in_max,
        measured_global,
        bound_outside_trifling: approx.bound_outside_trifling,
        bound_global: approx.bound_global,
        max_abs_output: acc.abs_max,
        plan,
        samples: total,
        samples_outside: acc.n_out,
        pass,
    })
}

/// One `(N, L)` entry of a rate sweep. `report` is `Err` when building or certifying failed.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub delta: f64,
    pub report: std::result::Result<ErrorReport, String>,
}

impl SweepRow {
    pub fn pass(&self) -> bool {
        self.report.as_ref().is_ok_and(|r| r.pass)
    }
}

/// Builds and certifies one approximant per `(N, L)`, in sorted order. Failures are recorded
/// in the row and the sweep carries on.
pub fn rate_sweep(
    f: &TargetFunction,
    params: &[(usize, usize)],
    norm: Norm,
    uniform: bool,
    plan: SamplePlan,
    opts: &BuildOptions,
) -> Vec<SweepRow> {
    let mut params = params.to_vec();
    params.sort_unstable();
    params.dedup();
    params
        .into_iter()
        .map(|(n, l)| {
            let k = if n > 0 && l > 0 { crate::constructions::step_count(n, l, f.dim()) } else { 0 };
            match build_approximant_with(f, n, l, norm, uniform, opts) {
                Ok(a) => SweepRow {
                    n,
                    l,
                    k: a.k,
                    delta: a.delta,
                    report: certify(&a, f, plan).map_err(|e| e.to_string()),
                },
                Err(e) => SweepRow { n, l, k, delta: f64::NAN, report: Err(e.to_string()) },
            }
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 10] = [
    "N",
    "L",
    "K",
    "delta",
    "norm",
    "measured_out",
    "bound_out",
    "measured_global",
    "bound_global",
    "pass",
];

/// Writes sweep rows as CSV. Failed rows keep `N,L,K,norm` and leave the numbers empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], norm: Norm, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for r in rows {
        let rec: Vec<String> = match &r.report {
            Ok(rep) => vec![
                r.n.to_string(),
                r.l.to_string(),
                r.k.to_string(),
                r.delta.to_string(),
                norm.to_string(),
                rep.measured_outside_trifling.to_string(),
                rep.bound_outside_trifling.to_string(),
                rep.measured_global.to_string(),
                rep.bound_global.to_string(),
                rep.pass.to_string(),
            ],
            Err(_) => vec![
                r.n.to_string(),
                r.l.to_string(),
                r.k.to_string(),
                String::new(),
                norm.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "error".into(),
            ],
        };
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> crate::ForgeError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::ForgeError::Io(io),
        other => crate::ForgeError::Parse { location: "csv".into(), message: format!("{other:?}") },
    }
}

/// Least-squares slope of `ln y` against `ln x`, skipping pairs with a nonpositive entry.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
