//! Cost model for one training iteration on `p` cores and the `(N, L)` choice that minimizes
//! it at a target accuracy.

use std::fmt;
use std::io::Write;

use crate::error::{arg, Result};

/// Largest core count treated as the few-cores regime.
pub const DEFAULT_FEW_CORES: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostQuery {
    pub epsilon: f64,
    pub alpha: f64,
    pub d: usize,
    pub p: f64,
}

impl CostQuery {
    pub fn new(epsilon: f64, alpha: f64, d: usize, p: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return arg(format!("ε must lie in (0,1), got {epsilon}"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return arg(format!("α must lie in (0,1], got {alpha}"));
        }
        if d == 0 {
            return arg("d must be positive");
        }
        if !(p >= 1.0 && p.is_finite()) {
            return arg(format!("p must be at least 1, got {p}"));
        }
        Ok(Self { epsilon, alpha, d, p })
    }

    /// `ε^{−d/(2α)}`, snapped to the nearest integer when within relative `1e-9` of it.
    pub fn target_product(&self) -> f64 {
        let t = self.epsilon.powf(-(self.d as f64) / (2.0 * self.alpha));
        let r = t.round();
        if (t - r).abs() <= 1e-9 * t {
            r
        } else {
            t
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Few cores: width of order `d`.
    FewCores,
    /// `√p` exceeds the required product: depth 1.
    ManyCores,
    /// In between: scan `N` over `[√p, p]`.
    Intermediate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::FewCores => "case1",
            Regime::ManyCores => "case2.1",
            Regime::Intermediate => "case2.2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostPlan {
    pub n_opt: u64,
    pub l_opt: u64,
    pub regime: Regime,
    pub predicted_cost: f64,
}

/// Time of one iteration: `N²L/p` for `p ≤ N`, `L(N²/p + ln(p/N))` for `N < p ≤ N²` and
/// `L(1 + ln N)` beyond.
pub fn cost(n: f64, l: f64, p: f64) -> f64 {
    if p <= n {
        n * n * l / p
    } else if p <= n * n {
        l * (n * n / p + (p / n).ln())
    } else {
        l * (1.0 + n.ln())
    }
}

/// Smallest `l ≥ 1` with `l·n ≥ t`.
fn ceil_div(t: f64, n: u64) -> u64 {
    let mut l = ((t / n as f64).ceil() as u64).max(1);
    while (l as f64) * (n as f64) < t {
        l += 1;
    }
    while l > 1 && ((l - 1) as f64) * (n as f64) >= t {
        l -= 1;
    }
    l
}

/// Picks `(N, L)` with `N·L ≥ ε^{−d/(2α)}` minimizing [`cost`], using `p ≤ 8` as the few-cores
/// threshold.
pub fn plan(q: &CostQuery) -> Result<CostPlan> {
    plan_with_threshold(q, DEFAULT_FEW_CORES)
}

pub fn plan_with_threshold(q: &CostQuery, few_cores: f64) -> Result<CostPlan> {
    let q = CostQuery::new(q.epsilon, q.alpha, q.d, q.p)?;
    let t = q.target_product();
    let t_ceil = t.ceil() as u64;
    let p = q.p;
    let (n, l, regime) = if p <= few_cores {
        let n = q.d as u64;
        (n, ceil_div(t, n), Regime::FewCores)
    } else if p.sqrt() > t {
        (t_ceil, 1, Regime::ManyCores)
    } else {
        let lo = (p.sqrt().ceil() as u64).max(1);
        let hi = (p.ceil() as u64).min(t_ceil).max(lo);
        let mut best: Option<(u64, u64, f64)> = None;
        for n in lo..=hi {
            let l = ceil_div(t, n);
            let c = cost(n as f64, l as f64, p);
            if best.is_none_or(|(_, _, b)| c < b) {
                best = Some((n, l, c));
            }
        }
        let (n, l, _) = best.expect("nonempty scan range");
        (n, l, Regime::Intermediate)
    };
    Ok(CostPlan { n_opt: n, l_opt: l, regime, predicted_cost: cost(n as f64, l as f64, p) })
}

pub const PLAN_HEADER: [&str; 8] = ["epsilon", "alpha", "d", "p", "regime", "N_opt", "L_opt", "cost"];

/// One header row and one data row.
pub fn write_plan_csv<W: Write>(q: &CostQuery, plan: &CostPlan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLAN_HEADER).map_err(crate::approximator::csv_err)?;
    w.write_record([
        q.epsilon.to_string(),
        q.alpha.to_string(),
        q.d.to_string(),
        q.p.to_string(),
        plan.regime.to_string(),
        plan.n_opt.to_string(),
        plan.l_opt.to_string(),
        plan.predicted_cost.to_string(),
    ])
    .map_err(crate::approximator::csv_err)?;
    w.flush()?;
    Ok(())
}
