use super::bits::{bit_sum_net, BitMatrix};
use super::reshape::fit_and_reshape;
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::{
    compose_serial, postcompose_affine, precompose_affine, selector,
    stack_parallel_with, Carrier, Layer, ReluNetwork,
};

/// Relative slack allowed when checking `|y_j − y_{j−1}| ≤ ε`.
const STEP_SLACK: f64 = 1e-12;

/// Nonnegative samples `y_0 … y_{J−1}` whose consecutive differences are at most `step_bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSequence {
    values: Vec<f64>,
    step_bound: f64,
}

impl SampleSequence {
    pub fn new(values: Vec<f64>, step_bound: f64) -> Result<Self> {
        if values.is_empty() {
            return arg("sample sequence is empty");
        }
        if !(step_bound >= 0.0 && step_bound.is_finite()) {
            return arg("step bound must be a finite nonnegative number");
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return arg(format!("samples must be finite and nonnegative, found {v}"));
        }
        check_steps(&values, step_bound)?;
        Ok(Self { values, step_bound })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step_bound(&self) -> f64 {
        self.step_bound
    }
}

fn check_steps(values: &[f64], eps: f64) -> Result<()> {
    for (j, w) in values.windows(2).enumerate() {
        if (w[1] - w[0]).abs() > eps * (1.0 + STEP_SLACK) {
            return arg(format!(
                "step bound violated between entries {j} and {}: |{} − {}| > {eps}",
                j + 1,
                w[1],
                w[0]
            ));
        }
    }
    Ok(())
}

/// `t ↦ min{σ(t), cap}` written as `cap − σ(cap − σ(t))`, depth 2.
///
/// In this form the output stays inside `[0, cap]` in floating point as well.
fn clamp_head(cap: f64) -> Result<ReluNetwork> {
    ReluNetwork::new(
        1,
        vec![
            Layer::identity(1),
            Layer::new(1, 1, vec![-1.0], vec![cap])?,
            Layer::new(1, 1, vec![-1.0], vec![cap])?,
        ],
    )
}

/// Two-input network approximating the table `y[m][ℓ]` to within `ε` on the integer grid
/// `m < M = N²L`, `ℓ < L`, with values clamped to `[0, max y]` everywhere.
///
/// Width `≤ 12N+8`, depth `3L+3`. The table is quantized as `a = ⌊y/ε⌋`; the first column
/// comes from a point fit and the increments `a_{m,ℓ} − a_{m,ℓ−1} ∈ {−1, 0, 1}` from two
/// bit prefix-sum networks.
pub fn grid_fit_net(y: &[Vec<f64>], eps: f64, n: usize, l: usize) -> Result<ReluNetwork> {
    if n == 0 || l == 0 {
        return arg("N and L must be positive");
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return arg("epsilon must be a positive finite number");
    }
    let m = n * n * l;
    if y.len() != m || y.iter().any(|r| r.len() != l) {
        return arg(format!("table must be {m}x{l} for N={n}, L={l}"));
    }
    let mut ymax: f64 = 0.0;
    for row in y {
        if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return arg(format!("table entries must be finite and nonnegative, found {v}"));
        }
        check_steps(row, eps)?;
        ymax = row.iter().cloned().fold(ymax, f64::max);
    }

    let mut base = Vec::with_capacity(m + 1);
    let mut up = BitMatrix::zeros(m, l);
    let mut down = BitMatrix::zeros(m, l);
    for (i, row) in y.iter().enumerate() {
        let mut prev = (row[0] / eps).floor();
        base.push((i as f64, prev));
        for (j, v) in row.iter().enumerate().skip(1) {
            let a = (v / eps).floor().clamp(prev - 1.0, prev + 1.0);
            up.set(i, j, a > prev);
            down.set(i, j, a < prev);
            prev = a;
        }
    }
    base.push((m as f64, 0.0));

    let first = fit_and_reshape(&base, n, n * l - 1, 2 * n, l)?;
    let first = precompose_affine(&first, &selector(2, &[0]))?;
    let stacked = stack_parallel_with(&[
        (first, Carrier::Signed),
        (bit_sum_net(&up, n, l)?, Carrier::NonNegative),
        (bit_sum_net(&down, n, l)?, Carrier::NonNegative),
    ])?;
    let level = postcompose_affine(&stacked, &Layer::new(1, 3, vec![eps, eps, -eps], vec![0.0])?)?;
    Ok(compose_serial(&level, &clamp_head(ymax)?)?
        .with_meta("construction", "grid_fit_net")
        .with_meta("paper_ref", "grid fitting with bit extraction"))
}

/// Scalar network with `|net(j) − y_j| ≤ ε` for `j < J ≤ N²L²` and `0 ≤ net ≤ max y` on ℝ.
///
/// Width `≤ 12N+8`, depth `4L+4`. The index is split as `j = m·L + ℓ` by a staircase in `j`
/// and the table `y_{mL+ℓ}` is handed to [`grid_fit_net`].
pub fn point_fit_net(samples: &SampleSequence, eps: f64, n: usize, l: usize) -> Result<ReluNetwork> {
    if n == 0 || l == 0 {
        return arg("N and L must be positive");
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return arg("epsilon must be a positive finite number");
    }
    let ys = samples.values();
    let j = ys.len();
    let m = n * n * l;
    if j > m * l {
        return Err(ForgeError::Capacity(format!(
            "{j} samples exceed the N²L² = {} capacity for N={n}, L={l}",
            m * l
        )));
    }
    check_steps(ys, eps)?;
    let tag = |net: ReluNetwork| {
        net.with_meta("construction", "point_fit_net")
            .with_meta("paper_ref", "point fitting with tolerance")
    };
    if j == 1 {
        return Ok(tag(ReluNetwork::constant(1, ys[0])?));
    }
    let pad = *ys.last().expect("nonempty");
    let table: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..l).map(|k| ys.get(i * l + k).copied().unwrap_or(pad)).collect())
        .collect();
    let grid = grid_fit_net(&table, eps, n, l)?;

    let mut index = Vec::with_capacity(2 * m + 1);
    for i in 0..m {
        let lo = (i * l) as f64;
        let hi = if l == 1 { lo + 0.5 } else { (i * l + l - 1) as f64 };
        index.push((lo, i as f64));
        index.push((hi, i as f64));
    }
    index.push(((m * l) as f64, m as f64));
    let coarse = fit_and_reshape(&index, n, 2 * n * l - 1, 4 * n, l)?;
    let split = stack_parallel_with(&[
        (coarse, Carrier::Signed),
        (ReluNetwork::identity(1), Carrier::Signed),
    ])?;
    let to_grid = Layer::new(2, 2, vec![1.0, 0.0, -(l as f64), 1.0], vec![0.0, 0.0])?;
    let grid = precompose_affine(&grid, &to_grid)?;
    Ok(tag(compose_serial(&split, &grid)?))
}
