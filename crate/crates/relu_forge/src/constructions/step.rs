use super::reshape::fit_and_reshape;
use crate::error::{arg, Result};
use crate::fnn_core::{
    compose_serial, postcompose_affine, precompose_affine, selector, stack_parallel_with, Carrier,
    Layer, ReluNetwork,
};

/// Largest `r` with `r^d ≤ n`.
pub fn iroot(n: u64, d: u32) -> u64 {
    if d == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / d as f64).round() as u64;
    while r > 0 && r.checked_pow(d).is_none_or(|p| p > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(d).is_some_and(|p| p <= n) {
        r += 1;
    }
    r
}

/// Number of plateaus `K = ⌊N^{1/d}⌋²·⌊L^{2/d}⌋` used for an `(N, L, d)` budget.
pub fn step_count(n: usize, l: usize, d: usize) -> usize {
    let a = iroot(n as u64, d as u32);
    let b = iroot((l * l) as u64, d as u32);
    (a * a * b) as usize
}

/// Samples of the staircase with `plateaus` steps of length `unit` ending at `end`.
///
/// Plateau `k` spans `[k·unit, (k+1)·unit − δ]`; the last one runs up to `end`. A final free
/// sample past `end` completes the count `2·plateaus + 1`.
fn staircase(plateaus: usize, denom: f64, end: f64, delta: f64) -> Vec<(f64, f64)> {
    let mut s = Vec::with_capacity(2 * plateaus + 1);
    for k in 0..plateaus - 1 {
        s.push((k as f64 / denom, k as f64));
        s.push(((k + 1) as f64 / denom - delta, k as f64));
    }
    let top = (plateaus - 1) as f64;
    s.push((top / denom, top));
    s.push((end, top));
    s.push((end + 1.0, 0.0));
    s
}

/// Scalar staircase network: value `k` on `[k/K, (k+1)/K − δ]` for `k ≤ K−2` and on
/// `[(K−1)/K, 1 + 1/(3K)]` for the last step. Left of 0 the value is 0.
///
/// The last plateau reaches past 1 so that inputs shifted by up to `δ` still land on it.
///
/// Width `≤ 4⌊N^{1/d}⌋+3`, depth `≤ 4L+5`. For `K = 1` the zero network is returned and `δ`
/// is ignored.
pub fn step_function_net(n: usize, l: usize, d: usize, delta: f64) -> Result<ReluNetwork> {
    if n == 0 || l == 0 || d == 0 {
        return arg("N, L and d must be positive");
    }
    let k = step_count(n, l, d);
    let tag = |net: ReluNetwork| {
        net.with_meta("construction", "step_function_net")
            .with_meta("paper_ref", "step function network")
            .with_meta("K", k.to_string())
    };
    if k == 1 {
        return Ok(tag(ReluNetwork::constant(1, 0.0)?));
    }
    if !(delta > 0.0 && delta <= 1.0 / (3 * k) as f64) {
        return arg(format!("delta must lie in (0, 1/(3K)] with K = {k}, got {delta}"));
    }
    if d == 1 {
        return two_stage(n, l, delta).map(tag);
    }
    let nd = iroot(n as u64, d as u32) as usize;
    let ld = iroot((l * l) as u64, d as u32) as usize;
    let samples = staircase(k, k as f64, 2.0, delta);
    Ok(tag(fit_and_reshape(&samples, nd, 2 * nd * ld - 1, 2 * nd, 2 * ld)?))
}

/// One dimension: coarse index `m` first, then the fine index `ℓ` of `x − m/M`.
fn two_stage(n: usize, l: usize, delta: f64) -> Result<ReluNetwork> {
    let m = n * n * l;
    let coarse = fit_and_reshape(&staircase(m, m as f64, 2.0, delta), n, 2 * n * l - 1, 2 * n, 2 * l)?;
    let stage1 = stack_parallel_with(&[
        (coarse, Carrier::NonNegative),
        (ReluNetwork::identity(1), Carrier::NonNegative),
    ])?;
    let fine = fit_and_reshape(
        &staircase(l, (m * l) as f64, 1.0, delta),
        1,
        2 * l - 1,
        2,
        2 * l,
    )?;
    let shift = Layer::new(1, 2, vec![-1.0 / m as f64, 1.0], vec![0.0])?;
    let fine = precompose_affine(&fine, &shift)?;
    let carry_m = ReluNetwork::affine(selector(2, &[0]));
    let stage2 = stack_parallel_with(&[(fine, Carrier::NonNegative), (carry_m, Carrier::NonNegative)])?;
    let stage2 = postcompose_affine(&stage2, &Layer::new(1, 2, vec![1.0, l as f64], vec![0.0])?)?;
    compose_serial(&stage1, &stage2)
}
