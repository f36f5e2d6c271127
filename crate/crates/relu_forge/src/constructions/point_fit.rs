use crate::error::{arg, Result};
use crate::fnn_core::{Layer, ReluNetwork};

/// Two-hidden-layer scalar network through `N1·(N2+1)+1` samples.
///
/// The samples are grouped into `N1` blocks of `N2+1` consecutive points followed by one
/// final point. The network interpolates every sample and is linear between consecutive
/// samples of the same block; the stretch from the end of a block to the start of the next
/// is unconstrained. Hidden widths are exactly `[2·N1, 2·N2+1]`; left of the first sample
/// the network is constant.
pub fn fit_points_two_layer(samples: &[(f64, f64)], n1: usize, n2: usize) -> Result<ReluNetwork> {
    if n1 == 0 || n2 == 0 {
        return arg("N1 and N2 must be positive");
    }
    let n = n1 * (n2 + 1) + 1;
    if samples.len() != n {
        return arg(format!(
            "expected N1(N2+1)+1 = {n} samples for N1={n1}, N2={n2}, got {}",
            samples.len()
        ));
    }
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return arg("samples must be finite");
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return arg("sample abscissae must be strictly increasing");
    }
    let x = |i: usize| samples[i].0;
    let y = |i: usize| samples[i].1;
    let start = |j: usize| j * (n2 + 1);
    let end = |j: usize| j * (n2 + 1) + n2;
    let last = n - 1;

    // kinks of the first layer, followed by the final sample as the last interpolation node
    let mut nodes: Vec<f64> = Vec::with_capacity(2 * n1 + 1);
    for j in 0..n1 {
        nodes.push(x(start(j)));
        nodes.push(x(end(j)));
    }
    nodes.push(x(last));

    // second-layer pre-activation interpolating `vals` at `nodes`, as (bias, kink weights)
    let encode = |vals: &[f64]| -> (f64, Vec<f64>) {
        let mut w = Vec::with_capacity(2 * n1);
        let mut prev = 0.0;
        for p in 0..2 * n1 {
            let s = (vals[p + 1] - vals[p]) / (nodes[p + 1] - nodes[p]);
            w.push(s - prev);
            prev = s;
        }
        (vals[0], w)
    };

    let first_slope = |j: usize| (y(start(j) + 1) - y(start(j))) / (x(start(j) + 1) - x(start(j)));
    let affine = |j: usize, t: f64| y(start(j)) + first_slope(j) * (t - x(start(j)));

    let mut affine_vals: Vec<f64> = Vec::with_capacity(2 * n1 + 1);
    for j in 0..n1 {
        affine_vals.push(y(start(j)));
        affine_vals.push(affine(j, x(end(j))));
    }
    affine_vals.push(y(last));
    let lowest = affine_vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let lift = (-lowest).max(0.0) + 1.0;
    for v in &mut affine_vals {
        *v += lift;
    }

    let mut rows: Vec<(f64, Vec<f64>)> = vec![encode(&affine_vals)];
    let mut out = vec![1.0];
    for k in 1..n2 {
        for sign in [1.0, -1.0] {
            let mut vals = Vec::with_capacity(2 * n1 + 1);
            for j in 0..n1 {
                let s = start(j) + k;
                let before = (y(s) - y(s - 1)) / (x(s) - x(s - 1));
                let after = (y(s + 1) - y(s)) / (x(s + 1) - x(s));
                let c = (sign * (after - before)).max(0.0);
                vals.push(c * (x(start(j)) - x(s)));
                vals.push(c * (x(end(j)) - x(s)));
            }
            vals.push(-1.0);
            rows.push(encode(&vals));
            out.push(sign);
        }
    }

    let width2 = 2 * n2 + 1;
    let mut w1 = Vec::with_capacity(2 * n1);
    let mut b1 = Vec::with_capacity(2 * n1);
    for &t in &nodes[..2 * n1] {
        w1.push(1.0);
        b1.push(-t);
    }
    let mut w2 = Vec::with_capacity(width2 * 2 * n1);
    let mut b2 = Vec::with_capacity(width2);
    for (c, w) in &rows {
        w2.extend_from_slice(w);
        b2.push(*c);
    }
    out.resize(width2, 0.0);
    let l1 = Layer::new(2 * n1, 1, w1, b1)?;
    let l2 = Layer::new(rows.len(), 2 * n1, w2, b2)?.pad_rows(width2);
    let l3 = Layer::new(1, width2, out, vec![-lift])?;
    Ok(ReluNetwork::new(1, vec![l1, l2, l3])?
        .with_meta("construction", "fit_points_two_layer")
        .with_meta("paper_ref", "two-layer point fitting"))
}
