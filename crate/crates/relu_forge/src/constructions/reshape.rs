use crate::error::{arg, Result};
use crate::fnn_core::{Layer, ReluNetwork};

/// Pads a two-hidden-layer network with zero neurons up to widths `[rows0, rows1]`.
pub fn pad_two_layer(net: &ReluNetwork, rows0: usize, rows1: usize) -> Result<ReluNetwork> {
    if net.depth() != 2 {
        return arg("pad_two_layer expects exactly two hidden layers");
    }
    let l = net.layers();
    if rows0 < l[0].rows() || rows1 < l[1].rows() {
        return arg("padding cannot shrink a layer");
    }
    let a = l[0].pad_rows(rows0);
    let b = l[1].pad_cols(rows0).pad_rows(rows1);
    let c = l[2].pad_cols(rows1);
    let mut out = ReluNetwork::new(net.input_dim(), vec![a, b, c])?;
    *out.metadata_mut() = net.metadata().clone();
    Ok(out)
}

/// Trades width for depth: a `[N, N·L]` network becomes width `≤ 2N+2`, depth `≤ L+1`.
///
/// The second hidden layer is split into `L` blocks `h_ℓ` evaluated one per layer while the
/// first-layer activations `g` are carried forward and the partial output sum is kept as a
/// signed pair `(σ(s), σ(−s))`.
pub fn wide_to_deep(net: &ReluNetwork, l: usize) -> Result<ReluNetwork> {
    if l == 0 {
        return arg("L must be positive");
    }
    if net.depth() != 2 || net.output_dim() != 1 {
        return arg("wide_to_deep expects a scalar network with two hidden layers");
    }
    let layers = net.layers();
    let n = layers[0].rows();
    if layers[1].rows() != n * l {
        return arg(format!(
            "second hidden layer has {} neurons, expected N·L = {}",
            layers[1].rows(),
            n * l
        ));
    }
    let w1 = &layers[1];
    let w2 = &layers[2];
    let mut out = vec![layers[0].clone()];

    // layout of the previous hidden layer: optional g, h block, optional s pair
    let mut prev_has_g = true;
    let mut prev_h: Option<usize> = None;
    let mut prev_s = false;
    for block in 0..l {
        let keep_g = block + 1 < l;
        let prev_len = usize::from(prev_has_g) * n + prev_h.map_or(0, |_| n) + 2 * usize::from(prev_s);
        let g_off = 0;
        let h_off = usize::from(prev_has_g) * n;
        let s_off = h_off + prev_h.map_or(0, |_| n);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut bias = Vec::new();
        if keep_g {
            for i in 0..n {
                let mut r = vec![0.0; prev_len];
                r[g_off + i] = 1.0;
                rows.push(r);
                bias.push(0.0);
            }
        }
        for i in 0..n {
            let mut r = vec![0.0; prev_len];
            r[g_off..g_off + n].copy_from_slice(w1.row(block * n + i));
            rows.push(r);
            bias.push(w1.bias()[block * n + i]);
        }
        let has_s = prev_h.is_some();
        if let Some(pb) = prev_h {
            let mut r = vec![0.0; prev_len];
            for i in 0..n {
                r[h_off + i] = w2.get(0, pb * n + i);
            }
            if prev_s {
                r[s_off] = 1.0;
                r[s_off + 1] = -1.0;
            }
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            rows.push(r);
            rows.push(neg);
            bias.push(0.0);
            bias.push(0.0);
        }
        out.push(Layer::from_rows(prev_len, &rows, bias)?);
        prev_has_g = keep_g;
        prev_h = Some(block);
        prev_s = has_s;
    }
    let prev_len = usize::from(prev_has_g) * n + n + 2 * usize::from(prev_s);
    let h_off = usize::from(prev_has_g) * n;
    let mut r = vec![0.0; prev_len];
    for i in 0..n {
        r[h_off + i] = w2.get(0, (l - 1) * n + i);
    }
    if prev_s {
        r[h_off + n] = 1.0;
        r[h_off + n + 1] = -1.0;
    }
    out.push(Layer::from_rows(prev_len, &[r], vec![w2.bias()[0]])?);
    let mut res = ReluNetwork::new(net.input_dim(), out)?;
    *res.metadata_mut() = net.metadata().clone();
    res.set_meta("reshaped", "wide_to_deep");
    Ok(res)
}

/// Fits, pads to `[n0, n0·l]` and reshapes in one go.
pub(crate) fn fit_and_reshape(
    samples: &[(f64, f64)],
    n1: usize,
    n2: usize,
    n0: usize,
    l: usize,
) -> Result<ReluNetwork> {
    let fit = super::fit_points_two_layer(samples, n1, n2)?;
    let padded = pad_two_layer(&fit, n0, n0 * l)?;
    wide_to_deep(&padded, l)
}
