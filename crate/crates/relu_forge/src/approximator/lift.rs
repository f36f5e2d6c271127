use super::pipeline::LIFT_DIM_CAP;
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::{
    compose_serial, gadget_mid3, precompose_affine, selector, stack_parallel, Layer, ReluNetwork,
};

/// Sup-norm lift: the nested median of `3^d` copies of `net` evaluated at `x + s·δ`,
/// `s ∈ {−1, 0, 1}^d`.
///
/// Per coordinate at most one of the three shifts falls into a gap of the partition, so two
/// of the three values are good and the median is too. If `net` is within `ε` of `f` outside
/// the trifling region, the result is within `ε + d·ω_f(δ)` everywhere on `[0,1]^d`.
/// Width `≤ 3^d·width(net)`, depth `depth(net) + 2d`.
pub fn uniform_lift(net: &ReluNetwork, k: usize, delta: f64, d: usize) -> Result<ReluNetwork> {
    if net.input_dim() != d {
        return Err(ForgeError::Shape(format!(
            "network input_dim {} does not match d = {d}",
            net.input_dim()
        )));
    }
    if net.output_dim() != 1 {
        return Err(ForgeError::Shape("uniform_lift expects a scalar network".into()));
    }
    if d == 0 {
        return arg("d must be positive");
    }
    if d > LIFT_DIM_CAP {
        return Err(ForgeError::Capability(format!(
            "the uniform lift is limited to d ≤ {LIFT_DIM_CAP}, got d = {d}"
        )));
    }
    super::partition::check_delta(k, delta)?;
    let copies = 3usize.pow(d as u32);
    let shifted = (0..copies)
        .map(|c| {
            // coordinate 0 varies fastest so the first median level reduces over it
            let bias: Vec<f64> = (0..d)
                .map(|i| ((c / 3usize.pow(i as u32)) % 3) as f64 - 1.0)
                .map(|s| s * delta)
                .collect();
            let shift = Layer::new(d, d, Layer::identity(d).weights().to_vec(), bias)?;
            precompose_affine(net, &shift)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = stack_parallel(&shifted)?;
    let mid = gadget_mid3();
    let mut width = copies;
    while width > 1 {
        let groups = (0..width / 3)
            .map(|g| precompose_affine(&mid, &selector(width, &[3 * g, 3 * g + 1, 3 * g + 2])))
            .collect::<Result<Vec<_>>>()?;
        out = compose_serial(&out, &stack_parallel(&groups)?)?;
        width /= 3;
    }
    let mut meta = net.metadata().clone();
    meta.insert("lifted".into(), "uniform".into());
    *out.metadata_mut() = meta;
    Ok(out)
}
