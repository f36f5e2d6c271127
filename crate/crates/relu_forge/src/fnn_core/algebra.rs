use super::network::{Layer, ReluNetwork};
use crate::error::{ForgeError, Result};

/// How an output channel is carried through extra hidden layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// Two channels `(σ(s), σ(−s))`, recombined as a difference. Works for any sign.
    Signed,
    /// One channel `σ(s)`. Only faithful where the carried value is `≥ 0`.
    NonNegative,
}

/// `x ↦ second(first(x))`, fusing the junction affine maps so no hidden layer is added.
pub fn compose_serial(first: &ReluNetwork, second: &ReluNetwork) -> Result<ReluNetwork> {
    if first.output_dim() != second.input_dim() {
        return Err(ForgeError::Composition(format!(
            "first network emits {} values, second expects {}",
            first.output_dim(),
            second.input_dim()
        )));
    }
    let fl = first.layers();
    let sl = second.layers();
    let mut layers = Vec::with_capacity(fl.len() + sl.len() - 1);
    layers.extend_from_slice(&fl[..fl.len() - 1]);
    layers.push(sl[0].after(&fl[fl.len() - 1])?);
    layers.extend_from_slice(&sl[1..]);
    ReluNetwork::new(first.input_dim(), layers)
}

/// Prepends an affine map `x ↦ W·x + b` to the network's first layer.
pub fn precompose_affine(net: &ReluNetwork, map: &Layer) -> Result<ReluNetwork> {
    compose_serial(&ReluNetwork::new(map.cols(), vec![map.clone()])?, net)
}

/// Appends an affine map to the network's output layer.
pub fn postcompose_affine(net: &ReluNetwork, map: &Layer) -> Result<ReluNetwork> {
    compose_serial(net, &ReluNetwork::new(map.cols(), vec![map.clone()])?)
}

/// Extends `net` to exactly `depth` hidden layers by carrying its outputs.
pub fn pad_depth(net: &ReluNetwork, depth: usize, carrier: Carrier) -> Result<ReluNetwork> {
    let cur = net.depth();
    if depth < cur {
        return Err(ForgeError::Argument(format!(
            "cannot pad a depth-{cur} network down to depth {depth}"
        )));
    }
    if depth == cur {
        return Ok(net.clone());
    }
    let m = net.output_dim();
    let mut layers: Vec<Layer> = net.layers()[..cur].to_vec();
    let out = &net.layers()[cur];
    let (first, step, last) = match carrier {
        Carrier::NonNegative => (out.clone(), Layer::identity(m), Layer::identity(m)),
        Carrier::Signed => {
            let neg = negate(out);
            let first = Layer::vstack(&[out, &neg])?;
            let mut w = vec![0.0; 4 * m * m];
            let mut wl = vec![0.0; 2 * m * m];
            for i in 0..m {
                w[i * 2 * m + i] = 1.0;
                w[i * 2 * m + m + i] = -1.0;
                w[(m + i) * 2 * m + i] = -1.0;
                w[(m + i) * 2 * m + m + i] = 1.0;
                wl[i * 2 * m + i] = 1.0;
                wl[i * 2 * m + m + i] = -1.0;
            }
            let step = Layer::new(2 * m, 2 * m, w, vec![0.0; 2 * m])?;
            let last = Layer::new(m, 2 * m, wl, vec![0.0; m])?;
            (first, step, last)
        }
    };
    layers.push(first);
    for _ in cur + 1..depth {
        layers.push(step.clone());
    }
    layers.push(last);
    ReluNetwork::new(net.input_dim(), layers)
}

fn negate(l: &Layer) -> Layer {
    Layer::new(
        l.rows(),
        l.cols(),
        l.weights().iter().map(|v| -v).collect(),
        l.bias().iter().map(|v| -v).collect(),
    )
    .expect("negation preserves shape")
}

/// Runs networks side by side on a shared input and concatenates their outputs.
///
/// Shallower networks are padded with signed carrier pairs.
pub fn stack_parallel(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    let items: Vec<(ReluNetwork, Carrier)> =
        nets.iter().map(|n| (n.clone(), Carrier::Signed)).collect();
    stack_parallel_with(&items)
}

/// [`stack_parallel`] with an explicit carrier per network.
pub fn stack_parallel_with(items: &[(ReluNetwork, Carrier)]) -> Result<ReluNetwork> {
    let Some((head, _)) = items.first() else {
        return Err(ForgeError::Argument("stack_parallel needs at least one network".into()));
    };
    let d = head.input_dim();
    if let Some((n, _)) = items.iter().find(|(n, _)| n.input_dim() != d) {
        return Err(ForgeError::Shape(format!(
            "stacked networks disagree on input_dim ({} vs {d})",
            n.input_dim()
        )));
    }
    let depth = items.iter().map(|(n, _)| n.depth()).max().unwrap_or(0);
    let padded = items
        .iter()
        .map(|(n, c)| pad_depth(n, depth, *c))
        .collect::<Result<Vec<_>>>()?;
    let mut layers = Vec::with_capacity(depth + 1);
    let firsts: Vec<&Layer> = padded.iter().map(|n| &n.layers()[0]).collect();
    layers.push(Layer::vstack(&firsts)?);
    for k in 1..=depth {
        let parts: Vec<&Layer> = padded.iter().map(|n| &n.layers()[k]).collect();
        layers.push(Layer::block_diag(&parts));
    }
    ReluNetwork::new(d, layers)
}

/// Affine map selecting coordinates `idx` of an `n`-vector.
pub fn selector(n: usize, idx: &[usize]) -> Layer {
    let mut w = vec![0.0; idx.len() * n];
    for (r, &c) in idx.iter().enumerate() {
        w[r * n + c] = 1.0;
    }
    Layer::new(idx.len(), n, w, vec![0.0; idx.len()]).expect("selector shape")
}
