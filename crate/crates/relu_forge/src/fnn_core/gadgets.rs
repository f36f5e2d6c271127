use super::network::{Layer, ReluNetwork};

fn net(input_dim: usize, layers: Vec<(usize, Vec<f64>, Vec<f64>)>, name: &str) -> ReluNetwork {
    let mut cols = input_dim;
    let mut built = Vec::new();
    for (rows, w, b) in layers {
        built.push(Layer::new(rows, cols, w, b).expect("gadget layer shape"));
        cols = rows;
    }
    ReluNetwork::new(input_dim, built).expect("gadget layers chain").with_meta("construction", name)
}

/// `min{x₁, x₂} = σ(x₁) − σ(−x₁) − σ(x₁ − x₂)`; width 3, depth 1.
pub fn gadget_min2() -> ReluNetwork {
    net(
        2,
        vec![
            (3, vec![1.0, 0.0, -1.0, 0.0, 1.0, -1.0], vec![0.0; 3]),
            (1, vec![1.0, -1.0, -1.0], vec![0.0]),
        ],
        "gadget_min2",
    )
}

/// `max{x₁, x₂} = σ(x₂) − σ(−x₂) + σ(x₁ − x₂)`; width 3, depth 1.
pub fn gadget_max2() -> ReluNetwork {
    net(
        2,
        vec![
            (3, vec![0.0, 1.0, 0.0, -1.0, 1.0, -1.0], vec![0.0; 3]),
            (1, vec![1.0, -1.0, 1.0], vec![0.0]),
        ],
        "gadget_max2",
    )
}

/// Median of three inputs; width 7, depth 2.
///
/// Uses `mid = a + b − c − σ(max{a,b} − c) + σ(c − min{a,b})`.
pub fn gadget_mid3() -> ReluNetwork {
    // hidden 1: u=σ(a−b), σ(a), σ(−a), σ(b), σ(−b), σ(c), σ(−c)
    #[rustfmt::skip]
    let w1 = vec![
        1.0, -1.0, 0.0,
        1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0,
        0.0, 1.0, 0.0,
        0.0, -1.0, 0.0,
        0.0, 0.0, 1.0,
        0.0, 0.0, -1.0,
    ];
    // with a = h1−h2, b = h3−h4, c = h5−h6, max = b + u, min = a − u
    #[rustfmt::skip]
    let w2 = vec![
        // σ(max − c)
        1.0, 0.0, 0.0, 1.0, -1.0, -1.0, 1.0,
        // σ(c − min)
        1.0, -1.0, 1.0, 0.0, 0.0, 1.0, -1.0,
        // σ(a + b − c), σ(c − a − b)
        0.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
        0.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0,
    ];
    net(
        3,
        vec![
            (7, w1, vec![0.0; 7]),
            (4, w2, vec![0.0; 4]),
            (1, vec![-1.0, 1.0, 1.0, -1.0], vec![0.0]),
        ],
        "gadget_mid3",
    )
}
