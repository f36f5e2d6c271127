use super::reshape::fit_and_reshape;
use crate::error::{arg, ForgeError, Result};
use crate::fnn_core::{
    compose_serial, precompose_affine, selector, stack_parallel_with, Carrier, Layer, ReluNetwork,
};

/// Largest supported bit count; `2^L` scaled weights lose exactness beyond it.
pub const BIT_CAP: usize = 30;

/// `M × L` matrix of bits `θ_{m,ℓ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(ForgeError::Shape(format!(
                "bit buffer has {} entries, expected {rows}x{cols}",
                bits.len()
            )));
        }
        if bits.iter().any(|b| *b > 1) {
            return arg("bit entries must be 0 or 1");
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, bits: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, m: usize, l: usize) -> u8 {
        self.bits[m * self.cols + l]
    }

    pub fn set(&mut self, m: usize, l: usize, v: bool) {
        self.bits[m * self.cols + l] = u8::from(v);
    }

    /// `Σ_{j≤ℓ} θ_{m,j}`.
    pub fn prefix_sum(&self, m: usize, l: usize) -> u32 {
        (0..=l).map(|j| u32::from(self.get(m, j))).sum()
    }

    /// Binary fraction `0.θ_{m,0}θ_{m,1}…`.
    pub fn encode_row(&self, m: usize) -> f64 {
        (0..self.cols).map(|j| f64::from(self.get(m, j)) * 0.5f64.powi(j as i32 + 1)).sum()
    }
}

/// Two-input network `(ξ, ℓ) ↦ θ_1 + … + θ_ℓ` for `ξ = 0.θ_1θ_2…θ_L` in binary, `1 ≤ ℓ ≤ L`.
///
/// Width 7, depth `2L`. Each bit is read with the ramp `σ(𝓛(ξ)+1) − σ(𝓛(ξ))` where
/// `𝓛(t) = 2^{L+1}(t − 1/2) + 1/2`, which keeps a margin of `2^{−L−2}` on both sides of the
/// threshold, and the remainder is shifted out with `ξ ← 2ξ − θ`.
pub fn bit_extract_net(l: usize) -> Result<ReluNetwork> {
    if l == 0 {
        return arg("L must be positive");
    }
    if l > BIT_CAP {
        return Err(ForgeError::Capability(format!(
            "bit extraction supports L ≤ {BIT_CAP}, got {l}"
        )));
    }
    let slope = 2f64.powi(l as i32 + 1);
    let shift = -(2f64.powi(l as i32));
    let mut layers = Vec::with_capacity(2 * l + 1);

    // odd layer for bit j: [a, b, c, p, q, r, (S)]
    layers.push(Layer::from_rows(
        2,
        &[
            vec![slope, 0.0],
            vec![slope, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ],
        vec![shift + 1.5, shift + 0.5, 0.0, 0.0, -1.0, 1.0],
    )?);
    for j in 1..=l {
        let has_s = j > 1;
        let odd = 6 + usize::from(has_s);
        let last = j == l;
        // even layer: [z, ξ', q, r, (S)]
        let mut rows = vec![
            vec![1.0, -1.0, 0.0, 1.0, -1.0, 0.0],
            vec![-1.0, 1.0, 2.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let mut bias = vec![-1.0, 0.0, 0.0, 0.0];
        if last {
            rows.truncate(1);
            bias.truncate(1);
        }
        for r in &mut rows {
            r.resize(odd, 0.0);
        }
        if has_s {
            let mut r = vec![0.0; odd];
            r[6] = 1.0;
            rows.push(r);
            bias.push(0.0);
        }
        layers.push(Layer::from_rows(odd, &rows, bias)?);
        let even = rows.len();
        if last {
            let mut r = vec![1.0; even];
            if !has_s {
                r.truncate(1);
            }
            layers.push(Layer::from_rows(even, &[r], vec![0.0])?);
            break;
        }
        // next odd layer from [z, ξ', q, r, (S)]
        let mut rows = vec![
            vec![0.0, slope, 0.0, 0.0],
            vec![0.0, slope, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, -1.0, 1.0],
        ];
        for r in &mut rows {
            r.resize(even, 0.0);
        }
        let mut s = vec![0.0; even];
        s[0] = 1.0;
        if has_s {
            s[4] = 1.0;
        }
        rows.push(s);
        layers.push(Layer::from_rows(
            even,
            &rows,
            vec![shift + 1.5, shift + 0.5, 0.0, 0.0, -1.0, 1.0, 0.0],
        )?);
    }
    Ok(ReluNetwork::new(2, layers)?
        .with_meta("construction", "bit_extract_net")
        .with_meta("paper_ref", "bit extraction")
        .with_meta("L", l.to_string()))
}

/// Two-input network `(m, ℓ) ↦ Σ_{j≤ℓ} θ_{m,j}` on the grid `m < M = N²L`, `ℓ < L`.
///
/// Width `≤ 4N+3`, depth `3L+1`.
pub fn bit_sum_net(bits: &BitMatrix, n: usize, l: usize) -> Result<ReluNetwork> {
    if n == 0 || l == 0 {
        return arg("N and L must be positive");
    }
    let m = n * n * l;
    if bits.rows() != m || bits.cols() != l {
        return Err(ForgeError::Argument(format!(
            "bit matrix is {}x{}, expected {m}x{l} for N={n}, L={l}",
            bits.rows(),
            bits.cols()
        )));
    }
    if l > BIT_CAP {
        return Err(ForgeError::Capability(format!("L ≤ {BIT_CAP} required, got {l}")));
    }
    let mut samples: Vec<(f64, f64)> = (0..m).map(|i| (i as f64, bits.encode_row(i))).collect();
    samples.push((m as f64, 0.0));
    let code = fit_and_reshape(&samples, n, n * l - 1, 2 * n, l)?;
    let code = precompose_affine(&code, &selector(2, &[0]))?;
    let level = ReluNetwork::affine(Layer::new(1, 2, vec![0.0, 1.0], vec![1.0])?);
    let front = stack_parallel_with(&[(code, Carrier::NonNegative), (level, Carrier::NonNegative)])?;
    Ok(compose_serial(&front, &bit_extract_net(l)?)?
        .with_meta("construction", "bit_sum_net")
        .with_meta("paper_ref", "bit prefix sums"))
}
