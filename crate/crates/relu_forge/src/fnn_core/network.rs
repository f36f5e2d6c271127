use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{ForgeError, Result};

/// One affine map `x ↦ W·x + b` with `W` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols {
            return Err(ForgeError::Shape(format!(
                "weight buffer has {} entries, expected {rows}x{cols}",
                weights.len()
            )));
        }
        if bias.len() != rows {
            return Err(ForgeError::Shape(format!(
                "bias has {} entries, expected {rows}",
                bias.len()
            )));
        }
        if let Some(v) = weights.iter().chain(bias.iter()).find(|v| !v.is_finite()) {
            return Err(ForgeError::NumericDomain(format!("non-finite parameter {v}")));
        }
        Ok(Self { rows, cols, weights, bias })
    }

    /// Builds a layer from explicit rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<f64>], bias: Vec<f64>) -> Result<Self> {
        let mut weights = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(ForgeError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            weights.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, weights, bias)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, weights: vec![0.0; rows * cols], bias: vec![0.0; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            l.weights[i * n + i] = 1.0;
        }
        l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.weights[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.weights[r * self.cols..(r + 1) * self.cols]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[r])
            .collect()
    }

    /// `self ∘ inner`, i.e. `x ↦ W_self·(W_inner·x + b_inner) + b_self`.
    pub fn after(&self, inner: &Layer) -> Result<Layer> {
        if self.cols != inner.rows {
            return Err(ForgeError::Composition(format!(
                "cannot feed {} outputs into a map expecting {}",
                inner.rows, self.cols
            )));
        }
        let mut w = vec![0.0; self.rows * inner.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                let src = inner.row(k);
                let dst = &mut w[r * inner.cols..(r + 1) * inner.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        let b = self.apply(&inner.bias);
        Layer::new(self.rows, inner.cols, w, b)
    }

    /// Stacks layers that read the same input.
    pub fn vstack(parts: &[&Layer]) -> Result<Layer> {
        let cols = parts.first().map_or(0, |l| l.cols);
        let mut w = Vec::new();
        let mut b = Vec::new();
        for p in parts {
            if p.cols != cols {
                return Err(ForgeError::Shape("vstack with unequal column counts".into()));
            }
            w.extend_from_slice(&p.weights);
            b.extend_from_slice(&p.bias);
        }
        Layer::new(b.len(), cols, w, b)
    }

    /// Block-diagonal combination of independent layers.
    pub fn block_diag(parts: &[&Layer]) -> Layer {
        let rows: usize = parts.iter().map(|l| l.rows).sum();
        let cols: usize = parts.iter().map(|l| l.cols).sum();
        let mut out = Layer::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for r in 0..p.rows {
                let dst = (r0 + r) * cols + c0;
                out.weights[dst..dst + p.cols].copy_from_slice(p.row(r));
                out.bias[r0 + r] = p.bias[r];
            }
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Appends zero rows until the layer has `rows` outputs.
    pub fn pad_rows(&self, rows: usize) -> Layer {
        let mut out = self.clone();
        if rows > self.rows {
            out.weights.resize(rows * self.cols, 0.0);
            out.bias.resize(rows, 0.0);
            out.rows = rows;
        }
        out
    }

    /// Appends zero columns (inputs that are ignored).
    pub fn pad_cols(&self, cols: usize) -> Layer {
        if cols <= self.cols {
            return self.clone();
        }
        let mut out = Layer::zeros(self.rows, cols);
        for r in 0..self.rows {
            out.weights[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
        }
        out.bias.clone_from(&self.bias);
        out
    }

    fn nonzeros(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

/// A feed-forward ReLU network `L_k ∘ σ ∘ … ∘ σ ∘ L_0`.
///
/// `layers` always holds at least the output map; `depth` counts the hidden layers.
#[derive(Clone, Debug)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
    metadata: BTreeMap<String, String>,
    compiled: OnceLock<Compiled>,
}

impl PartialEq for ReluNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.input_dim == other.input_dim
            && self.layers == other.layers
            && self.metadata == other.metadata
    }
}

impl ReluNetwork {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if input_dim == 0 {
            return Err(ForgeError::Shape("input_dim must be positive".into()));
        }
        if layers.is_empty() {
            return Err(ForgeError::Shape("a network needs an output layer".into()));
        }
        let mut prev = input_dim;
        for (i, l) in layers.iter().enumerate() {
            if l.cols != prev {
                return Err(ForgeError::Shape(format!(
                    "layer {i} expects {} inputs but receives {prev}",
                    l.cols
                )));
            }
            prev = l.rows;
        }
        Ok(Self { input_dim, layers, metadata: BTreeMap::new(), compiled: OnceLock::new() })
    }

    /// Depth-0 network computing an affine map.
    pub fn affine(layer: Layer) -> Self {
        let d = layer.cols.max(1);
        let layer = if layer.cols == 0 { layer.pad_cols(1) } else { layer };
        Self::new(d, vec![layer]).expect("single layer is always consistent")
    }

    pub fn identity(n: usize) -> Self {
        Self::affine(Layer::identity(n))
    }

    /// Scalar constant `c` on `R^input_dim`.
    pub fn constant(input_dim: usize, c: f64) -> Result<Self> {
        let l = Layer::new(1, input_dim, vec![0.0; input_dim], vec![c])?;
        Self::new(input_dim, vec![l])
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.metadata
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.rows)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Largest hidden layer; 0 for a pure affine map.
    pub fn width(&self) -> usize {
        self.hidden_widths().into_iter().max().unwrap_or(0)
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.rows).collect()
    }

    /// Count of nonzero weights, a proxy for evaluation cost.
    pub fn nonzeros(&self) -> usize {
        self.layers.iter().map(Layer::nonzeros).sum()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(ForgeError::Shape(format!(
                "input has {} entries, network expects {}",
                x.len(),
                self.input_dim
            )));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(ForgeError::NumericDomain(format!("non-finite input {v}")));
        }
        let mut ev = self.evaluator();
        Ok(ev.eval(x).to_vec())
    }

    /// Scalar-output convenience wrapper around [`evaluate`](Self::evaluate).
    pub fn evaluate_scalar(&self, x: &[f64]) -> Result<f64> {
        if self.output_dim() != 1 {
            return Err(ForgeError::Shape(format!(
                "network has {} outputs, expected 1",
                self.output_dim()
            )));
        }
        Ok(self.evaluate(x)?[0])
    }

    /// Reusable forward-pass state for hot loops; inputs are not validated.
    pub fn evaluator(&self) -> Evaluator<'_> {
        let c = self.compiled.get_or_init(|| Compiled::new(&self.layers));
        Evaluator { net: c, a: Vec::with_capacity(c.max_rows), b: Vec::with_capacity(c.max_rows) }
    }

    pub(crate) fn from_parts(
        input_dim: usize,
        layers: Vec<Layer>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut n = Self::new(input_dim, layers)?;
        n.metadata = metadata;
        Ok(n)
    }
}

/// Sparse row-compressed copy of the weights, built once per network.
#[derive(Clone, Debug)]
struct Compiled {
    layers: Vec<SparseLayer>,
    max_rows: usize,
}

#[derive(Clone, Debug)]
struct SparseLayer {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    bias: Vec<f64>,
}

impl Compiled {
    fn new(layers: &[Layer]) -> Self {
        let mut out = Vec::with_capacity(layers.len());
        let mut max_rows = 0;
        for l in layers {
            let mut row_ptr = Vec::with_capacity(l.rows + 1);
            let mut cols = Vec::new();
            let mut vals = Vec::new();
            row_ptr.push(0);
            for r in 0..l.rows {
                for (c, &w) in l.row(r).iter().enumerate() {
                    if w != 0.0 {
                        cols.push(c as u32);
                        vals.push(w);
                    }
                }
                row_ptr.push(vals.len());
            }
            max_rows = max_rows.max(l.rows).max(l.cols);
            out.push(SparseLayer { row_ptr, cols, vals, bias: l.bias.clone() });
        }
        Self { layers: out, max_rows }
    }
}

pub struct Evaluator<'a> {
    net: &'a Compiled,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, x: &[f64]) -> &[f64] {
        self.a.clear();
        self.a.extend_from_slice(x);
        let last = self.net.layers.len() - 1;
        for (i, l) in self.net.layers.iter().enumerate() {
            self.b.clear();
            for (r, &bias) in l.bias.iter().enumerate() {
                let mut s = 0.0;
                for k in l.row_ptr[r]..l.row_ptr[r + 1] {
                    s += l.vals[k] * self.a[l.cols[k] as usize];
                }
                let v = s + bias;
                self.b.push(if i < last { v.max(0.0) } else { v });
            }
            std::mem::swap(&mut self.a, &mut self.b);
        }
        &self.a
    }

    pub fn eval_scalar(&mut self, x: &[f64]) -> f64 {
        self.eval(x)[0]
    }
}
