use crate::error::{arg, Result};

/// The cubes `Q_β = Π_i [β_i/K, (β_i+1)/K − δ·1{β_i ≤ K−2}]` for `β ∈ {0,…,K−1}^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    k: usize,
    d: usize,
    delta: f64,
}

pub fn check_delta(k: usize, delta: f64) -> Result<()> {
    if k > 1 && !(delta > 0.0 && delta <= 1.0 / (3 * k) as f64) {
        return arg(format!("delta must lie in (0, 1/(3K)] with K = {k}, got {delta}"));
    }
    Ok(())
}

impl Partition {
    pub fn new(k: usize, d: usize, delta: f64) -> Result<Self> {
        if k == 0 || d == 0 {
            return arg("K and d must be positive");
        }
        check_delta(k, delta)?;
        Ok(Self { k, d, delta })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.k.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of the `i`-th cube in lexicographic order (last coordinate fastest).
    pub fn index(&self, mut i: usize) -> Vec<usize> {
        let mut beta = vec![0; self.d];
        for b in beta.iter_mut().rev() {
            *b = i % self.k;
            i /= self.k;
        }
        beta
    }

    /// One-dimensional interval of index `b`.
    pub fn interval(&self, b: usize) -> (f64, f64) {
        let kf = self.k as f64;
        let hi = if b + 2 <= self.k { (b + 1) as f64 / kf - self.delta } else { 1.0 };
        (b as f64 / kf, hi)
    }

    pub fn cube(&self, beta: &[usize]) -> Vec<(f64, f64)> {
        beta.iter().map(|b| self.interval(*b)).collect()
    }

    /// `x_β = β/K`.
    pub fn representative(&self, beta: &[usize]) -> Vec<f64> {
        beta.iter().map(|b| *b as f64 / self.k as f64).collect()
    }

    /// Total Lebesgue measure of the cubes.
    pub fn cube_measure(&self) -> f64 {
        let one: f64 = (0..self.k).map(|b| {
            let (lo, hi) = self.interval(b);
            hi - lo
        }).sum();
        one.powi(self.d as i32)
    }
}

/// Whether some coordinate of `x` lies in an open gap `(k/K − δ, k/K)`, `1 ≤ k ≤ K−1`.
pub fn in_trifling(x: &[f64], k: usize, delta: f64) -> bool {
    if k <= 1 {
        return false;
    }
    let kf = k as f64;
    x.iter().any(|&v| {
        let c = (v * kf).floor() as i64;
        [c, c + 1].into_iter().any(|j| {
            j >= 1 && j < k as i64 && {
                let edge = j as f64 / kf;
                v > edge - delta && v < edge
            }
        })
    })
}
