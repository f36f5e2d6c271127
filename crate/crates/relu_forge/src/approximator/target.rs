use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain_ext::ModulusOfContinuity;

type Eval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on `[0,1]^d` together with a modulus of continuity bounding it.
#[derive(Clone)]
pub struct TargetFunction {
    dim: usize,
    eval: Eval,
    modulus: ModulusOfContinuity,
    label: String,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl TargetFunction {
    pub fn new(
        dim: usize,
        label: &str,
        modulus: ModulusOfContinuity,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { dim, eval: Arc::new(eval), modulus, label: label.into() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modulus(&self) -> &ModulusOfContinuity {
        &self.modulus
    }

    pub fn omega(&self, r: f64) -> f64 {
        self.modulus.eval(r)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn evaluator(&self) -> Eval {
        self.eval.clone()
    }

    /// Looks for a random pair with `|f(x) − f(y)| > ω(‖x − y‖)`.
    pub fn spot_check(&self, pairs: usize, seed: u64) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..pairs {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.random::<f64>()).collect();
            // alternate between global pairs and close pairs
            let scale = if i % 2 == 0 { 1.0 } else { 1e-3 };
            let y: Vec<f64> = x
                .iter()
                .map(|v| (v + scale * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
                .collect();
            let r = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let diff = (self.eval(&x) - self.eval(&y)).abs();
            if diff > self.omega(r) * (1.0 + 1e-12) + 1e-14 {
                return Some((x, y));
            }
        }
        None
    }
}
