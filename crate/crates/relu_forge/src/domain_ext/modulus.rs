use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, ForgeError, Result};

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ModulusKind {
    /// `λ·r^α`.
    Holder { lambda: f64, alpha: f64 },
    /// Upper envelope of nondecreasing samples `ω(radii[i]) ≤ values[i]`.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    Callable(Callable),
}

/// A modulus of continuity `ω`: `ω(0) = 0`, nondecreasing and subadditive.
#[derive(Clone)]
pub struct ModulusOfContinuity {
    kind: ModulusKind,
    diameter: Option<f64>,
    rigorous: bool,
    label: String,
}

impl fmt::Debug for ModulusOfContinuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulusOfContinuity")
            .field("label", &self.label)
            .field("diameter", &self.diameter)
            .field("rigorous", &self.rigorous)
            .finish()
    }
}

impl ModulusOfContinuity {
    pub fn holder(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) || !(alpha > 0.0 && alpha <= 1.0) {
            return arg(format!("Hölder modulus needs λ ≥ 0 and α ∈ (0,1], got λ={lambda}, α={alpha}"));
        }
        Ok(Self {
            kind: ModulusKind::Holder { lambda, alpha },
            diameter: None,
            rigorous: true,
            label: format!("holder:{lambda},{alpha}"),
        })
    }

    pub fn lipschitz(lambda: f64) -> Result<Self> {
        Self::holder(lambda, 1.0)
    }

    pub fn zero() -> Self {
        Self::holder(0.0, 1.0).expect("valid parameters")
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return arg("tabulated modulus needs equally many radii and values");
        }
        if radii[0] <= 0.0 || radii.windows(2).any(|w| w[0] >= w[1]) {
            return arg("tabulated radii must be positive and strictly increasing");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || values.windows(2).any(|w| w[0] > w[1]) {
            return arg("tabulated values must be finite, nonnegative and nondecreasing");
        }
        Ok(Self {
            kind: ModulusKind::Tabulated { radii, values },
            diameter: None,
            rigorous: true,
            label: "tabulated".into(),
        })
    }

    pub fn callable(f: impl Fn(f64) -> f64 + Send + Sync + 'static, label: &str) -> Self {
        Self { kind: ModulusKind::Callable(Arc::new(f)), diameter: None, rigorous: true, label: label.into() }
    }

    /// Parses `holder:λ,α`, `lipschitz:λ` or `zero`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            params
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| ForgeError::Argument(format!("bad modulus parameter {p:?}")))
                })
                .collect()
        };
        match kind {
            "zero" => Ok(Self::zero()),
            "lipschitz" => match nums()?.as_slice() {
                [l] => Self::lipschitz(*l),
                _ => arg("lipschitz modulus takes one parameter"),
            },
            "holder" => match nums()?.as_slice() {
                [l, a] => Self::holder(*l, *a),
                _ => arg("holder modulus takes two parameters λ,α"),
            },
            _ => arg(format!("unknown modulus {spec:?}")),
        }
    }

    /// Values at `r ≥ diameter` are capped at `ω(diameter)`.
    pub fn with_diameter(mut self, diameter: f64) -> Self {
        self.diameter = Some(diameter);
        self
    }

    pub fn non_rigorous(mut self) -> Self {
        self.rigorous = false;
        self
    }

    pub fn is_rigorous(&self) -> bool {
        self.rigorous
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &ModulusKind {
        &self.kind
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let r = match self.diameter {
            Some(d) => r.min(d),
            None => r,
        };
        match &self.kind {
            ModulusKind::Holder { lambda, alpha } => {
                if *lambda == 0.0 {
                    0.0
                } else if *alpha == 1.0 {
                    lambda * r
                } else {
                    lambda * r.powf(*alpha)
                }
            }
            ModulusKind::Tabulated { radii, values } => {
                let last = radii.len() - 1;
                if r > radii[last] {
                    (r / radii[last]).ceil() * values[last]
                } else {
                    values[radii.partition_point(|t| *t < r)]
                }
            }
            ModulusKind::Callable(f) => f(r),
        }
    }

    /// `r ↦ ω(c·r)`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        let mut out = Self::callable(move |r| inner.eval(c * r), &format!("{}(x{c})", self.label));
        out.rigorous = self.rigorous;
        out
    }

    /// Checks `ω(0) = 0`, monotonicity and subadditivity on the given radii.
    pub fn check_subadditive(&self, radii: &[f64]) -> Option<(f64, f64)> {
        const TOL: f64 = 1e-12;
        if self.eval(0.0) != 0.0 {
            return Some((0.0, 0.0));
        }
        for &a in radii {
            for &b in radii {
                let (wa, wb, wab) = (self.eval(a), self.eval(b), self.eval(a + b));
                if wab > wa + wb + TOL * (1.0 + wab) || wab + TOL < wa.max(wb) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Nonrigorous estimate from random pairs in `[0,1]^dim`, tabulated on `bins` radii.
    pub fn estimate(
        f: &(dyn Fn(&[f64]) -> f64 + Sync),
        dim: usize,
        pairs: usize,
        bins: usize,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || pairs == 0 || bins == 0 {
            return arg("estimate needs positive dimension, pair count and bin count");
        }
        let diam = (dim as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slope: f64 = 0.0;
        let mut best = vec![0.0f64; bins];
        for _ in 0..pairs {
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let r = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if r == 0.0 {
                continue;
            }
            let v = (f(&x) - f(&y)).abs();
            let bin = ((r / diam) * bins as f64).ceil().clamp(1.0, bins as f64) as usize - 1;
            best[bin] = best[bin].max(v);
            slope = slope.max(v / r);
        }
        let radii: Vec<f64> = (1..=bins).map(|i| diam * i as f64 / bins as f64).collect();
        let mut values = Vec::with_capacity(bins);
        let mut run: f64 = 0.0;
        for (i, b) in best.iter().enumerate() {
            run = run.max(*b).max(slope * radii[i].min(radii[0]));
            values.push(run);
        }
        let mut m = Self::tabulated(radii, values)?.with_diameter(diam).non_rigorous();
        m.label = "empirical".into();
        Ok(m)
    }
}
