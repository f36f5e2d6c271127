//! Explicit ReLU network constructions with certified approximation error.
//!
//! The crate builds networks of width `O(N)` and depth `O(L)` that approximate a
//! continuous target on `[0,1]^d` with error `19·√d·ω_f(N^{-2/d} L^{-2/d})`, and checks
//! that bound empirically. The pieces:
//!
//! * [`fnn_core`]: the network representation, composition algebra, gadgets, serialization.
//! * [`constructions`]: point fitting, reshaping, step functions, bit extraction.
//! * [`approximator`]: the end-to-end pipeline plus certification and sweeps.
//! * [`domain_ext`]: moduli of continuity, McShane extension, irregular domains.
//! * [`manifold`]: random orthoprojectors and the low-dimensional-manifold pipeline.
//! * [`planner`]: the parallel training cost model and `(N, L)` selection.
//! * [`fixtures`]: target functions with known moduli.
//! * [`cli`]: the `relu-forge` command line.

pub mod approximator;
pub mod cli;
pub mod constructions;
pub mod domain_ext;
pub mod error;
pub mod fixtures;
pub mod fnn_core;
pub mod manifold;
pub mod planner;

pub use error::{ForgeError, Result};
pub use fnn_core::{Carrier, CpwlFunction, Extension, Layer, ReluNetwork};
