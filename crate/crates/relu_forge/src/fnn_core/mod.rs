//! Network representation and evaluation, plus the composition algebra and the document format.

mod algebra;
mod cpwl;
mod gadgets;
mod network;
mod serialize;

pub use algebra::{
    compose_serial, pad_depth, postcompose_affine, precompose_affine, selector, stack_parallel,
    stack_parallel_with, Carrier,
};
pub use cpwl::{compile_cpwl, CpwlFunction, Extension};
pub use gadgets::{gadget_max2, gadget_mid3, gadget_min2};
pub use network::{Evaluator, Layer, ReluNetwork};
pub use serialize::{deserialize, format_hex_f64, parse_hex_f64, serialize, FORMAT_VERSION};
