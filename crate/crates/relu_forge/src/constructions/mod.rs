//! Explicit network constructions: point fitting, reshaping, staircases, bit extraction.

mod bits;
mod grid;
mod point_fit;
mod reshape;
mod step;

pub use bits::{bit_extract_net, bit_sum_net, BitMatrix, BIT_CAP};
pub use grid::{grid_fit_net, point_fit_net, SampleSequence};
pub use point_fit::fit_points_two_layer;
pub use reshape::{pad_two_layer, wide_to_deep};
pub use step::{iroot, step_count, step_function_net};
