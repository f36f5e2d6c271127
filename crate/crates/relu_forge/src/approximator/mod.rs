//! The width/depth approximation pipeline on `[0,1]^d` and its empirical certification.

mod certify;
mod lift;
mod partition;
mod pipeline;
mod target;

pub(crate) use certify::csv_err;
pub use certify::{
    certify, loglog_slope, rate_sweep, write_sweep_csv, ErrorReport, SamplePlan, SweepRow,
    SWEEP_HEADER,
};
pub use lift::uniform_lift;
pub use partition::{check_delta, in_trifling, Partition};
pub use pipeline::{
    build_approximant, build_approximant_with, build_g, choose_delta, index_map, index_position,
    rate_radius, Approximant, BuildOptions, Norm, DEFAULT_EVAL_CAP, EVAL_CAP_ENV, LIFT_DIM_CAP,
};
pub use target::TargetFunction;
