//! Approximation on neighborhoods of low-dimensional manifolds through random projections.

mod cloud;
mod pipeline;
mod projector;

pub use cloud::{PointCloud, BASE_TAG};
pub use pipeline::{
    build_manifold_approximant, ManifoldApproximant, ManifoldOptions, ManifoldReport, Selection,
};
pub use projector::{
    distortion_check, select_projector, sl_select, suggested_reduced_dim, ConfidencePolicy,
    DistortionStats, ProjectionMap,
};
