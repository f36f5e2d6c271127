//! Moduli of continuity, extension from finite sets, and approximation on irregular domains.

mod irregular;
mod mcshane;
mod modulus;

pub(crate) use mcshane::dist;
pub use irregular::{
    approximate_extension, approximate_on_domain, certify_on_domain, from_unit_cube, to_unit_cube,
    DomainReport,
};
pub use mcshane::{mcshane_extend, McShaneExtension, SampledDomain};
pub use modulus::{ModulusKind, ModulusOfContinuity};
