//! Concrete operator spaces, their amplifications and quantum norms.

mod cb;
mod element;
mod ruan;
mod space;
mod witnesses;

pub use cb::{
    cb_norm_estimate, cb_norm_profile, functional_norm, CbEstimate, CbOptions, FunctionalNorm,
    LinearMap,
};
pub use element::{
    amplified_norm, corner_embed, module_action, transport, underlying_norm,
    underlying_norm_via_projection, AmplifiedElement,
};
pub use ruan::{
    check_orthogonal_sum_bound, check_ruan_ri, check_ruan_rii, InequalityReport, RiiReport,
    SupportSide, EQUALITY_TOL, INEQUALITY_SLACK,
};
pub use space::{OperatorSpace, SpaceKind, DIMENSION_CAP};
pub use witnesses::{make_block_omega, make_block_varpi, make_omega, make_varpi};
