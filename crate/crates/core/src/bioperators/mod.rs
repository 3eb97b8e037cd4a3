//! Bilinear operators between operator spaces and their amplifications.

mod amplify;
mod bioperator;
mod estimate;

pub use amplify::{
    bifunctional_matrix, canonical_tensor_factor_check, compose_through_operator,
    compression_identity_check, delta_conjugate_element, diamond_act_left, diamond_act_right,
    opposite_identity_check, strong_amplify, weak_amplify, IdentityReport, ProductFactorReport,
};
pub use bioperator::Bioperator;
pub use estimate::{
    amplification_ratio, estimate_scb, estimate_wcb, Amplification, BiEstimateOptions,
    WitnessReport,
};
