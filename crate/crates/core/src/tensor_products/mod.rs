//! Tensor products of operator spaces: Effros and diamond products,
//! representations, merges, and norm brackets.

mod bracket;
mod equality;
mod pair;
mod representation;

pub use bracket::{
    chain_brackets, fournamed_bracket, gauge_effros, gauge_rigged, haagerup_bracket, haagerup_lower_bound,
    BracketOptions, BracketReport, ChainBrackets, LowerMethod, NormBracket, UpperMethod, CONSISTENCY_SLACK,
    RESOLVED_GAP,
};
pub use equality::{
    equality_instance, equality_suite, random_tensor, AuxSpace, EqualityCase, EqualityOutcome,
};
pub use pair::{rigged_apply, spatial_norm, TensorPair};
pub use representation::{
    as_effros_terms, as_rigged_terms, balance_effros, effros_to_rigged, elementary_representation,
    factorized_rigged_representation, merge_effros, merge_rigged, normalize_rigged, rigged_to_effros,
    rigged_value, EffrosTerm, RiggedTerm, TensorRepresentation, RECONSTRUCTION_TOL,
};
