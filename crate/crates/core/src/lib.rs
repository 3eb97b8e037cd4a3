//! Finite-dimensional operator spaces, bioperators and their tensor norms.

pub mod bioperators;
pub mod error;
pub mod experiments;
pub mod matrix_core;
pub mod optimize;
pub mod quantum_space;
pub mod random;
pub mod tensor_products;

pub use bioperators::Bioperator;
pub use error::{Error, Result};
pub use matrix_core::{CMatrix, DiamondContext, C64};
pub use optimize::Budget;
pub use quantum_space::{AmplifiedElement, OperatorSpace, SpaceKind};
pub use tensor_products::{NormBracket, TensorPair, TensorRepresentation};
