//! Dense complex matrices and the finite models of the Hilbert-space devices
//! built on them.

mod cmatrix;
mod diamond;
mod factor;
mod isometries;

pub use cmatrix::{inner, kron, op_norm, vec_norm, CMatrix, Svd, C64, ONE, ZERO};
pub(crate) use cmatrix::fmt_shape;
pub use diamond::{delta_conjugate, diamond, diamond_rect, pair_index, DiamondContext};
pub use factor::{diamond_square_factor, DiamondFactorization, SINGULAR_CUTOFF};
pub use isometries::{
    left_slot_isometry, make_block_partial_isometries, make_corner_isometries,
    make_partial_isometries, matrix_unit, rank_one, right_slot_isometry, PartialIsometries,
};
