//! Concrete operator spaces `E ⊆ B(C^h, C^k)` given by a basis.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{fmt_shape, matrix_unit, CMatrix, C64, ONE};
use crate::random::gaussian_matrix;

/// Largest assembled side length any routine will materialize.
pub const DIMENSION_CAP: usize = 4096;

/// Relative singular-value threshold for the basis independence check.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Generic,
    Column,
    Row,
    ConjugateRow,
    ConjugateColumn,
    SpatialProduct,
    FiniteRank,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Generic => "generic",
            SpaceKind::Column => "column",
            SpaceKind::Row => "row",
            SpaceKind::ConjugateRow => "conjugate_row",
            SpaceKind::ConjugateColumn => "conjugate_column",
            SpaceKind::SpatialProduct => "spatial_product",
            SpaceKind::FiniteRank => "finite_rank",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct OperatorSpace {
    kind: SpaceKind,
    in_dim: usize,
    out_dim: usize,
    basis: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    kind: SpaceKind,
    in_dim: usize,
    out_dim: usize,
    basis: Vec<CMatrix>,
}

impl From<OperatorSpace> for SpaceRepr {
    fn from(s: OperatorSpace) -> Self {
        SpaceRepr { kind: s.kind, in_dim: s.in_dim, out_dim: s.out_dim, basis: s.basis }
    }
}

impl TryFrom<SpaceRepr> for OperatorSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        let space = OperatorSpace::new(r.kind, r.basis)?;
        if space.in_dim != r.in_dim || space.out_dim != r.out_dim {
            return Err(Error::Malformed(format!(
                "declared {}x{} but basis is {}x{}",
                r.out_dim, r.in_dim, space.out_dim, space.in_dim
            )));
        }
        Ok(space)
    }
}

impl OperatorSpace {
    /// Builds a space from `k×h` basis matrices, rejecting dependent bases
    /// and shapes that contradict the kind.
    pub fn new(kind: SpaceKind, basis: Vec<CMatrix>) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidSpace("basis must be nonempty".into()))?;
        let (out_dim, in_dim) = first.shape();
        if out_dim == 0 || in_dim == 0 {
            return Err(Error::InvalidSpace("basis matrices must be nonempty".into()));
        }
        if out_dim > DIMENSION_CAP || in_dim > DIMENSION_CAP {
            return Err(Error::DimensionCap { size: out_dim.max(in_dim), cap: DIMENSION_CAP });
        }
        if let Some(bad) = basis.iter().find(|b| b.shape() != (out_dim, in_dim)) {
            return Err(Error::InvalidSpace(format!(
                "basis shapes differ: {} vs {}",
                fmt_shape((out_dim, in_dim)),
                fmt_shape(bad.shape())
            )));
        }
        match kind {
            SpaceKind::Column | SpaceKind::ConjugateColumn if in_dim != 1 => {
                return Err(Error::InvalidSpace(format!(
                    "{} space needs in_dim 1, got {in_dim}",
                    kind.as_str()
                )));
            }
            SpaceKind::Row | SpaceKind::ConjugateRow if out_dim != 1 => {
                return Err(Error::InvalidSpace(format!(
                    "{} space needs out_dim 1, got {out_dim}",
                    kind.as_str()
                )));
            }
            _ => {}
        }
        check_independent(&basis)?;
        Ok(OperatorSpace { kind, in_dim, out_dim, basis })
    }

    /// `H_c`: basis of standard `h×1` columns.
    pub fn column(h: usize) -> Result<Self> {
        Self::new(SpaceKind::Column, standard_columns(h)?)
    }

    /// `H_r`: basis of standard `1×h` rows.
    pub fn row(h: usize) -> Result<Self> {
        Self::new(SpaceKind::Row, standard_rows(h)?)
    }

    /// Conjugate Hilbert space with the row quantization. Coordinates are
    /// those of `H`; the conjugation enters only through pairings.
    pub fn conjugate_row(h: usize) -> Result<Self> {
        Self::new(SpaceKind::ConjugateRow, standard_rows(h)?)
    }

    pub fn conjugate_column(h: usize) -> Result<Self> {
        Self::new(SpaceKind::ConjugateColumn, standard_columns(h)?)
    }

    /// The one-dimensional space `C`.
    pub fn scalars() -> Self {
        OperatorSpace {
            kind: SpaceKind::Generic,
            in_dim: 1,
            out_dim: 1,
            basis: vec![CMatrix::identity(1)],
        }
    }

    /// `M_{k,h}` with its matrix units `e_i∘e_j` ordered row-major.
    pub fn full_matrices(k: usize, h: usize) -> Result<Self> {
        if k == 0 || h == 0 {
            return Err(Error::InvalidSpace("matrix space dimensions must be positive".into()));
        }
        let basis = (0..k)
            .flat_map(|i| {
                (0..h).map(move |j| {
                    let mut e = CMatrix::zeros(k, h);
                    e[(i, j)] = ONE;
                    e
                })
            })
            .collect();
        Self::new(SpaceKind::Generic, basis)
    }

    /// `B(C^h)` viewed as the finite-rank operators on `C^h`, basis `e_i∘e_j`.
    pub fn finite_rank(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        let basis = (0..h).flat_map(|i| (0..h).map(move |j| matrix_unit(h, i, j))).collect();
        Self::new(SpaceKind::FiniteRank, basis)
    }

    /// Spatial tensor product `E ⊗_min F ⊆ B(C^{h_E h_F}, C^{k_E k_F})`, basis
    /// `x_i ⊗ y_j` at index `i·dim F + j`.
    pub fn spatial_product(e: &OperatorSpace, f: &OperatorSpace) -> Result<Self> {
        let out = e.out_dim * f.out_dim;
        let inn = e.in_dim * f.in_dim;
        if out > DIMENSION_CAP || inn > DIMENSION_CAP {
            return Err(Error::DimensionCap { size: out.max(inn), cap: DIMENSION_CAP });
        }
        let basis = e.basis.iter().flat_map(|x| f.basis.iter().map(move |y| x.kron(y))).collect();
        Self::new(SpaceKind::SpatialProduct, basis)
    }

    /// A random `dim`-dimensional subspace of `M_{k,h}` with Gaussian basis.
    pub fn random_generic<R: Rng + ?Sized>(
        rng: &mut R,
        dim: usize,
        k: usize,
        h: usize,
    ) -> Result<Self> {
        if dim > k * h {
            return Err(Error::InvalidSpace(format!(
                "cannot fit {dim} independent matrices in {}",
                fmt_shape((k, h))
            )));
        }
        let basis = (0..dim).map(|_| gaussian_matrix(rng, k, h)).collect();
        Self::new(SpaceKind::Generic, basis)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// `Σ x_i·basis_i`.
    pub fn combine(&self, x: &[C64]) -> Result<CMatrix> {
        if x.len() != self.dim() {
            return Err(mismatch("combine", self.dim(), x.len()));
        }
        let mut out = CMatrix::zeros(self.out_dim, self.in_dim);
        for (b, &c) in self.basis.iter().zip(x) {
            out.add_block(0, 0, b, c);
        }
        Ok(out)
    }

    /// Hilbert-space kinds whose quantum norms have closed forms.
    pub fn is_hilbertian(&self) -> bool {
        matches!(
            self.kind,
            SpaceKind::Column | SpaceKind::Row | SpaceKind::ConjugateColumn | SpaceKind::ConjugateRow
        )
    }
}

fn standard_columns(h: usize) -> Result<Vec<CMatrix>> {
    if h == 0 {
        return Err(Error::InvalidSpace("Hilbert space dimension must be positive".into()));
    }
    Ok((0..h).map(|k| CMatrix::basis_column(h, k)).collect())
}

fn standard_rows(h: usize) -> Result<Vec<CMatrix>> {
    Ok(standard_columns(h)?.into_iter().map(|c| c.transpose()).collect())
}

fn check_independent(basis: &[CMatrix]) -> Result<()> {
    let count = basis.len();
    let len = basis[0].rows() * basis[0].cols();
    if count > len {
        return Err(Error::DependentBasis { rank: len, count });
    }
    let stacked = CMatrix::from_fn(len, count, |p, i| basis[i].as_slice()[p]);
    let sv = stacked.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * top && s > 0.0).count();
    if rank < count {
        return Err(Error::DependentBasis { rank, count });
    }
    Ok(())
}
