//! Bilinear operators `R: E × F → G` stored by their structure tensor.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{fmt_shape, CMatrix, C64, ONE, ZERO};
use crate::quantum_space::OperatorSpace;

/// `R(x_i, y_j) = Σ_k c[i][j][k]·z_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BioperatorRepr", into = "BioperatorRepr")]
pub struct Bioperator {
    dom_e: Arc<OperatorSpace>,
    dom_f: Arc<OperatorSpace>,
    cod_g: Arc<OperatorSpace>,
    /// Flat `c[i][j][k]` at `(i·dim F + j)·dim G + k`.
    structure: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct BioperatorRepr {
    #[serde(rename = "dom_E")]
    dom_e: Arc<OperatorSpace>,
    #[serde(rename = "dom_F")]
    dom_f: Arc<OperatorSpace>,
    #[serde(rename = "cod_G")]
    cod_g: Arc<OperatorSpace>,
    /// `structure[i][j][k] = [re, im]`.
    structure: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<Bioperator> for BioperatorRepr {
    fn from(r: Bioperator) -> Self {
        let (ne, nf, ng) = r.dims();
        let structure = (0..ne)
            .map(|i| {
                (0..nf)
                    .map(|j| {
                        (0..ng)
                            .map(|k| {
                                let z = r.coefficient(i, j, k);
                                [z.re, z.im]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        BioperatorRepr { dom_e: r.dom_e, dom_f: r.dom_f, cod_g: r.cod_g, structure }
    }
}

impl TryFrom<BioperatorRepr> for Bioperator {
    type Error = Error;

    fn try_from(r: BioperatorRepr) -> Result<Self> {
        let (ne, nf, ng) = (r.dom_e.dim(), r.dom_f.dim(), r.cod_g.dim());
        if r.structure.len() != ne
            || r.structure.iter().any(|s| s.len() != nf || s.iter().any(|t| t.len() != ng))
        {
            return Err(Error::Malformed(format!("structure tensor must be {ne}x{nf}x{ng}")));
        }
        let flat = r
            .structure
            .iter()
            .flatten()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        Bioperator::new(r.dom_e, r.dom_f, r.cod_g, flat)
    }
}

impl Bioperator {
    pub fn new(
        dom_e: Arc<OperatorSpace>,
        dom_f: Arc<OperatorSpace>,
        cod_g: Arc<OperatorSpace>,
        structure: Vec<C64>,
    ) -> Result<Self> {
        let want = dom_e.dim() * dom_f.dim() * cod_g.dim();
        if structure.len() != want {
            return Err(mismatch("bioperator structure", want, structure.len()));
        }
        Ok(Bioperator { dom_e, dom_f, cod_g, structure })
    }

    pub fn from_fn(
        dom_e: Arc<OperatorSpace>,
        dom_f: Arc<OperatorSpace>,
        cod_g: Arc<OperatorSpace>,
        mut c: impl FnMut(usize, usize, usize) -> C64,
    ) -> Self {
        let (ne, nf, ng) = (dom_e.dim(), dom_f.dim(), cod_g.dim());
        let mut structure = Vec::with_capacity(ne * nf * ng);
        for i in 0..ne {
            for j in 0..nf {
                for k in 0..ng {
                    structure.push(c(i, j, k));
                }
            }
        }
        Bioperator { dom_e, dom_f, cod_g, structure }
    }

    /// Bifunctional `E × F → C` with `f(x_i, y_j) = values[i, j]`.
    pub fn bifunctional(
        dom_e: Arc<OperatorSpace>,
        dom_f: Arc<OperatorSpace>,
        values: &CMatrix,
    ) -> Result<Self> {
        let want = (dom_e.dim(), dom_f.dim());
        if values.shape() != want {
            return Err(mismatch("bifunctional", fmt_shape(want), fmt_shape(values.shape())));
        }
        Ok(Self::from_fn(dom_e, dom_f, Arc::new(OperatorSpace::scalars()), |i, j, _| values[(i, j)]))
    }

    /// The pairing `H × H̄ → C`, `(x, ȳ) ↦ ⟨x, y⟩`, with both spaces in
    /// standard coordinates.
    pub fn inner_product(h: Arc<OperatorSpace>, h_bar: Arc<OperatorSpace>) -> Result<Self> {
        if h.dim() != h_bar.dim() {
            return Err(mismatch("inner_product", h.dim(), h_bar.dim()));
        }
        let n = h.dim();
        Self::bifunctional(h, h_bar, &CMatrix::identity(n))
    }

    /// `f × g: (x, y) ↦ f(x)·g(y)`.
    pub fn product_of_functionals(
        dom_e: Arc<OperatorSpace>,
        f: &[C64],
        dom_f: Arc<OperatorSpace>,
        g: &[C64],
    ) -> Result<Self> {
        let values = CMatrix::column(f).try_mul(&CMatrix::row(g))?;
        Self::bifunctional(dom_e, dom_f, &values)
    }

    /// Multiplication `C × C → C`.
    pub fn scalar_multiplication() -> Self {
        let c = Arc::new(OperatorSpace::scalars());
        Bioperator { dom_e: c.clone(), dom_f: c.clone(), cod_g: c, structure: vec![ONE] }
    }

    /// `E × F → E ⊗_min F`, `(x, y) ↦ x ⊗ y`.
    pub fn canonical_tensor(dom_e: Arc<OperatorSpace>, dom_f: Arc<OperatorSpace>) -> Result<Self> {
        let g = Arc::new(OperatorSpace::spatial_product(&dom_e, &dom_f)?);
        let nf = dom_f.dim();
        Ok(Self::from_fn(dom_e, dom_f, g, |i, j, k| if k == i * nf + j { ONE } else { ZERO }))
    }

    pub fn dom_e(&self) -> &Arc<OperatorSpace> {
        &self.dom_e
    }

    pub fn dom_f(&self) -> &Arc<OperatorSpace> {
        &self.dom_f
    }

    pub fn cod_g(&self) -> &Arc<OperatorSpace> {
        &self.cod_g
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.dom_e.dim(), self.dom_f.dim(), self.cod_g.dim())
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> C64 {
        let (_, nf, ng) = self.dims();
        self.structure[(i * nf + j) * ng + k]
    }

    /// `R^op: F × E → G`, `(y, x) ↦ R(x, y)`.
    pub fn opposite(&self) -> Self {
        Self::from_fn(self.dom_f.clone(), self.dom_e.clone(), self.cod_g.clone(), |j, i, k| {
            self.coefficient(i, j, k)
        })
    }

    /// Coordinates of `R(x, y)` for coordinate vectors `x`, `y`.
    pub fn evaluate(&self, x: &[C64], y: &[C64]) -> Result<Vec<C64>> {
        let (ne, nf, ng) = self.dims();
        if x.len() != ne {
            return Err(mismatch("evaluate", ne, x.len()));
        }
        if y.len() != nf {
            return Err(mismatch("evaluate", nf, y.len()));
        }
        let mut out = vec![ZERO; ng];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.coefficient(i, j, k) * xi * yj;
                }
            }
        }
        Ok(out)
    }

    /// Nonzero `(i, j, k, c_ijk)` entries.
    pub(crate) fn nonzero_terms(&self) -> Vec<(usize, usize, usize, C64)> {
        let (ne, nf, ng) = self.dims();
        let mut out = Vec::new();
        for i in 0..ne {
            for j in 0..nf {
                for k in 0..ng {
                    let c = self.coefficient(i, j, k);
                    if c != ZERO {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }
}
