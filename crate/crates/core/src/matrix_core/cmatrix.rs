//! Dense complex matrices in row-major storage.
//!
//! `CMatrix` carries every operator in the crate: coefficients, basis
//! operators of concrete operator spaces, and the assembled block matrices
//! whose largest singular value is the quantum norm. Singular values and
//! Hermitian eigendecompositions are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrixRepr", into = "CMatrixRepr")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

/// Wire format: `{"rows", "cols", "re", "im"}` with row-major parts.
#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<CMatrix> for CMatrixRepr {
    fn from(m: CMatrix) -> Self {
        CMatrixRepr {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<CMatrixRepr> for CMatrix {
    type Error = Error;

    fn try_from(r: CMatrixRepr) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::Malformed(format!(
                "re has {} entries but im has {}",
                r.re.len(),
                r.im.len()
            )));
        }
        let data = r.re.into_iter().zip(r.im).map(|(re, im)| C64::new(re, im)).collect();
        CMatrix::new(r.rows, r.cols, data)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch("CMatrix::new", rows * cols, data.len()));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn scalar(z: C64) -> Self {
        CMatrix { rows: 1, cols: 1, data: vec![z] }
    }

    /// Column vector (n×1).
    pub fn column(v: &[C64]) -> Self {
        CMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Row vector (1×n).
    pub fn row(v: &[C64]) -> Self {
        CMatrix { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Standard basis vector `e_k` of `C^n` as an n×1 column.
    pub fn basis_column(n: usize, k: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m[(k, 0)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, z: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(C64::new(t, 0.0))
    }

    pub fn try_mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(mismatch(
                "matrix product",
                format!("{} rows on the right", self.cols),
                other.rows,
            ));
        }
        let (n, k, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let orow = &mut out[i * p..(i + 1) * p];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[l * p..(l + 1) * p];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix { rows: n, cols: p, data: out })
    }

    pub fn try_add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.shape() != other.shape() {
            return Err(mismatch("matrix sum", fmt_shape(self.shape()), fmt_shape(other.shape())));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Standard Kronecker product: `(A⊗B)[i·p + k, j·q + l] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (p, q) = other.shape();
        let rows = self.rows * p;
        let cols = self.cols * q;
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..p {
                    let base = (i * p + k) * cols + j * q;
                    for l in 0..q {
                        data[base + l] = a * other.data[k * q + l];
                    }
                }
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Adds `z·block` into the sub-matrix starting at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &CMatrix, z: C64) {
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            for j in 0..block.cols {
                self.data[dst + j] += z * block.data[i * block.cols + j];
            }
        }
    }

    /// Copy of `self` placed in the top-left corner of a zero `rows×cols` matrix.
    pub fn pad_to(&self, rows: usize, cols: usize) -> Result<CMatrix> {
        if rows < self.rows || cols < self.cols {
            return Err(mismatch(
                "pad_to",
                format!("at least {}", fmt_shape(self.shape())),
                fmt_shape((rows, cols)),
            ));
        }
        let mut out = CMatrix::zeros(rows, cols);
        out.add_block(0, 0, self, ONE);
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation; `f64::INFINITY` when shapes differ.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Singular values in nonincreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Induced operator norm (largest singular value). Zero matrix gives 0.
    pub fn op_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Full singular value decomposition `self = U·diag(σ)·V*` for a square
    /// matrix, with σ sorted nonincreasing.
    pub fn svd(&self) -> Result<Svd> {
        if !self.is_square() {
            return Err(mismatch("svd", "square matrix", fmt_shape(self.shape())));
        }
        let n = self.rows;
        let dec = self.to_nalgebra().svd(true, true);
        let u = dec.u.ok_or_else(|| Error::Malformed("svd did not return U".into()))?;
        let v_t = dec.v_t.ok_or_else(|| Error::Malformed("svd did not return V*".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
        let sigma = order.iter().map(|&k| dec.singular_values[k]).collect();
        let u = CMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
        let v_adj = CMatrix::from_fn(n, n, |i, j| v_t[(order[i], j)]);
        Ok(Svd { u, sigma, v_adj })
    }

    /// Eigendecomposition of a Hermitian matrix: eigenvalues and unitary
    /// eigenvector matrix (columns).
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        if !self.is_square() {
            return Err(mismatch("hermitian_eigen", "square matrix", fmt_shape(self.shape())));
        }
        let dec = self.to_nalgebra().symmetric_eigen();
        Ok((dec.eigenvalues.iter().copied().collect(), CMatrix::from_nalgebra(&dec.eigenvectors)))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Orthogonal projection test: `P = P*` and `P² = P`.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).max_abs_diff(self) <= tol
    }
}

pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v_adj: CMatrix,
}

pub(crate) fn fmt_shape((r, c): (usize, usize)) -> String {
    format!("{r}x{c}")
}

/// Inner product linear in the first argument: `⟨x, y⟩ = Σ x_i·conj(y_i)`.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of `m`.
pub fn op_norm(m: &CMatrix) -> f64 {
    m.op_norm()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, seeded_rng};

    /// Independent oracle: power iteration on M*M.
    fn power_iteration_norm(m: &CMatrix) -> f64 {
        let g = &m.adjoint() * m;
        let n = g.cols();
        let mut x = CMatrix::from_fn(n, 1, |i, _| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64));
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let y = &g * &x;
            let nrm = y.frobenius_norm();
            if nrm == 0.0 {
                return 0.0;
            }
            let next = nrm / x.frobenius_norm();
            x = y.scale_real(1.0 / nrm);
            if (next - lambda).abs() <= 1e-15 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    #[test]
    fn identity_has_unit_norm() {
        assert!((CMatrix::identity(2).op_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_norm_is_zero() {
        assert_eq!(CMatrix::zeros(3, 2).op_norm(), 0.0);
    }

    #[test]
    fn op_norm_matches_power_iteration() {
        let mut rng = seeded_rng(7);
        for _ in 0..5 {
            let m = gaussian_matrix(&mut rng, 4, 3);
            let a = m.op_norm();
            let b = power_iteration_norm(&m);
            assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn kron_identities_give_identity() {
        let k = CMatrix::identity(2).kron(&CMatrix::identity(3));
        assert_eq!(k, CMatrix::identity(6));
    }

    #[test]
    fn kron_mixed_product_rule() {
        let mut rng = seeded_rng(11);
        let a = gaussian_matrix(&mut rng, 2, 3);
        let b = gaussian_matrix(&mut rng, 3, 2);
        let c = gaussian_matrix(&mut rng, 3, 2);
        let d = gaussian_matrix(&mut rng, 2, 4);
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn kron_norm_is_multiplicative() {
        let mut rng = seeded_rng(13);
        for _ in 0..10 {
            let a = gaussian_matrix(&mut rng, 3, 3);
            let b = gaussian_matrix(&mut rng, 3, 3);
            let lhs = a.kron(&b).op_norm();
            let rhs = a.op_norm() * b.op_norm();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = seeded_rng(3);
        let a = gaussian_matrix(&mut rng, 5, 5);
        let svd = a.svd().unwrap();
        let s = CMatrix::diagonal(&svd.sigma.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let back = &(&svd.u * &s) * &svd.v_adj;
        assert!(back.max_abs_diff(&a) < 1e-12);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn json_shape_is_checked() {
        let bad = r#"{"rows":2,"cols":2,"re":[1,2,3],"im":[0,0,0]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.starts_with(r#"{"rows":2,"cols":3,"re":"#));
        assert_eq!(serde_json::from_str::<CMatrix>(&text).unwrap(), m);
    }

    #[test]
    fn product_shape_mismatch_is_an_error() {
        assert!(CMatrix::zeros(2, 3).try_mul(&CMatrix::zeros(2, 3)).is_err());
    }
}
