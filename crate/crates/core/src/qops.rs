//! Dense complex matrices at small dimension and the generator bases used to
//! expand traceless observables.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{FewError, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
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

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(FewError::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(rows: usize, cols: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != rows * cols {
            return Err(FewError::DimensionMismatch { expected: rows * cols, found: re.len() });
        }
        if im.len() != rows * cols {
            return Err(FewError::DimensionMismatch { expected: rows * cols, found: im.len() });
        }
        let data = re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect();
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let im = vec![0.0; entries.len()];
        Self::from_parts(rows, cols, entries, &im)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.im).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(FewError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        if self.cols != other.cols {
            return Err(FewError::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(FewError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(m)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `M - M^dag`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part is used. Runs cyclic Jacobi on the real
    /// symmetric embedding `[[A, -B], [B, A]]` of `H = A + iB`, whose spectrum
    /// is that of `H` with every eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(FewError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                a[i * m + j] = h.re;
                a[(i + n) * m + (j + n)] = h.re;
                a[i * m + (j + n)] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        let mut evals = jacobi_eigenvalues(&mut a, m);
        evals.sort_by(f64::total_cmp);
        Ok(evals.into_iter().step_by(2).collect())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[i * n + i] * a[i * n + i];
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off <= 1e-30 * (diag + 1e-300) || off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Kronecker product; the first factor carries the most significant index.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    m[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Kronecker product of a non-empty list of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let mut it = factors.into_iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, f| tensor_product(&acc, f))
}

/// `Tr(a^dag b)`
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(FewError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.rows != b.rows || a.cols != b.cols {
        return Err(FewError::DimensionMismatch { expected: a.rows, found: b.rows });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    libm::sqrt(a.data.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Real part of `Tr(a b)` for square matrices of equal size.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(trace_product(a, b)?.re)
}

pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(FewError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.rows != b.rows || a.cols != b.cols {
        return Err(FewError::DimensionMismatch { expected: a.rows, found: b.rows });
    }
    let n = a.rows;
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a.data[i * n + k] * b.data[k * n + i];
        }
    }
    Ok(acc)
}

/// Identity followed by `d^2 - 1` traceless Hermitian generators of su(d),
/// normalized to `Tr(l_j l_k) = 2 delta_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl Index<usize> for GeneratorBasis {
    type Output = CMatrix;
    fn index(&self, k: usize) -> &CMatrix {
        &self.elements[k]
    }
}

/// Generalized Gell-Mann basis.
///
/// Ordering per column `k = 1..d`: for each row `j < k` the symmetric then
/// antisymmetric element on `(j, k)`, followed by the `k`-th diagonal element.
/// For `d = 2` this yields `I, sx, sy, sz`; for `d = 3` the standard
/// `I, l1, ..., l8`.
pub fn su_d_basis(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(FewError::UnsupportedDimension(d));
    }
    let mut elements = Vec::with_capacity(d * d);
    elements.push(CMatrix::identity(d));
    for k in 1..d {
        for j in 0..k {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            elements.push(sym);

            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -1.0);
            anti[(k, j)] = C64::new(0.0, 1.0);
            elements.push(anti);
        }
        let kf = k as f64;
        let norm = libm::sqrt(2.0 / (kf * (kf + 1.0)));
        let mut diag = CMatrix::zeros(d, d);
        for m in 0..k {
            diag[(m, m)] = C64::new(norm, 0.0);
        }
        diag[(k, k)] = C64::new(-kf * norm, 0.0);
        elements.push(diag);
    }
    Ok(GeneratorBasis { dim: d, elements })
}

/// All Kronecker products of the per-subsystem generator bases, flattened in
/// row-major multi-index order (first subsystem slowest).
#[derive(Debug, Clone)]
pub struct ProductBasis {
    dims: Vec<usize>,
    total_dim: usize,
    elements: Vec<CMatrix>,
}

impl ProductBasis {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(FewError::InvalidConfig("no subsystems".into()));
        }
        let bases = dims.iter().map(|&d| su_d_basis(d)).collect::<Result<Vec<_>>>()?;
        let mut elements = vec![CMatrix::identity(1)];
        for basis in &bases {
            let mut next = Vec::with_capacity(elements.len() * basis.len());
            for prefix in &elements {
                for g in basis.elements() {
                    next.push(tensor_product(prefix, g));
                }
            }
            elements = next;
        }
        Ok(ProductBasis { dims: dims.to_vec(), total_dim: dims.iter().product(), elements })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Hilbert space dimension `prod d_i`.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Number of product elements, `prod d_i^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Coefficient shape `[d_1^2, ..., d_n^2]`.
    pub fn shape(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d * d).collect()
    }

    pub fn element(&self, flat_index: usize) -> &CMatrix {
        &self.elements[flat_index]
    }

    /// Sum of `tau[k] * element(k)`. `tau[0]` must be exactly zero.
    pub fn assemble(&self, tau: &[f64]) -> Result<CMatrix> {
        if tau.len() != self.elements.len() {
            return Err(FewError::DimensionMismatch { expected: self.elements.len(), found: tau.len() });
        }
        if tau[0] != 0.0 {
            return Err(FewError::NonzeroIdentityCoefficient(tau[0]));
        }
        let n = self.total_dim;
        let mut z = CMatrix::zeros(n, n);
        for (k, &t) in tau.iter().enumerate().skip(1) {
            if t != 0.0 {
                z.add_scaled(t, &self.elements[k])?;
            }
        }
        Ok(z)
    }

    /// Coefficients `Tr(M g_k) / Tr(g_k^2)`; the inverse of [`assemble`](Self::assemble)
    /// on Hermitian matrices. Entry 0 is the identity coefficient.
    pub fn project(&self, m: &CMatrix) -> Result<Vec<f64>> {
        if m.rows != self.total_dim || m.cols != self.total_dim {
            return Err(FewError::DimensionMismatch { expected: self.total_dim, found: m.rows });
        }
        self.elements
            .iter()
            .map(|g| {
                let norm = trace_product_re(g, g)?;
                Ok(trace_product_re(m, g)? / norm)
            })
            .collect()
    }
}

/// One-shot version of [`ProductBasis::assemble`].
pub fn assemble_observable(tau: &[f64], dims: &[usize]) -> Result<CMatrix> {
    ProductBasis::new(dims)?.assemble(tau)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_parts(2, 2, &[0.0; 4], &[0.0, -1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}
