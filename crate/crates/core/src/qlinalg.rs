//! Dense complex linear algebra for small quantum registers.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Tensor factors are described by a [`SubsystemShape`]; factor
//! `0` is the most significant digit of a basis index, so for the shape
//! `[dA, dB, dX]` the basis state `|a b x⟩` sits at `(a·dB + b)·dX + x`.
//!
//! Hermitian spectra are delegated to `nalgebra`'s symmetric eigensolver.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default Hermiticity tolerance for spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default threshold below which an eigenvalue counts as negative.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance used when a matrix is required to be a density matrix.
pub const DENSITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|` for a state vector `ψ`.
    pub fn projector(psi: &[Complex64]) -> Self {
        let n = psi.len();
        Self::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix product; panics on mismatched inner dimensions.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: inner dimensions {} and {} differ",
            self.cols, other.rows
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "apply: vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Checks Hermiticity and unit trace, both within `tol`.
    pub fn check_density(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::NotDensity(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Determinant via LU factorization.
    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        Ok(self.to_nalgebra().determinant())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Local dimensions of the tensor factors of a register, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

/// `(kept, traced)` index pairs with the kept and traced dimensions.
type SplitTable = (Vec<(usize, usize)>, usize, usize);

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "subsystem dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// Two qubits.
    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::ShapeMismatch {
                dims: self.dims.clone(),
                dim: m.rows(),
            });
        }
        Ok(())
    }

    fn check_factor(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::InvalidSubsystem {
                index,
                factors: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Splits every basis index into (kept index, traced index).
    fn split_table(&self, keep: &[usize]) -> Result<SplitTable> {
        let mut mask = vec![false; self.dims.len()];
        for &k in keep {
            self.check_factor(k)?;
            mask[k] = true;
        }
        let kept_dim: usize = self.dims.iter().zip(&mask).filter(|(_, &m)| m).map(|(d, _)| d).product();
        let traced_dim = self.total() / kept_dim;
        let mut table = Vec::with_capacity(self.total());
        let mut digits = vec![0usize; self.dims.len()];
        for _ in 0..self.total() {
            let (mut kept, mut traced) = (0, 0);
            for (f, &digit) in digits.iter().enumerate() {
                if mask[f] {
                    kept = kept * self.dims[f] + digit;
                } else {
                    traced = traced * self.dims[f] + digit;
                }
            }
            table.push((kept, traced));
            // odometer increment, least significant factor last
            for f in (0..digits.len()).rev() {
                digits[f] += 1;
                if digits[f] < self.dims[f] {
                    break;
                }
                digits[f] = 0;
            }
        }
        Ok((table, kept_dim, traced_dim))
    }

    fn stride(&self, factor: usize) -> usize {
        self.dims[factor + 1..].iter().product()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Traces out every factor not listed in `keep`.
///
/// Kept factors appear in the result in ascending factor order regardless of
/// the order given in `keep`.
pub fn partial_trace(rho: &ComplexMatrix, shape: &SubsystemShape, keep: &[usize]) -> Result<ComplexMatrix> {
    shape.check_matrix(rho)?;
    let (table, kept_dim, traced_dim) = shape.split_table(keep)?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); traced_dim];
    for (full, &(_, traced)) in table.iter().enumerate() {
        groups[traced].push(full);
    }
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &i in group {
            for &j in group {
                out[(table[i].0, table[j].0)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_from_pure(psi: &[Complex64], shape: &SubsystemShape, keep: &[usize]) -> Result<ComplexMatrix> {
    if psi.len() != shape.total() {
        return Err(Error::ShapeMismatch {
            dims: shape.dims().to_vec(),
            dim: psi.len(),
        });
    }
    let (table, kept_dim, traced_dim) = shape.split_table(keep)?;
    // Ψ[kept][traced], so ρ = Ψ Ψ†
    let mut amp = vec![ZERO; kept_dim * traced_dim];
    for (full, &(k, t)) in table.iter().enumerate() {
        amp[k * traced_dim + t] = psi[full];
    }
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        let ra = &amp[a * traced_dim..(a + 1) * traced_dim];
        for b in a..kept_dim {
            let rb = &amp[b * traced_dim..(b + 1) * traced_dim];
            let v: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            out[(a, b)] = v;
            out[(b, a)] = v.conj();
        }
    }
    Ok(out)
}

/// Transposes the indices of one tensor factor.
pub fn partial_transpose(rho: &ComplexMatrix, shape: &SubsystemShape, subsystem: usize) -> Result<ComplexMatrix> {
    shape.check_matrix(rho)?;
    shape.check_factor(subsystem)?;
    let stride = shape.stride(subsystem);
    let dim = shape.dims()[subsystem];
    let digit = |i: usize| (i / stride) % dim;
    let n = rho.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let (di, dj) = (digit(i), digit(j));
        let src_i = i - di * stride + dj * stride;
        let src_j = j - dj * stride + di * stride;
        rho[(src_i, src_j)]
    }))
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues_tol(m, HERMITIAN_TOL)
}

/// [`hermitian_eigenvalues`] with an explicit Hermiticity tolerance.
pub fn hermitian_eigenvalues_tol(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    check_hermitian(m, tol)?;
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues (ascending) with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(m, HERMITIAN_TOL)?;
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let deviation = m.hermiticity_error();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// True iff `m` is Hermitian within `tol` and its smallest eigenvalue is `≥ -tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    match hermitian_eigenvalues_tol(m, tol.max(HERMITIAN_TOL)) {
        Ok(vals) => vals[0] >= -tol,
        Err(_) => false,
    }
}

/// Pauli matrices `(σx, σy, σz)`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO }),
        ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => ZERO,
        }),
        ComplexMatrix::diag(&[1.0, -1.0]),
    ]
}

/// Euclidean norm squared of a state vector.
pub fn norm_sq(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
