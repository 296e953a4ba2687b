//! Dense complex matrices and the handful of spectral routines the rest of
//! the crate needs. Dimensions here never exceed 64, so everything is plain
//! row-major storage.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{contract, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance used for contract checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
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

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return contract(format!(
                "matrix of shape {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Real-valued matrix from nested rows; handy in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return contract("ragged rows");
        }
        Ok(Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0)))
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return contract(format!(
                "shape mismatch in product: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return contract("vector length does not match column count");
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product, row-major: `(A ⊗ B)[(i·rB + k, j·cB + l)] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let (rb, cb) = (other.rows, other.cols);
        Self::from_fn(self.rows * rb, self.cols * cb, |r, c| {
            self[(r / rb, c / cb)] * other[(r % rb, c % cb)]
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M − M†|` entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `max |M†M − I|` entrywise; zero for isometries (orthonormal columns).
    pub fn isometry_error(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("square gram");
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
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
        self.matmul(rhs).expect("shape mismatch in product")
    }
}

/// Kronecker product of two state vectors (row-major).
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &l)| v[(i, k)] * v[(j, k)].conj() * l)
                .sum()
        })
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return contract(format!("eigen-decomposition needs a square matrix, got {}x{}", m.rows, m.cols));
    }
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return contract(format!("matrix is not Hermitian (max |M - M†| = {err:.3e})"));
    }
    Ok(hermitian_eig_unchecked(m))
}

/// Eigen-decomposition without the Hermiticity check; the strictly lower
/// triangle is ignored in favour of the upper one.
pub(crate) fn hermitian_eig_unchecked(m: &ComplexMatrix) -> Spectrum {
    let n = m.rows();
    // symmetrize so roundoff in the input cannot leak into the solver
    let sym = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(m[(i, i)].re, 0.0)
        } else if i < j {
            m[(i, j)]
        } else {
            m[(j, i)].conj()
        }
    });
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, descending. Closed forms for sizes 1 and 2.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    match m.rows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
            let b = m[(0, 1)];
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + b.norm_sqr()).sqrt();
            vec![mean + r, mean - r]
        }
        _ => hermitian_eig_unchecked(m).eigenvalues,
    }
}

/// Hermitian `d×d` matrix from `d²` real coordinates: the diagonal first,
/// then real/imaginary parts of the strict upper triangle row by row.
pub fn hermitian_from_params(d: usize, params: &[f64]) -> Result<ComplexMatrix> {
    if params.len() != d * d {
        return contract(format!("a {d}x{d} Hermitian generator needs {} parameters", d * d));
    }
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(params[k], params[k + 1]);
            k += 2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    Ok(h)
}

/// `exp(iH)` for Hermitian `H`, through its eigen-decomposition.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(h)?;
    let v = &spec.eigenvectors;
    let n = v.rows();
    let phases: Vec<C64> = spec.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    }))
}

/// Modified Gram–Schmidt on the columns (the Q factor of a thin QR).
/// Fails if the columns are numerically dependent.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols > rows {
        return contract(format!("cannot orthonormalize {cols} columns in dimension {rows}"));
    }
    let mut q: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    for j in 0..cols {
        for k in 0..j {
            let (done, rest) = q.split_at_mut(j);
            let proj = inner(&done[k], &rest[0]);
            for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                *x -= proj * y;
            }
        }
        let norm = norm_sqr(&q[j]).sqrt();
        if norm < 1e-12 {
            return contract("columns are linearly dependent");
        }
        for x in q[j].iter_mut() {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_layout_is_row_major() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 5.0], &[6.0, 7.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], C64::new(5.0, 0.0));
        assert_eq!(k[(1, 2)], C64::new(12.0, 0.0));
        assert_eq!(k[(3, 3)], C64::new(28.0, 0.0));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(crate::Error::Contract(_))));
    }

    #[test]
    fn eig_of_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[0.3, 0.7]);
        let s = hermitian_eig(&m).unwrap();
        assert!((s.eigenvalues[0] - 0.7).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 0.3).abs() < 1e-15);
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_closed_form_matches_solver() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(0.6, 0.0), C64::new(0.1, -0.2), C64::new(0.1, 0.2), C64::new(0.4, 0.0)],
        )
        .unwrap();
        let fast = hermitian_eigenvalues(&m);
        let full = hermitian_eig(&m).unwrap().eigenvalues;
        for (a, b) in fast.iter().zip(&full) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn exp_i_hermitian_is_unitary() {
        let params: Vec<f64> = (0..9).map(|k| 0.3 * k as f64 - 1.1).collect();
        let h = hermitian_from_params(3, &params).unwrap();
        let u = exp_i_hermitian(&h).unwrap();
        assert!(u.isometry_error() < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_columns() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0, 2.0]]).unwrap();
        assert!(orthonormalize_columns(&m).is_err());
    }
}
