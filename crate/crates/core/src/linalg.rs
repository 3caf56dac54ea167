//! Dense complex matrices, Hermitian eigendecomposition by cyclic Jacobi
//! rotations, and the evolution unitary `exp(-i H t)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance used when a Hamiltonian is expected to be Hermitian.
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-12;

/// Maximum number of full Jacobi sweeps before giving up.
pub const JACOBI_SWEEP_CAP: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix must have positive dimension")]
    EmptyMatrix,
    #[error("expected {expected} entries for a square matrix, got {actual}")]
    NotSquare { expected: usize, actual: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: ||M - M^H||_F = {defect:e} exceeds {limit:e}")]
    NotHermitian { defect: f64, limit: f64 },
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("non-finite evolution time {0}")]
    BadDuration(f64),
}

pub type LinalgResult<T> = Result<T, LinalgError>;

/// Square dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major entry vector. Entries must be finite.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> LinalgResult<Self> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::NotSquare {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> LinalgResult<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::NotSquare {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(dim, data)
    }

    /// Real-valued matrix from rows of `f64`.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> LinalgResult<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, v) in values.iter().enumerate() {
            m[(k, k)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn multiply(&self, other: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix {
            dim: self.dim,
            data,
        })
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the most significant block.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = ComplexMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> LinalgResult<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `||M - M^H||_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.frobenius_norm().max(1.0)
    }

    fn check_same_dim(&self, other: &ComplexMatrix) -> LinalgResult<()> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim)
}

pub fn multiply(a: &ComplexMatrix, b: &ComplexMatrix) -> LinalgResult<ComplexMatrix> {
    a.multiply(b)
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.frobenius_norm()
}

/// `||U^H U - I||_F`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..n {
                dot += u.data[k * n + i].conj() * u.data[k * n + j];
            }
            if i == j {
                dot -= 1.0;
            }
            acc += dot.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `||M V - V Λ||_F`.
    pub fn residual(&self, m: &ComplexMatrix) -> LinalgResult<f64> {
        let mv = m.multiply(&self.eigenvectors)?;
        let n = m.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = mv[(i, j)] - self.eigenvectors[(i, j)] * self.eigenvalues[j];
                acc += d.norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// `||V^H V - I||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        unitarity_defect(&self.eigenvectors)
    }

    /// `V f(Λ) V^H` for a scalar function applied to the eigenvalues.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        let mut weighted = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for (w, (x, f)) in weighted.iter_mut().zip(v.row(i).iter().zip(&weights)) {
                *w = x * f;
            }
            for j in 0..n {
                out.data[i * n + j] = weighted
                    .iter()
                    .zip(v.row(j))
                    .map(|(w, y)| w * y.conj())
                    .sum();
            }
        }
        out
    }
}

/// Diagonalize a Hermitian matrix with cyclic two-sided complex Jacobi rotations.
///
/// `tol` is the relative Hermiticity tolerance checked before iterating:
/// `||M - M^H||_F <= tol * max(1, ||M||_F)`. Only the upper triangle drives the
/// rotations; the lower triangle is mirrored from it.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> LinalgResult<EigenDecomposition> {
    let n = m.dim();
    let scale = m.frobenius_norm();
    let defect = m.hermiticity_defect();
    let limit = tol * scale.max(1.0);
    if defect.is_nan() || defect > limit {
        return Err(LinalgError::NotHermitian { defect, limit });
    }

    // Work on an exactly Hermitian copy with a real diagonal.
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let upper = a[(i, j)];
            a[(j, i)] = upper.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let target = f64::EPSILON * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_SWEEP_CAP {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps Jacobi order for equal eigenvalues.
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            acc += a[(i, j)].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`. `A <- G^H A G`, `V <- V G` with
/// `G = diag(1, e^{-iφ}) · R(θ)` on the (p, q) plane, where `a[p][q] = |a| e^{iφ}`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let e = phase.conj();
    let g_qp = -e * s;
    let g_qq = e * c;

    let n = a.dim;
    let data = &mut a.data;
    // A <- A G (columns p, q)
    for k in 0..n {
        let (kp, kq) = (k * n + p, k * n + q);
        let (akp, akq) = (data[kp], data[kq]);
        data[kp] = akp * c + akq * g_qp;
        data[kq] = akp * s + akq * g_qq;
    }
    // A <- G^H A (rows p, q)
    let (hp, hq) = (g_qp.conj(), g_qq.conj());
    for k in 0..n {
        let (pk, qk) = (p * n + k, q * n + k);
        let (apk, aqk) = (data[pk], data[qk]);
        data[pk] = apk * c + hp * aqk;
        data[qk] = apk * s + hq * aqk;
    }
    let zero = Complex64::new(0.0, 0.0);
    data[p * n + q] = zero;
    data[q * n + p] = zero;
    data[p * n + p] = Complex64::new(app - t * mag, 0.0);
    data[q * n + q] = Complex64::new(aqq + t * mag, 0.0);

    let vd = &mut v.data;
    for k in 0..n {
        let (kp, kq) = (k * n + p, k * n + q);
        let (vkp, vkq) = (vd[kp], vd[kq]);
        vd[kp] = vkp * c + vkq * g_qp;
        vd[kq] = vkp * s + vkq * g_qq;
    }
}

/// `U = exp(-i H t)` assembled as `V diag(exp(-i λ_k t)) V^H`.
pub fn unitary_exponential(h: &ComplexMatrix, duration: f64) -> LinalgResult<ComplexMatrix> {
    if !duration.is_finite() {
        return Err(LinalgError::BadDuration(duration));
    }
    let eig = hermitian_eigen(h, DEFAULT_HERMITICITY_TOL)?;
    Ok(eig.reconstruct_with(|lambda| Complex64::from_polar(1.0, -lambda * duration)))
}
