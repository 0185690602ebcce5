//! Dense complex matrix helpers shared by every operator type.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(dim, dim)
}

/// Computational basis vector `|index>`.
pub fn ket(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = ONE;
    v
}

/// Builds a vector from real amplitudes.
pub fn real_vector(amplitudes: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| c(a, 0.0)))
}

/// `|u><v|`
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// `|v><v|` for a (not necessarily normalized) vector.
pub fn ketbra(v: &ComplexVector) -> ComplexMatrix {
    outer(v, v)
}

pub fn diagonal(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    let mut m = zeros(d);
    for (k, &x) in values.iter().enumerate() {
        m[(k, k)] = c(x, 0.0);
    }
    m
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Re Tr[A B] without forming the product.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: r, col });
            }
        }
    }
    Ok(())
}

/// Makes the first component with modulus above `1e-12` real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let norm = v.norm();
    let threshold = 1e-12 * norm.max(1.0);
    if let Some(z) = v.iter().copied().find(|z| z.norm() > threshold) {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Eigenpairs of a Hermitian matrix: eigenvalues descending, eigenvectors
/// phase-fixed. The input is symmetrized before diagonalization.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, Vec<ComplexVector>) {
    let h = hermitize(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: ComplexVector = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            v
        })
        .collect();
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn spectral_map(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let d = m.nrows();
    let mut out = zeros(d);
    for (lambda, v) in values.into_iter().zip(vectors.iter()) {
        out += ketbra(v) * c(f(lambda), 0.0);
    }
    out
}

/// Square root of a PSD matrix; slightly negative eigenvalues are clipped.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |x| x.max(0.0).sqrt())
}

/// Orthonormalizes `vectors` with modified Gram-Schmidt, discarding vectors
/// whose residual norm falls below `tol`.
pub fn orthonormalize(vectors: &[ComplexVector], tol: f64) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let n = w.norm();
        if n > tol {
            basis.push(w / c(n, 0.0));
        }
    }
    basis
}

/// Largest entrywise absolute difference.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
