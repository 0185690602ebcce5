//! Validated operator types: Hermitian operators, density matrices,
//! projectors and subspaces.

use serde::{Deserialize, Serialize};

use super::matrix::{
    self, c, check_finite, check_square, frobenius, hermitian_deviation, hermitian_eigenvalues,
    hermitize, ComplexMatrix, ComplexVector,
};
use crate::error::{Error, Result};

/// Numerical thresholds used when validating operators and measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub psd: f64,
    pub proj: f64,
    pub complete: f64,
    pub trace: f64,
    /// Frobenius norm at or below which a POVM element counts as zero.
    pub zero: f64,
    pub orth: f64,
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            proj: 1e-10,
            complete: 1e-10,
            trace: 1e-10,
            zero: 1e-10,
            orth: 1e-10,
            degeneracy: 1e-8,
        }
    }
}

impl Tolerances {
    /// Same thresholds with every entry replaced by `tol` except the
    /// degeneracy grouping.
    pub fn uniform(tol: f64) -> Self {
        Self {
            herm: tol,
            psd: tol,
            proj: tol,
            complete: tol,
            trace: tol,
            zero: tol,
            orth: tol,
            degeneracy: Self::default().degeneracy,
        }
    }
}

/// A square matrix equal to its adjoint within `tol_herm`. The stored matrix
/// is the exact Hermitian part of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::default().herm)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol_herm: f64) -> Result<Self> {
        check_square(&matrix)?;
        check_finite(&matrix)?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > tol_herm {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { matrix: hermitize(&matrix) })
    }

    /// Wraps a matrix that is Hermitian by construction, symmetrizing away
    /// round-off.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix: hermitize(&matrix) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        matrix::trace(&self.matrix).re
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Re Tr[self * other]
    pub fn trace_with(&self, other: &ComplexMatrix) -> f64 {
        matrix::trace_product_re(&self.matrix, other)
    }
}

/// A positive semidefinite operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    operator: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let operator = HermitianOperator::with_tolerance(matrix, tol.herm)?;
        let min_eigenvalue = operator.min_eigenvalue();
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd { index: 0, min_eigenvalue });
        }
        let trace = operator.trace();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::InvalidTrace { trace, expected: 1.0 });
        }
        Ok(Self { operator })
    }

    /// The maximally mixed state `1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = matrix::identity(dim) * c(1.0 / dim as f64, 0.0);
        Self { operator: HermitianOperator::from_hermitian_unchecked(m) }
    }

    /// `|psi><psi| / <psi|psi>`
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n2 = psi.norm_squared();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::InvalidTrace { trace: n2, expected: 1.0 });
        }
        Self::new(matrix::ketbra(psi) * c(1.0 / n2, 0.0))
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(matrix::diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.operator.eigenvalues()
    }
}

/// An orthogonal projector with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    operator: HermitianOperator,
    rank: usize,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let operator = HermitianOperator::with_tolerance(matrix, tol.herm)?;
        let m = operator.matrix();
        let deviation = frobenius(&(m * m - m));
        if deviation > tol.proj {
            return Err(Error::NotProjector { deviation });
        }
        let trace = operator.trace();
        let rank = trace.round().max(0.0) as usize;
        if (trace - rank as f64).abs() > tol.trace.max(tol.proj) {
            return Err(Error::InvalidTrace { trace, expected: rank as f64 });
        }
        Ok(Self { operator, rank })
    }

    /// Projector onto the span of an orthonormal family.
    pub(crate) fn from_orthonormal(dim: usize, basis: &[ComplexVector]) -> Self {
        let mut m = matrix::zeros(dim);
        for v in basis {
            m += matrix::ketbra(v);
        }
        Self { operator: HermitianOperator::from_hermitian_unchecked(m), rank: basis.len() }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operator: HermitianOperator::from_hermitian_unchecked(matrix::identity(dim)),
            rank: dim,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.operator
    }
}

/// A subspace given by an orthonormal basis of ambient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    dim: usize,
    basis: Vec<ComplexVector>,
    projector: Projector,
}

impl Subspace {
    /// Validates that `basis` is orthonormal in a `dim`-dimensional space.
    pub fn new(dim: usize, basis: Vec<ComplexVector>) -> Result<Self> {
        Self::with_tolerance(dim, basis, Tolerances::default().orth)
    }

    pub fn with_tolerance(dim: usize, basis: Vec<ComplexVector>, tol_orth: f64) -> Result<Self> {
        for v in &basis {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let k = basis.len();
        let mut deviation = 0.0;
        for a in 0..k {
            for b in 0..k {
                let g = basis[a].dotc(&basis[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                deviation += (g - c(target, 0.0)).norm_sqr();
            }
        }
        let deviation = deviation.sqrt();
        if deviation > tol_orth {
            return Err(Error::NotOrthonormal { deviation });
        }
        let projector = Projector::from_orthonormal(dim, &basis);
        Ok(Self { dim, basis, projector })
    }

    /// Span of arbitrary vectors; orthonormalized with Gram-Schmidt.
    pub fn span(dim: usize, vectors: &[ComplexVector]) -> Result<Self> {
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let basis = matrix::orthonormalize(vectors, 1e-12);
        let projector = Projector::from_orthonormal(dim, &basis);
        Ok(Self { dim, basis, projector })
    }

    pub fn full(dim: usize) -> Self {
        let basis = (0..dim).map(|k| matrix::ket(dim, k)).collect();
        Self { dim, basis, projector: Projector::identity(dim) }
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace itself.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Embeds a `rank x rank` matrix written in this subspace's basis into
    /// the ambient space: `B M B^dagger`.
    pub fn embed(&self, local: &ComplexMatrix) -> ComplexMatrix {
        let b = self.basis_matrix();
        &b * local * b.adjoint()
    }

    /// Columns are the basis vectors.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros(self.dim, self.rank());
        for (k, v) in self.basis.iter().enumerate() {
            b.set_column(k, v);
        }
        b
    }

    /// True when every basis vector of `self` lies in `other`.
    pub fn is_contained_in(&self, other: &Subspace, tol: f64) -> bool {
        let p = other.projector.matrix();
        self.basis.iter().all(|v| (p * v - v).norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::matrix::{ket, ketbra, real_vector};

    #[test]
    fn rejects_non_hermitian() {
        let mut m = matrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn density_checks_trace_and_positivity() {
        assert!(DensityMatrix::from_diagonal(&[0.75, 0.25]).is_ok());
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.5, 0.25]),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.5, -0.5]),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn maximally_mixed_has_unit_trace() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!((rho.operator().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_rank_and_idempotency() {
        let p = Projector::new(ketbra(&ket(3, 0)) + ketbra(&ket(3, 2))).unwrap();
        assert_eq!(p.rank(), 2);
        let half = matrix::identity(2) * c(0.5, 0.0);
        assert!(matches!(Projector::new(half), Err(Error::NotProjector { .. })));
    }

    #[test]
    fn subspace_validation() {
        let s = 0.5f64.sqrt();
        let plus = real_vector(&[s, s]);
        let g = Subspace::new(2, vec![plus.clone()]).unwrap();
        assert_eq!(g.rank(), 1);
        assert!(matrix::max_abs_diff(g.projector().matrix(), &ketbra(&plus)) < 1e-15);
        let bad = Subspace::new(2, vec![real_vector(&[1.0, 1.0])]);
        assert!(matches!(bad, Err(Error::NotOrthonormal { .. })));
        let spanned = Subspace::span(2, &[real_vector(&[1.0, 1.0])]).unwrap();
        assert!(spanned.is_contained_in(&g, 1e-12) && g.is_contained_in(&spanned, 1e-12));
    }
}
