//! Seeded random operators, states, measurements and stochastic matrices.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::coarse::StochasticMatrix;
use crate::error::{Error, Result};
use crate::qm::matrix::{self, hermitize, orthonormalize, spectral_map, ComplexMatrix, ComplexVector};
use crate::qm::{validate_measurement, DensityMatrix, GeneralizedMeasurement, HermitianOperator, Subspace};

const MAX_ATTEMPTS: usize = 16;

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian `(x + i y) / sqrt 2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    ComplexVector::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Columns of a random unitary, from Gram-Schmidt on Gaussian vectors.
pub fn random_orthonormal_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<ComplexVector> {
    loop {
        let vs: Vec<ComplexVector> = (0..dim).map(|_| gaussian_vector(rng, dim)).collect();
        let basis = orthonormalize(&vs, 1e-8);
        if basis.len() == dim {
            return basis;
        }
    }
}

/// `rho = B B^dag / Tr[B B^dag]` with `B` a `dim x rank` Gaussian matrix.
pub fn density_matrix_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let b = gaussian_matrix(rng, dim, rank);
    let a = &b * b.adjoint();
    let tr = matrix::trace(&a).re;
    DensityMatrix::new(hermitize(&(a / Complex64::new(tr, 0.0))))
}

pub fn random_density_matrix(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    density_matrix_with(&mut ChaCha8Rng::seed_from_u64(seed), dim, rank)
}

/// Random state whose support lies inside `g`.
pub fn density_matrix_in<R: Rng + ?Sized>(rng: &mut R, g: &Subspace) -> Result<DensityMatrix> {
    let k = g.rank();
    let rank = rng.random_range(1..=k);
    let local = density_matrix_with(rng, k, rank)?;
    DensityMatrix::new(hermitize(&g.embed(local.matrix())))
}

/// `Pi_i = S^{-1/2} A_i S^{-1/2}` with `A_i = B_i B_i^dag` and `S = sum A_i`,
/// carrying the square-root Kraus operators.
pub fn povm_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_outcomes: usize) -> Result<GeneralizedMeasurement> {
    if n_outcomes == 0 {
        return Err(Error::EmptyMeasurement);
    }
    if n_outcomes == 1 {
        return Ok(GeneralizedMeasurement::from_matrices(vec![matrix::identity(dim)])?.with_sqrt_kraus());
    }
    for _ in 0..MAX_ATTEMPTS {
        let parts: Vec<ComplexMatrix> = (0..n_outcomes)
            .map(|_| {
                let b = gaussian_matrix(rng, dim, dim);
                &b * b.adjoint()
            })
            .collect();
        let mut s = matrix::zeros(dim);
        for a in &parts {
            s += a;
        }
        if matrix::min_eigenvalue(&s) < 1e-8 {
            continue;
        }
        let s_inv_half = spectral_map(&s, |x| 1.0 / x.sqrt());
        let elements = parts
            .iter()
            .map(|a| HermitianOperator::new(hermitize(&(&s_inv_half * a * &s_inv_half))))
            .collect::<Result<Vec<_>>>()?;
        if let Ok(m) = validate_measurement(elements, None) {
            return Ok(m.with_sqrt_kraus());
        }
    }
    Err(Error::SingularSum { attempts: MAX_ATTEMPTS })
}

pub fn random_povm(dim: usize, n_outcomes: usize, seed: u64) -> Result<GeneralizedMeasurement> {
    povm_with(&mut ChaCha8Rng::seed_from_u64(seed), dim, n_outcomes)
}

/// How the columns of a random stochastic matrix are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochasticMode {
    /// Uniform on the simplex (normalized exponentials).
    Dense,
    /// Columns are basis vectors; every row is hit when `n >= m`.
    Deterministic,
}

pub fn left_stochastic_with<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, mode: StochasticMode) -> StochasticMatrix {
    match mode {
        StochasticMode::Dense => {
            let mut rows = vec![vec![0.0; n]; m];
            for i in 0..n {
                let col: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
                let s: f64 = col.iter().sum();
                for (j, row) in rows.iter_mut().enumerate() {
                    row[i] = col[j] / s;
                }
            }
            StochasticMatrix::new(rows).expect("normalized columns")
        }
        StochasticMode::Deterministic => {
            let mut targets: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
            if n >= m {
                let mut cols: Vec<usize> = (0..n).collect();
                cols.shuffle(rng);
                for (j, &i) in cols.iter().take(m).enumerate() {
                    targets[i] = j;
                }
            }
            StochasticMatrix::from_assignment(m, &targets).expect("targets in range")
        }
    }
}

pub fn random_left_stochastic(m: usize, n: usize, seed: u64, mode: StochasticMode) -> StochasticMatrix {
    left_stochastic_with(&mut ChaCha8Rng::seed_from_u64(seed), m, n, mode)
}

/// Probability vector uniform on the simplex.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
    let s: f64 = x.iter().sum();
    x.into_iter().map(|v| v / s).collect()
}

/// Random split of `0..n` into `m` non-empty blocks (`1 <= m <= n`).
pub fn random_blocks<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<usize>> {
    let p = left_stochastic_with(rng, m, n, StochasticMode::Deterministic);
    (0..m).map(|j| (0..n).filter(|&i| p.get(j, i) == 1.0).collect()).collect()
}

/// Projective measurement onto `m` blocks of a random orthonormal basis.
pub fn projective_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, m: usize) -> Result<(GeneralizedMeasurement, Vec<Vec<ComplexVector>>)> {
    let basis = random_orthonormal_basis(rng, dim);
    let blocks = random_blocks(rng, dim, m);
    let vectors: Vec<Vec<ComplexVector>> =
        blocks.iter().map(|b| b.iter().map(|&k| basis[k].clone()).collect()).collect();
    let projectors = vectors
        .iter()
        .map(|vs| {
            let mut p = matrix::zeros(dim);
            for v in vs {
                p += matrix::ketbra(v);
            }
            p
        })
        .collect();
    Ok((GeneralizedMeasurement::projective(projectors)?, vectors))
}

/// Random subspace of the given rank together with an orthonormal basis of
/// its complement.
pub fn subspace_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<(Subspace, Vec<ComplexVector>)> {
    if rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let basis = random_orthonormal_basis(rng, dim);
    let g = Subspace::new(dim, basis[..rank].to_vec())?;
    Ok((g, basis[rank..].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::von_neumann_entropy;

    #[test]
    fn density_matrices() {
        let full = random_density_matrix(3, 3, 1).unwrap();
        assert!(von_neumann_entropy(&full) > 0.0);
        let pure = random_density_matrix(3, 1, 1).unwrap();
        assert!(von_neumann_entropy(&pure) <= 1e-9);
        assert_eq!(random_density_matrix(2, 2, 42).unwrap(), random_density_matrix(2, 2, 42).unwrap());
        assert!(matches!(random_density_matrix(2, 3, 0), Err(Error::InvalidRank { .. })));
        assert!(matches!(random_density_matrix(2, 0, 0), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn povms() {
        let one = random_povm(3, 1, 5).unwrap();
        assert_eq!(one.element(0), &matrix::identity(3));
        let m = random_povm(4, 5, 9).unwrap();
        let mut s = matrix::zeros(4);
        for e in m.elements() {
            s += e.matrix();
        }
        assert!(matrix::frobenius(&(s - matrix::identity(4))) < 1e-10);
        assert_eq!(m, random_povm(4, 5, 9).unwrap());
        assert!(m.kraus().is_some());
    }

    #[test]
    fn stochastic_matrices() {
        let p = random_left_stochastic(3, 4, 2, StochasticMode::Dense);
        assert!(p.max_column_defect() < 1e-12);
        assert_eq!(p, random_left_stochastic(3, 4, 2, StochasticMode::Dense));
        let d = random_left_stochastic(3, 3, 2, StochasticMode::Deterministic);
        assert!(d.is_deterministic(0.0));
        for j in 0..3 {
            assert_eq!(d.row(j).iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn streams_differ_per_trial() {
        let a: u64 = trial_rng(7, 0).random();
        let b: u64 = trial_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(7, 0).random::<u64>());
    }
}
