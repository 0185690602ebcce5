//! Instances with a known answer: coarser pairs built by construction,
//! equality cases of the monotonicity results and their perturbations.

use rand::seq::SliceRandom;
use rand::Rng;

use super::random::{
    density_matrix_with, left_stochastic_with, povm_with, simplex_point, subspace_with, StochasticMode,
};
use crate::coarse::StochasticMatrix;
use crate::error::Result;
use crate::info::WeightedDistribution;
use crate::qm::matrix::{self, c, hermitize, ComplexMatrix, ComplexVector};
use crate::qm::{DensityMatrix, GeneralizedMeasurement, Subspace};

fn basis_matrix(vs: &[ComplexVector]) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(vs[0].len(), vs.len());
    for (k, v) in vs.iter().enumerate() {
        b.set_column(k, v);
    }
    b
}

/// Measurement whose elements each sit inside one block of `blocks`
/// (orthonormal vectors per block), one or two elements per block, shuffled.
pub fn refinement<R: Rng + ?Sized>(rng: &mut R, blocks: &[Vec<ComplexVector>]) -> Result<GeneralizedMeasurement> {
    let mut elements = Vec::new();
    for vs in blocks {
        let b = basis_matrix(vs);
        let n = rng.random_range(1..=2);
        let local = povm_with(rng, vs.len(), n)?;
        for e in local.elements() {
            elements.push(hermitize(&(&b * e.matrix() * b.adjoint())));
        }
    }
    elements.shuffle(rng);
    GeneralizedMeasurement::from_matrices(elements)
}

/// A fine measurement, a transition matrix and the measurement it produces.
#[derive(Debug, Clone)]
pub struct ProcessedPair {
    pub fine: GeneralizedMeasurement,
    pub p: StochasticMatrix,
    pub coarse: GeneralizedMeasurement,
    /// Rows of `p` kept in `coarse`.
    pub kept_rows: Vec<usize>,
}

pub fn processed_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ProcessedPair> {
    let n1 = rng.random_range(2..=4);
    let n2 = rng.random_range(1..=3);
    let fine = povm_with(rng, dim, n1)?;
    let mode = if rng.random_bool(0.5) { StochasticMode::Dense } else { StochasticMode::Deterministic };
    let p = left_stochastic_with(rng, n2, n1, mode);
    let out = crate::coarse::coarsen(&fine, &p)?;
    Ok(ProcessedPair { fine, p, coarse: out.measurement, kept_rows: out.kept_rows })
}

/// A measurement each of whose elements is a non-negative combination of the
/// other's: a permutation, or one element split into two halves.
pub fn mutually_coarse<R: Rng + ?Sized>(rng: &mut R, c1: &GeneralizedMeasurement) -> Result<GeneralizedMeasurement> {
    let mut elements: Vec<ComplexMatrix> = c1.elements().iter().map(|e| e.matrix().clone()).collect();
    if rng.random_bool(0.5) {
        let k = rng.random_range(0..elements.len());
        let half = elements[k].clone() * c(0.5, 0.0);
        elements[k] = half.clone();
        elements.push(half);
    }
    elements.shuffle(rng);
    GeneralizedMeasurement::from_matrices(elements)
}

/// Measurements `coarse` and `fine` with `coarse` coarser than `fine` in `g`
/// but in general not in the whole space.
///
/// With `Q` the projector onto the complement of `g` and `E` a random POVM,
/// the fine elements are `W E_i W` (`W = P_G + sqrt(t) Q`) plus `(1 - t) F_l`
/// for a POVM `F` on the complement. The coarse elements are
/// `W' (sum_i P_ji E_i) W'` with `W' = P_G + sqrt(s) Q`, `s >= t`, plus
/// `(1 - s) F'_l`.
#[derive(Debug, Clone)]
pub struct SubspacePair {
    pub g: Subspace,
    pub fine: GeneralizedMeasurement,
    pub coarse: GeneralizedMeasurement,
    /// Fine outcomes `0..visible_fine` are the ones possible in `g`.
    pub visible_fine: usize,
    pub visible_coarse: usize,
    /// `visible_coarse x visible_fine` transition matrix used to build the pair.
    pub p: StochasticMatrix,
}

pub fn subspace_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<SubspacePair> {
    let k = rng.random_range(1..dim);
    let (g, complement) = subspace_with(rng, dim, k)?;
    let q_basis = basis_matrix(&complement);
    let q = &q_basis * q_basis.adjoint();
    let pg = g.projector().matrix().clone();

    let n1 = rng.random_range(2..=3);
    let n2 = rng.random_range(1..=3);
    let e = povm_with(rng, dim, n1)?;
    let p = left_stochastic_with(rng, n2, n1, StochasticMode::Dense);
    let t: f64 = rng.random_range(0.1..0.9);
    let s: f64 = t + (1.0 - t) * rng.random_range(0.0..0.9);

    let null = |rng: &mut R, weight: f64| -> Result<Vec<ComplexMatrix>> {
        let n = rng.random_range(1..=2);
        let f = povm_with(rng, dim - k, n)?;
        Ok(f.elements()
            .iter()
            .map(|x| hermitize(&(&q_basis * x.matrix() * q_basis.adjoint() * c(weight, 0.0))))
            .collect())
    };

    let w = &pg + &q * c(t.sqrt(), 0.0);
    let mut fine: Vec<ComplexMatrix> = e.elements().iter().map(|x| hermitize(&(&w * x.matrix() * &w))).collect();
    fine.extend(null(rng, 1.0 - t)?);

    let w2 = &pg + &q * c(s.sqrt(), 0.0);
    let mut coarse = Vec::new();
    for j in 0..n2 {
        let mut x = matrix::zeros(dim);
        for i in 0..n1 {
            x += e.element(i) * c(p.get(j, i), 0.0);
        }
        coarse.push(hermitize(&(&w2 * x * &w2)));
    }
    coarse.extend(null(rng, 1.0 - s)?);

    Ok(SubspacePair {
        g,
        fine: GeneralizedMeasurement::from_matrices(fine)?.with_sqrt_kraus(),
        coarse: GeneralizedMeasurement::from_matrices(coarse)?,
        visible_fine: n1,
        visible_coarse: n2,
        p,
    })
}

/// Random subspace of `g` of rank between one and `rank(g)`.
pub fn random_subsubspace<R: Rng + ?Sized>(rng: &mut R, g: &Subspace) -> Result<Subspace> {
    let r = rng.random_range(1..=g.rank());
    let b = g.basis_matrix();
    let vs: Vec<ComplexVector> = (0..r)
        .map(|_| &b * super::random::gaussian_vector(rng, g.rank()))
        .collect();
    Subspace::span(g.ambient_dim(), &vs)
}

/// State with the projectors of a projective measurement as eigenprojectors
/// and eigenvalues proportional to `1, 1/2, 1/4, ...`.
pub fn state_with_eigenprojectors(c: &GeneralizedMeasurement) -> Result<DensityMatrix> {
    let mut rho = matrix::zeros(c.dim());
    let mut z = 0.0;
    for (j, e) in c.elements().iter().enumerate() {
        let lambda = 0.5f64.powi(j as i32);
        rho += e.matrix() * matrix::c(lambda, 0.0);
        z += lambda * e.trace();
    }
    DensityMatrix::new(hermitize(&(rho * matrix::c(1.0 / z, 0.0))))
}

/// Weighted distribution and deterministic merge with `p_i / V_i` constant
/// on every merged block: the equality case of entropy monotonicity.
#[derive(Debug, Clone)]
pub struct EqualityInstance {
    pub w: WeightedDistribution,
    pub p: StochasticMatrix,
    pub blocks: Vec<Vec<usize>>,
}

pub fn equality_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<EqualityInstance> {
    let m = if n > 1 { rng.random_range(1..n) } else { 1 };
    let blocks = super::random::random_blocks(rng, n, m);
    let volumes: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
    let weights: Vec<f64> = simplex_point(rng, m).into_iter().map(|x| (x + 0.1) / (1.0 + 0.1 * m as f64)).collect();
    let mut probs = vec![0.0; n];
    let mut targets = vec![0; n];
    for (b, block) in blocks.iter().enumerate() {
        let vb: f64 = block.iter().map(|&i| volumes[i]).sum();
        for &i in block {
            probs[i] = weights[b] * volumes[i] / vb;
            targets[i] = b;
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|x| *x /= total);
    Ok(EqualityInstance {
        w: WeightedDistribution::new(probs, volumes)?,
        p: StochasticMatrix::from_assignment(m, &targets)?,
        blocks,
    })
}

/// Moves half the probability of one outcome of a merged block onto
/// another, so the ratios `p_i / V_i` in that block differ by at least 2.
pub fn break_equality(inst: &EqualityInstance) -> Result<WeightedDistribution> {
    let block = inst.blocks.iter().find(|b| b.len() >= 2).expect("some block merges two outcomes");
    let (a, b) = (block[0], block[1]);
    let mut probs = inst.w.probs().to_vec();
    let delta = probs[b] / 2.0;
    probs[a] += delta;
    probs[b] -= delta;
    WeightedDistribution::new(probs, inst.w.volumes().to_vec())
}

/// Random state of random rank.
pub fn any_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=dim);
    density_matrix_with(rng, dim, rank)
}
