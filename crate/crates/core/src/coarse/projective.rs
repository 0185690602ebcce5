//! Coarseness against a projective measurement.
//!
//! When the coarse measurement is projective, any post-processing witness can
//! be taken deterministic: each fine element sits inside exactly one coarse
//! projector, so `C2 ↪ C1` reduces to a partition of the fine outcomes.

use serde::{Deserialize, Serialize};

use super::StochasticMatrix;
use crate::error::{Error, Result};
use crate::qm::matrix::{self, frobenius, trace_product_re};
use crate::qm::GeneralizedMeasurement;

/// `blocks[j]` lists the fine outcomes merged into coarse outcome `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Coarse outcome receiving each fine outcome.
    pub fn assignment(&self, n_fine: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_fine];
        for (j, block) in self.blocks.iter().enumerate() {
            for &i in block {
                if i < n_fine {
                    out[i] = Some(j);
                }
            }
        }
        out
    }

    /// The 0/1 transition matrix of the partition.
    pub fn to_stochastic(&self, n_fine: usize) -> Result<StochasticMatrix> {
        let targets = self
            .assignment(n_fine)
            .into_iter()
            .enumerate()
            .map(|(i, j)| j.ok_or_else(|| Error::IndexError(format!("fine outcome {i} unassigned"))))
            .collect::<Result<Vec<_>>>()?;
        StochasticMatrix::from_assignment(self.blocks.len(), &targets)
    }
}

/// Looks for a partition with `P2_j = sum_{i in I_j} Pi1_i`. Returns
/// `Ok(None)` when none exists and [`Error::NotProjective`] when `coarse` is
/// not projective.
pub fn check_coarser_projective(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    tol: f64,
) -> Result<Option<Partition>> {
    if coarse.dim() != fine.dim() {
        return Err(Error::DimensionMismatch { expected: fine.dim(), found: coarse.dim() });
    }
    for (index, deviation) in coarse.projector_deviation().into_iter().enumerate() {
        if deviation > 1e-8 {
            return Err(Error::NotProjective { index, deviation });
        }
    }
    let mut blocks = vec![Vec::new(); coarse.len()];
    for i in 0..fine.len() {
        let mut hits = (0..coarse.len()).filter(|&j| trace_product_re(fine.element(i), coarse.element(j)) > tol);
        let (Some(j), None) = (hits.next(), hits.next()) else {
            return Ok(None);
        };
        blocks[j].push(i);
    }
    for (j, block) in blocks.iter().enumerate() {
        let mut acc = matrix::zeros(fine.dim());
        for &i in block {
            acc += fine.element(i);
        }
        if frobenius(&(acc - coarse.element(j))) > tol.max(1e-9) {
            return Ok(None);
        }
    }
    Ok(Some(Partition { blocks }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{check_coarser, TOL_FEAS};
    use crate::qm::matrix::{c, ket, ketbra, real_vector};

    #[test]
    fn refinement_is_found() {
        let d = 3;
        let coarse = GeneralizedMeasurement::projective(vec![
            ketbra(&ket(d, 0)) + ketbra(&ket(d, 1)),
            ketbra(&ket(d, 2)),
        ])
        .unwrap();
        let half = c(0.5, 0.0);
        let fine = GeneralizedMeasurement::from_matrices(vec![
            ketbra(&ket(d, 2)),
            ketbra(&ket(d, 0)) * half,
            ketbra(&ket(d, 0)) * half + ketbra(&ket(d, 1)),
        ])
        .unwrap();
        let part = check_coarser_projective(&coarse, &fine, TOL_FEAS).unwrap().unwrap();
        assert_eq!(part.blocks, vec![vec![1, 2], vec![0]]);
        let p = part.to_stochastic(3).unwrap();
        assert!(crate::coarse::witness_residual(&coarse, &fine, &p).unwrap() < 1e-14);
        assert!(check_coarser(&coarse, &fine, TOL_FEAS).unwrap().feasible);
    }

    #[test]
    fn overlapping_element_has_no_partition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let coarse = GeneralizedMeasurement::projective(vec![ketbra(&ket(2, 0)), ketbra(&ket(2, 1))]).unwrap();
        let fine = GeneralizedMeasurement::projective(vec![
            ketbra(&real_vector(&[s, s])),
            ketbra(&real_vector(&[s, -s])),
        ])
        .unwrap();
        assert_eq!(check_coarser_projective(&coarse, &fine, TOL_FEAS).unwrap(), None);
    }

    #[test]
    fn rejects_non_projective_coarse() {
        let half = c(0.5, 0.0);
        let coarse = GeneralizedMeasurement::from_matrices(vec![matrix::identity(2) * half, matrix::identity(2) * half])
            .unwrap();
        let fine = GeneralizedMeasurement::from_matrices(vec![matrix::identity(2)]).unwrap();
        let err = check_coarser_projective(&coarse, &fine, TOL_FEAS).unwrap_err();
        assert!(matches!(err, Error::NotProjective { index: 0, .. }));
    }
}
