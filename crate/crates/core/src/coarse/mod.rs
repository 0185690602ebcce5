//! The coarser-measurement relation and its certificates.
//!
//! `C2` is coarser than `C1` when a left stochastic `P` exists with
//! `Pi2_j = sum_i P_ji Pi1_i` for every `j`. Deciding this is a linear
//! feasibility problem in the entries of `P`, solved by [`lp::lp_feasible`].

pub mod lp;
pub mod projective;
pub mod stochastic;
pub mod subspace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{push_forward, WeightedDistribution};
use crate::qm::matrix::{self, frobenius, ComplexMatrix};
use crate::qm::{GeneralizedMeasurement, HermitianOperator};

pub use lp::{lp_feasible, Constraints, LpOutcome, Verdict, TOL_FEAS};
pub use projective::{check_coarser_projective, Partition};
pub use stochastic::StochasticMatrix;
pub use subspace::{
    check_coarser_in_subspace, extend_witness, possible_outcomes, restrict_transition_matrix,
    verify_subspace_witness, OutcomeSet, SubspaceWitnessCheck,
};

/// Outcome of a coarseness decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarsenessCertificate {
    pub verdict: Verdict,
    pub feasible: bool,
    /// Left stochastic witness, present when feasible.
    #[serde(rename = "P")]
    pub witness: Option<StochasticMatrix>,
    /// Largest Frobenius violation of the defining equalities at the witness
    /// (or at the best point found when infeasible).
    pub residual: f64,
    pub phase1_optimum: f64,
    /// `V2_j - sum_i P_ji V1_i` over the coarse outcomes possible in the subspace.
    pub volume_slack: Option<Vec<f64>>,
    /// Possible outcomes of the coarse and fine measurement (subspace checks).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcomes_coarse: Option<OutcomeSet>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcomes_fine: Option<OutcomeSet>,
    /// Full-size transition matrix extending a subspace witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extension: Option<StochasticMatrix>,
}

impl CoarsenessCertificate {
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }
}

/// Real linear equations expressing `target = sum_i x_i ops_i` for Hermitian
/// matrices: the diagonal plus real and imaginary parts of the strict upper
/// triangle. Returns one coefficient row per equation.
pub(crate) fn hermitian_equations(ops: &[&ComplexMatrix], target: &ComplexMatrix) -> Vec<(Vec<f64>, f64)> {
    let d = target.nrows();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in a..d {
            out.push((ops.iter().map(|m| m[(a, b)].re).collect(), target[(a, b)].re));
            if a != b {
                out.push((ops.iter().map(|m| m[(a, b)].im).collect(), target[(a, b)].im));
            }
        }
    }
    out
}

/// Builds the stochastic matrix from the LP point with columns renormalized.
pub(crate) fn witness_from_lp(x: &[f64], rows: usize, cols: usize) -> Option<StochasticMatrix> {
    let mut m = vec![vec![0.0; cols]; rows];
    for i in 0..cols {
        let s: f64 = (0..rows).map(|j| x[j * cols + i]).sum();
        if (s - 1.0).abs() > 1e-6 {
            return None;
        }
        for (j, row) in m.iter_mut().enumerate() {
            row[i] = x[j * cols + i] / s;
        }
    }
    StochasticMatrix::new(m).ok()
}

/// `max_j || sum_i P_ji fine_i - coarse_j ||_F`
pub fn witness_residual(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    p: &StochasticMatrix,
) -> Result<f64> {
    if p.rows() != coarse.len() || p.cols() != fine.len() {
        return Err(Error::ShapeMismatch(format!(
            "witness is {}x{}, measurements have {} and {} outcomes",
            p.rows(),
            p.cols(),
            coarse.len(),
            fine.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for j in 0..coarse.len() {
        let mut acc = matrix::zeros(fine.dim());
        for i in 0..fine.len() {
            let w = p.get(j, i);
            if w != 0.0 {
                acc += fine.element(i) * matrix::c(w, 0.0);
            }
        }
        worst = worst.max(frobenius(&(acc - coarse.element(j))));
    }
    Ok(worst)
}

/// Decides `coarse ↪ fine` by linear feasibility over left stochastic `P`.
pub fn check_coarser(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    tol: f64,
) -> Result<CoarsenessCertificate> {
    if coarse.dim() != fine.dim() {
        return Err(Error::DimensionMismatch { expected: fine.dim(), found: coarse.dim() });
    }
    let n1 = fine.len();
    let n2 = coarse.len();
    let n_vars = n1 * n2;
    let fine_ops: Vec<&ComplexMatrix> = (0..n1).map(|i| fine.element(i)).collect();
    let mut eq = Constraints::new();
    for j in 0..n2 {
        for (coeffs, rhs) in hermitian_equations(&fine_ops, coarse.element(j)) {
            let mut row = vec![0.0; n_vars];
            row[j * n1..(j + 1) * n1].copy_from_slice(&coeffs);
            eq.push(row, rhs);
        }
    }
    push_column_sums(&mut eq, n2, n1);
    let lp = lp_feasible(&eq, None, n_vars, tol)?;
    finish_certificate(lp, n2, n1, |p| witness_residual(coarse, fine, p))
}

pub(crate) fn push_column_sums(eq: &mut Constraints, rows: usize, cols: usize) {
    for i in 0..cols {
        let mut row = vec![0.0; rows * cols];
        for j in 0..rows {
            row[j * cols + i] = 1.0;
        }
        eq.push(row, 1.0);
    }
}

fn finish_certificate(
    lp: LpOutcome,
    rows: usize,
    cols: usize,
    residual_of: impl Fn(&StochasticMatrix) -> Result<f64>,
) -> Result<CoarsenessCertificate> {
    let raw = witness_from_lp(&lp.x, rows, cols);
    let residual = match &raw {
        Some(p) => residual_of(p)?,
        None => lp.residual,
    };
    let verdict = match lp.verdict {
        Verdict::Feasible if raw.is_none() => Verdict::Ambiguous,
        v => v,
    };
    let feasible = verdict.is_feasible();
    Ok(CoarsenessCertificate {
        verdict,
        feasible,
        witness: if feasible { raw } else { None },
        residual,
        phase1_optimum: lp.phase1_optimum,
        volume_slack: None,
        outcomes_coarse: None,
        outcomes_fine: None,
        extension: None,
    })
}

/// Decides whether `w2 = P w1` (probabilities and volumes) for some left
/// stochastic `P`.
pub fn check_coarser_classical(
    w1: &WeightedDistribution,
    w2: &WeightedDistribution,
    tol: f64,
) -> Result<CoarsenessCertificate> {
    let n1 = w1.len();
    let n2 = w2.len();
    let n_vars = n1 * n2;
    let mut eq = Constraints::new();
    for j in 0..n2 {
        for (src, dst) in [(w1.probs(), w2.probs()), (w1.volumes(), w2.volumes())] {
            let mut row = vec![0.0; n_vars];
            row[j * n1..(j + 1) * n1].copy_from_slice(src);
            eq.push(row, dst[j]);
        }
    }
    push_column_sums(&mut eq, n2, n1);
    let lp = lp_feasible(&eq, None, n_vars, tol)?;
    finish_certificate(lp, n2, n1, |p| {
        let pushed = push_forward(p, w1)?;
        let dp = pushed.probs().iter().zip(w2.probs()).map(|(a, b)| (a - b).abs());
        let dv = pushed.volumes().iter().zip(w2.volumes()).map(|(a, b)| (a - b).abs());
        Ok(dp.chain(dv).fold(0.0, f64::max))
    })
}

/// A measurement obtained by post-processing, with bookkeeping of rows of
/// `P` that were dropped because they produced zero elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Coarsening {
    pub measurement: GeneralizedMeasurement,
    /// Row of `P` behind each output element.
    pub kept_rows: Vec<usize>,
    pub dropped_rows: Vec<usize>,
}

/// Elements at or below this norm are dropped by [`coarsen`].
pub const ZERO_ELEMENT_TOL: f64 = 1e-10;

/// `Pi2_j = sum_i P_ji Pi1_i`
pub fn coarsen(fine: &GeneralizedMeasurement, p: &StochasticMatrix) -> Result<Coarsening> {
    if p.cols() != fine.len() {
        return Err(Error::ShapeMismatch(format!(
            "transition matrix has {} columns, measurement has {} outcomes",
            p.cols(),
            fine.len()
        )));
    }
    let mut elements = Vec::new();
    let mut kept_rows = Vec::new();
    let mut dropped_rows = Vec::new();
    for j in 0..p.rows() {
        let mut acc = matrix::zeros(fine.dim());
        for i in 0..fine.len() {
            let w = p.get(j, i);
            if w != 0.0 {
                acc += fine.element(i) * matrix::c(w, 0.0);
            }
        }
        if frobenius(&acc) <= ZERO_ELEMENT_TOL {
            dropped_rows.push(j);
            continue;
        }
        elements.push(HermitianOperator::new(acc)?);
        kept_rows.push(j);
    }
    let measurement = crate::qm::validate_measurement(elements, None)?;
    Ok(Coarsening { measurement, kept_rows, dropped_rows })
}

/// Whether `P_ji p_i V_j = P_ji V_i p_j` for all `i, j`, where `(p_j, V_j)`
/// is the push-forward of `w`: the equality case of entropy monotonicity.
pub fn thm2_equality_condition(p: &StochasticMatrix, w: &WeightedDistribution, tol: f64) -> Result<bool> {
    let pushed = push_forward(p, w)?;
    for j in 0..p.rows() {
        for i in 0..p.cols() {
            let pji = p.get(j, i);
            let lhs = pji * w.probs()[i] * pushed.volumes()[j];
            let rhs = pji * w.volumes()[i] * pushed.probs()[j];
            if (lhs - rhs).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
