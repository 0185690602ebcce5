//! Coarseness restricted to states supported on a subspace `G`.
//!
//! Only the outcomes that can occur for some state in `G` take part, the
//! defining equalities are imposed on the compressions `B^dag Pi B` (with `B`
//! an orthonormal basis of `G`), and volumes only need to dominate.

use serde::{Deserialize, Serialize};

use super::{
    hermitian_equations, lp_feasible, push_column_sums, witness_from_lp, CoarsenessCertificate,
    Constraints, StochasticMatrix, Verdict,
};
use crate::error::{Error, Result};
use crate::qm::matrix::{self, frobenius, ComplexMatrix};
use crate::qm::{GeneralizedMeasurement, Subspace};

/// Sorted set of outcome indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct OutcomeSet(Vec<usize>);

impl OutcomeSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Position of outcome `i` within the set.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.binary_search(&i).ok()
    }

    pub fn is_subset(&self, other: &OutcomeSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl From<Vec<usize>> for OutcomeSet {
    fn from(v: Vec<usize>) -> Self {
        Self::new(v)
    }
}

impl From<OutcomeSet> for Vec<usize> {
    fn from(s: OutcomeSet) -> Self {
        s.0
    }
}

/// Outcomes `i` with `||Pi_i P_G||_F > tol`.
pub fn possible_outcomes(c: &GeneralizedMeasurement, g: &Subspace, tol: f64) -> Result<OutcomeSet> {
    if g.ambient_dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: g.ambient_dim() });
    }
    let b = g.basis_matrix();
    let out = (0..c.len()).filter(|&i| frobenius(&(c.element(i) * &b)) > tol).collect();
    Ok(OutcomeSet(out))
}

fn compress(b: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    b.adjoint() * m * b
}

/// Decides whether `coarse` is coarser than `fine` in the subspace `g`.
///
/// The witness is `|O2| x |O1|`, indexed by the possible outcomes. When
/// feasible, `extension` holds a full transition matrix built from it.
pub fn check_coarser_in_subspace(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    g: &Subspace,
    tol: f64,
) -> Result<CoarsenessCertificate> {
    if coarse.dim() != fine.dim() {
        return Err(Error::DimensionMismatch { expected: fine.dim(), found: coarse.dim() });
    }
    let o1 = possible_outcomes(fine, g, tol)?;
    let o2 = possible_outcomes(coarse, g, tol)?;
    if o1.is_empty() {
        return Err(Error::EmptyOutcomeSet { which: "fine" });
    }
    if o2.is_empty() {
        return Err(Error::EmptyOutcomeSet { which: "coarse" });
    }
    let n1 = o1.len();
    let n2 = o2.len();
    let n_vars = n1 * n2;
    let b = g.basis_matrix();
    let fine_local: Vec<ComplexMatrix> = o1.iter().map(|i| compress(&b, fine.element(i))).collect();
    let fine_refs: Vec<&ComplexMatrix> = fine_local.iter().collect();
    let v1 = fine.volumes();
    let v2 = coarse.volumes();

    let mut eq = Constraints::new();
    let mut ineq = Constraints::new();
    for (jj, j) in o2.iter().enumerate() {
        let target = compress(&b, coarse.element(j));
        for (coeffs, rhs) in hermitian_equations(&fine_refs, &target) {
            let mut row = vec![0.0; n_vars];
            row[jj * n1..(jj + 1) * n1].copy_from_slice(&coeffs);
            eq.push(row, rhs);
        }
        let mut row = vec![0.0; n_vars];
        for (ii, i) in o1.iter().enumerate() {
            row[jj * n1 + ii] = v1[i];
        }
        ineq.push(row, v2[j]);
    }
    push_column_sums(&mut eq, n2, n1);
    let lp = lp_feasible(&eq, Some(&ineq), n_vars, tol)?;

    let raw = witness_from_lp(&lp.x, n2, n1);
    let (residual, volume_slack) = match &raw {
        Some(p) => {
            let check = verify_subspace_witness(coarse, fine, g, &o2, &o1, p)?;
            (check.residual.max(check.max_volume_violation()), Some(check.volume_slack))
        }
        None => (lp.residual, None),
    };
    let mut verdict = match lp.verdict {
        Verdict::Feasible if raw.is_none() => Verdict::Ambiguous,
        v => v,
    };
    let extension = match (&raw, verdict) {
        (Some(p), Verdict::Feasible) => match extend_witness(coarse, fine, &o2, &o1, p) {
            Ok(e) => Some(e),
            Err(_) => {
                verdict = Verdict::Ambiguous;
                None
            }
        },
        _ => None,
    };
    let feasible = verdict.is_feasible();
    Ok(CoarsenessCertificate {
        verdict,
        feasible,
        witness: if feasible { raw } else { None },
        residual,
        phase1_optimum: lp.phase1_optimum,
        volume_slack: if feasible { volume_slack } else { None },
        outcomes_coarse: Some(o2),
        outcomes_fine: Some(o1),
        extension,
    })
}

/// Independent evaluation of a subspace witness.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceWitnessCheck {
    /// `max_j || B^dag (sum_i P_ji Pi1_i - Pi2_j) B ||_F`
    pub residual: f64,
    /// `V2_j - sum_i P_ji V1_i` per coarse outcome in `o2`.
    pub volume_slack: Vec<f64>,
}

impl SubspaceWitnessCheck {
    pub fn max_volume_violation(&self) -> f64 {
        self.volume_slack.iter().fold(0.0, |m, &s| m.max(-s))
    }
}

pub fn verify_subspace_witness(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    g: &Subspace,
    o2: &OutcomeSet,
    o1: &OutcomeSet,
    p: &StochasticMatrix,
) -> Result<SubspaceWitnessCheck> {
    if p.rows() != o2.len() || p.cols() != o1.len() {
        return Err(Error::ShapeMismatch(format!(
            "witness is {}x{}, outcome sets have sizes {} and {}",
            p.rows(),
            p.cols(),
            o2.len(),
            o1.len()
        )));
    }
    if o2.iter().any(|j| j >= coarse.len()) || o1.iter().any(|i| i >= fine.len()) {
        return Err(Error::IndexError("outcome set exceeds measurement size".into()));
    }
    let pg = g.projector().matrix();
    let v1 = fine.volumes();
    let v2 = coarse.volumes();
    let mut residual: f64 = 0.0;
    let mut volume_slack = Vec::with_capacity(o2.len());
    for (jj, j) in o2.iter().enumerate() {
        let mut acc = matrix::zeros(fine.dim());
        let mut vol = 0.0;
        for (ii, i) in o1.iter().enumerate() {
            let w = p.get(jj, ii);
            acc += fine.element(i) * matrix::c(w, 0.0);
            vol += w * v1[i];
        }
        let diff = acc - coarse.element(j);
        residual = residual.max(frobenius(&(pg * diff * pg)));
        volume_slack.push(v2[j] - vol);
    }
    Ok(SubspaceWitnessCheck { residual, volume_slack })
}

/// Extends a subspace witness to a full left stochastic matrix on all
/// outcomes: `P_ji` on `O2 x O1`, zero on the rest of the `O1` columns, and
/// `C_j` on every column outside `O1`, where
/// `C_j = (V2_j - sum_{i in O1} P_ji V1_i) / sum_{i not in O1} V1_i`
/// (the sum over `O1` is empty for `j` outside `O2`).
pub fn extend_witness(
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
    o2: &OutcomeSet,
    o1: &OutcomeSet,
    p: &StochasticMatrix,
) -> Result<StochasticMatrix> {
    let n1 = fine.len();
    let n2 = coarse.len();
    let v1 = fine.volumes();
    let v2 = coarse.volumes();
    let rest: f64 = (0..n1).filter(|&i| !o1.contains(i)).map(|i| v1[i]).sum();
    let mut rows = vec![vec![0.0; n1]; n2];
    for (j, row) in rows.iter_mut().enumerate() {
        let mut used = 0.0;
        if let Some(jj) = o2.position(j) {
            for (ii, i) in o1.iter().enumerate() {
                row[i] = p.get(jj, ii);
                used += p.get(jj, ii) * v1[i];
            }
        }
        if rest > 0.0 {
            let cj = ((v2[j] - used) / rest).max(0.0);
            for (i, x) in row.iter_mut().enumerate() {
                if !o1.contains(i) {
                    *x = cj;
                }
            }
        }
    }
    StochasticMatrix::with_tolerance(rows, 1e-7)
}

/// Restricts a witness for `(O2(G), O1(G))` to the outcome sets of a smaller
/// subspace `F`. Fails if the index sets are not nested or a restricted
/// column no longer sums to one.
pub fn restrict_transition_matrix(
    p: &StochasticMatrix,
    o2_g: &OutcomeSet,
    o1_g: &OutcomeSet,
    o2_f: &OutcomeSet,
    o1_f: &OutcomeSet,
    tol: f64,
) -> Result<StochasticMatrix> {
    if p.rows() != o2_g.len() || p.cols() != o1_g.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {}x{}, outcome sets have sizes {} and {}",
            p.rows(),
            p.cols(),
            o2_g.len(),
            o1_g.len()
        )));
    }
    let rows = o2_f
        .iter()
        .map(|j| o2_g.position(j).ok_or_else(|| Error::IndexError(format!("coarse outcome {j} not in outer set"))))
        .collect::<Result<Vec<_>>>()?;
    let cols = o1_f
        .iter()
        .map(|i| o1_g.position(i).ok_or_else(|| Error::IndexError(format!("fine outcome {i} not in outer set"))))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::EmptyOutcomeSet { which: if rows.is_empty() { "coarse" } else { "fine" } });
    }
    let sub = p.submatrix_raw(&rows, &cols);
    for (column, &i) in cols.iter().enumerate() {
        let sum: f64 = sub.iter().map(|r| r[column]).sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::BrokenColumnSum { column: o1_g.indices()[i], sum });
        }
    }
    StochasticMatrix::with_tolerance(sub, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{check_coarser, TOL_FEAS};
    use crate::qm::matrix::{ket, ketbra, real_vector};

    fn computational(d: usize) -> GeneralizedMeasurement {
        GeneralizedMeasurement::projective((0..d).map(|k| ketbra(&ket(d, k))).collect()).unwrap()
    }

    fn plus_minus() -> GeneralizedMeasurement {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        GeneralizedMeasurement::projective(vec![
            ketbra(&real_vector(&[s, s])),
            ketbra(&real_vector(&[s, -s])),
        ])
        .unwrap()
    }

    #[test]
    fn outcome_set_of_section_three_example() {
        let p = |ks: &[usize]| {
            let mut m = matrix::zeros(4);
            for &k in ks {
                m += ketbra(&ket(4, k));
            }
            m
        };
        let c1 = GeneralizedMeasurement::from_matrices(vec![p(&[2, 3]), p(&[0]), p(&[1])]).unwrap();
        let f = Subspace::new(4, vec![ket(4, 0), ket(4, 1)]).unwrap();
        assert_eq!(possible_outcomes(&c1, &f, TOL_FEAS).unwrap(), OutcomeSet::new(vec![1, 2]));
        assert_eq!(possible_outcomes(&c1, &Subspace::full(4), TOL_FEAS).unwrap(), OutcomeSet::all(3));
    }

    #[test]
    fn plus_minus_is_coarser_on_a_basis_ray() {
        let c2 = plus_minus();
        let c1 = computational(2);
        assert_eq!(check_coarser(&c2, &c1, TOL_FEAS).unwrap().verdict, Verdict::Infeasible);
        for k in 0..2 {
            let g = Subspace::new(2, vec![ket(2, k)]).unwrap();
            let cert = check_coarser_in_subspace(&c2, &c1, &g, TOL_FEAS).unwrap();
            assert!(cert.feasible, "ray {k}");
            assert_eq!(cert.outcomes_fine.as_ref().unwrap().indices(), &[k]);
            assert_eq!(cert.outcomes_coarse.as_ref().unwrap().indices(), &[0, 1]);
            let p = cert.witness.as_ref().unwrap();
            assert!((p.get(0, 0) - 0.5).abs() < 1e-9 && (p.get(1, 0) - 0.5).abs() < 1e-9);
            let ext = cert.extension.as_ref().unwrap();
            assert_eq!((ext.rows(), ext.cols()), (2, 2));
            let slack = cert.volume_slack.as_ref().unwrap();
            assert!(slack.iter().all(|&s| s >= -1e-9));
        }
        let full = check_coarser_in_subspace(&c2, &c1, &Subspace::full(2), TOL_FEAS).unwrap();
        assert_eq!(full.verdict, Verdict::Infeasible);
    }

    #[test]
    fn swap_valid_only_in_plus_ray() {
        let c = computational(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = Subspace::new(2, vec![real_vector(&[s, s])]).unwrap();
        let o = OutcomeSet::all(2);
        let swap = StochasticMatrix::from_assignment(2, &[1, 0]).unwrap();
        let in_f = verify_subspace_witness(&c, &c, &f, &o, &o, &swap).unwrap();
        assert!(in_f.residual < 1e-12 && in_f.max_volume_violation() < 1e-12);
        let in_full = verify_subspace_witness(&c, &c, &Subspace::full(2), &o, &o, &swap).unwrap();
        assert!(in_full.residual > 0.5);

        let id = StochasticMatrix::identity(2);
        let r = restrict_transition_matrix(&id, &o, &o, &o, &o, 1e-9).unwrap();
        assert_eq!(r, id);
    }

    #[test]
    fn restriction_errors() {
        let o = OutcomeSet::all(2);
        let p = StochasticMatrix::new(vec![vec![0.5, 1.0], vec![0.5, 0.0]]).unwrap();
        let err = restrict_transition_matrix(&p, &o, &o, &OutcomeSet::new(vec![0]), &o, 1e-9).unwrap_err();
        assert!(matches!(err, Error::BrokenColumnSum { column: 0, .. }));
        let err = restrict_transition_matrix(&p, &o, &o, &OutcomeSet::new(vec![3]), &o, 1e-9).unwrap_err();
        assert!(matches!(err, Error::IndexError(_)));
        let ok = restrict_transition_matrix(&p, &o, &o, &o, &OutcomeSet::new(vec![1]), 1e-9).unwrap();
        assert_eq!(ok.to_rows(), vec![vec![1.0], vec![0.0]]);
    }

    #[test]
    fn outcome_set_serde() {
        let s: OutcomeSet = serde_json::from_str("[2,0,2]").unwrap();
        assert_eq!(s.indices(), &[0, 2]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[0,2]");
    }
}
