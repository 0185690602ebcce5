//! The four golden counterexamples, with exact inputs and expected verdicts.

use serde_json::{json, Value};

use crate::coarse::{
    check_coarser, check_coarser_classical, check_coarser_in_subspace, extend_witness, verify_subspace_witness,
    witness_residual, OutcomeSet, StochasticMatrix, Verdict, TOL_FEAS,
};
use crate::error::Result;
use crate::info::{observational_entropy, s_obs_classical, von_neumann_entropy, WeightedDistribution};
use crate::qm::matrix::{self, c, ket, ketbra, real_vector};
use crate::qm::{outcome_probabilities, DensityMatrix, GeneralizedMeasurement, Subspace};

#[derive(Debug, Clone, Copy)]
pub struct GoldenInstance {
    pub name: &'static str,
    pub summary: &'static str,
    pub run: fn() -> Result<GoldenOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenOutcome {
    pub passed: bool,
    /// Every computed quantity behind the verdict.
    pub values: Value,
}

pub fn counterexample_registry() -> Vec<GoldenInstance> {
    vec![
        GoldenInstance {
            name: "vn_relation_failure",
            summary: "entropy of the state reassembled from p_i Pi_i / V_i differs from S_C",
            run: vn_relation_failure,
        },
        GoldenInstance {
            name: "converse_monotonicity",
            summary: "larger observational entropy without a coarse-graining",
            run: converse_monotonicity,
        },
        GoldenInstance {
            name: "sum_of_subspaces",
            summary: "coarser in span|0> and span|1> but not in their sum",
            run: sum_of_subspaces,
        },
        GoldenInstance {
            name: "non_extendable_witness",
            summary: "a witness valid in span|+> that no full-space witness extends",
            run: non_extendable_witness,
        },
    ]
}

/// `Pi = {|0><0|/2, |0><0|/2 + |1><1|}`, `rho = |0><0|`.
pub fn vn_instance() -> (GeneralizedMeasurement, DensityMatrix) {
    let p0 = ketbra(&ket(2, 0));
    let p1 = ketbra(&ket(2, 1));
    let m = GeneralizedMeasurement::from_matrices(vec![&p0 * c(0.5, 0.0), &p0 * c(0.5, 0.0) + p1])
        .expect("valid POVM");
    (m, DensityMatrix::from_diagonal(&[1.0, 0.0]).expect("valid state"))
}

/// `sum_i p_i Pi_i / V_i`
pub fn reassembled_state(c_meas: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let w = outcome_probabilities(c_meas, rho)?;
    let mut sigma = matrix::zeros(c_meas.dim());
    for i in 0..c_meas.len() {
        sigma += c_meas.element(i) * c(w.probs()[i] / w.volumes()[i], 0.0);
    }
    DensityMatrix::new(sigma)
}

fn vn_relation_failure() -> Result<GoldenOutcome> {
    let (m, rho) = vn_instance();
    let report = observational_entropy(&m, &rho)?;
    let sigma = reassembled_state(&m, &rho)?;
    let s_sigma = von_neumann_entropy(&sigma);
    let gap = (report.s_obs - s_sigma).abs();
    let expected = 0.5 * 3f64.ln();
    Ok(GoldenOutcome {
        passed: (report.s_obs - expected).abs() <= 1e-12 && gap > 1e-6,
        values: json!({"s_obs": report.s_obs, "s_vn_reassembled": s_sigma, "gap": gap}),
    })
}

/// `psi = (sqrt3/2)|0> + (1/2)|1>` and its orthogonal partner.
pub fn converse_psi() -> (matrix::ComplexVector, matrix::ComplexVector) {
    let a = 3f64.sqrt() / 2.0;
    (real_vector(&[a, 0.5]), real_vector(&[0.5, -a]))
}

/// Computational basis measurement, the coarse candidate
/// `{|psi><psi| + 4/5 |psi_perp><psi_perp|, 1/5 |psi_perp><psi_perp|}` and `|psi><psi|`.
pub fn converse_quantum() -> (GeneralizedMeasurement, GeneralizedMeasurement, DensityMatrix) {
    let (psi, perp) = converse_psi();
    let c1 = GeneralizedMeasurement::projective(vec![ketbra(&ket(2, 0)), ketbra(&ket(2, 1))]).expect("valid");
    let c2 = GeneralizedMeasurement::from_matrices(vec![
        ketbra(&psi) + ketbra(&perp) * c(0.8, 0.0),
        ketbra(&perp) * c(0.2, 0.0),
    ])
    .expect("valid");
    (c1, c2, DensityMatrix::pure(&psi).expect("normalized"))
}

fn converse_monotonicity() -> Result<GoldenOutcome> {
    let w1 = WeightedDistribution::new(vec![0.75, 0.25], vec![1.0, 1.0])?;
    let w2 = WeightedDistribution::new(vec![1.0, 0.0], vec![1.8, 0.2])?;
    let cert = check_coarser_classical(&w1, &w2, TOL_FEAS)?;
    let s1 = s_obs_classical(&w1);
    let s2 = s_obs_classical(&w2);

    let (c1, c2, rho) = converse_quantum();
    let q1 = outcome_probabilities(&c1, &rho)?;
    let q2 = outcome_probabilities(&c2, &rho)?;
    let dev = |a: &WeightedDistribution, b: &WeightedDistribution| {
        a.probs()
            .iter()
            .zip(b.probs())
            .chain(a.volumes().iter().zip(b.volumes()))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let realization = dev(&q1, &w1).max(dev(&q2, &w2));
    let quantum = check_coarser(&c2, &c1, TOL_FEAS)?;
    Ok(GoldenOutcome {
        passed: cert.verdict == Verdict::Infeasible
            && s2 > s1 + 1e-9
            && realization <= 1e-12
            && quantum.verdict == Verdict::Infeasible,
        values: json!({
            "classical_verdict": cert.verdict,
            "phase1_optimum": cert.phase1_optimum,
            "s_fine": s1,
            "s_coarse": s2,
            "realization_deviation": realization,
            "quantum_verdict": quantum.verdict,
        }),
    })
}

pub fn plus_minus_pair() -> (GeneralizedMeasurement, GeneralizedMeasurement) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pm = GeneralizedMeasurement::projective(vec![
        ketbra(&real_vector(&[s, s])),
        ketbra(&real_vector(&[s, -s])),
    ])
    .expect("valid");
    let z = GeneralizedMeasurement::projective(vec![ketbra(&ket(2, 0)), ketbra(&ket(2, 1))]).expect("valid");
    (pm, z)
}

fn sum_of_subspaces() -> Result<GoldenOutcome> {
    let (pm, z) = plus_minus_pair();
    let g0 = Subspace::new(2, vec![ket(2, 0)])?;
    let g1 = Subspace::new(2, vec![ket(2, 1)])?;
    let v0 = check_coarser_in_subspace(&pm, &z, &g0, TOL_FEAS)?.verdict;
    let v1 = check_coarser_in_subspace(&pm, &z, &g1, TOL_FEAS)?.verdict;
    let vsum = check_coarser_in_subspace(&pm, &z, &Subspace::full(2), TOL_FEAS)?.verdict;
    let vglobal = check_coarser(&pm, &z, TOL_FEAS)?.verdict;
    Ok(GoldenOutcome {
        passed: v0 == Verdict::Feasible
            && v1 == Verdict::Feasible
            && vsum == Verdict::Infeasible
            && vglobal == Verdict::Infeasible,
        values: json!({"span0": v0, "span1": v1, "sum": vsum, "global": vglobal}),
    })
}

fn non_extendable_witness() -> Result<GoldenOutcome> {
    let (_, z) = plus_minus_pair();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let f = Subspace::new(2, vec![real_vector(&[s, s])])?;
    let all = OutcomeSet::all(2);
    let swap = StochasticMatrix::from_assignment(2, &[1, 0])?;
    let in_f = verify_subspace_witness(&z, &z, &f, &all, &all, &swap)?;
    let swap_ok_in_f = in_f.residual <= 1e-12 && in_f.max_volume_violation() <= 1e-12;
    let lp_f = check_coarser_in_subspace(&z, &z, &f, TOL_FEAS)?;

    let full = check_coarser(&z, &z, TOL_FEAS)?;
    let identity_distance = full
        .witness
        .as_ref()
        .map(|p| (0..2).flat_map(|j| (0..2).map(move |i| (j, i))).map(|(j, i)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (p.get(j, i) - target).abs()
        }).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    let extended = extend_witness(&z, &z, &all, &all, &swap)?;
    let swap_full_residual = witness_residual(&z, &z, &extended)?;
    // Any full-space witness P has P_00 Pi_0 + P_01 Pi_1 = Pi_0, forcing P = 1.
    Ok(GoldenOutcome {
        passed: swap_ok_in_f
            && lp_f.feasible
            && full.feasible
            && identity_distance <= 1e-9
            && swap_full_residual > 0.5,
        values: json!({
            "swap_residual_in_f": in_f.residual,
            "f_verdict": lp_f.verdict,
            "full_verdict": full.verdict,
            "full_witness_distance_to_identity": identity_distance,
            "swap_residual_full_space": swap_full_residual,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_golden_instances_pass() {
        for g in counterexample_registry() {
            let out = (g.run)().unwrap();
            assert!(out.passed, "{}: {}", g.name, out.values);
        }
    }

    #[test]
    fn reassembled_state_is_diag_two_thirds() {
        let (m, rho) = vn_instance();
        let sigma = reassembled_state(&m, &rho).unwrap();
        let expected = matrix::diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        assert!(matrix::max_abs_diff(sigma.matrix(), &expected) < 1e-15);
    }
}
