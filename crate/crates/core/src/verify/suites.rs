use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::constructions::{
    any_state, break_equality, equality_instance, mutually_coarse, processed_pair, random_subsubspace, refinement,
    state_with_eigenprojectors, subspace_pair,
};
use super::random::{
    density_matrix_in, left_stochastic_with, povm_with, projective_with, simplex_point, subspace_with,
    StochasticMode,
};
use super::{EQUALITY_TOL, INEQUALITY_TOL, WITNESS_TOL};
use crate::coarse::{
    check_coarser, check_coarser_in_subspace, check_coarser_projective, possible_outcomes,
    restrict_transition_matrix, thm2_equality_condition, verify_subspace_witness, witness_residual,
    CoarsenessCertificate, StochasticMatrix, Verdict, TOL_FEAS,
};
use crate::error::Result;
use crate::info::{
    kl_divergence, measurement_state_joint, mutual_information, observational_entropy, push_forward,
    push_forward_probs, s_obs, s_obs_classical, von_neumann_entropy, JointDistribution, WeightedDistribution,
};
use crate::io::{MeasurementFile, StateFile, SubspaceFile};
use crate::qm::matrix::{self, frobenius};
use crate::qm::{
    compose_measurements, measurement_from_state, outcome_probabilities, post_measurement_state, DensityMatrix,
    GeneralizedMeasurement, Subspace,
};

/// Bookkeeping for one trial.
pub(super) struct Trial {
    pub index: usize,
    pub failures: Vec<super::Failure>,
    pub certificates: usize,
    pub max_witness_residual: f64,
}

impl Trial {
    pub fn new(index: usize) -> Self {
        Self { index, failures: Vec::new(), certificates: 0, max_witness_residual: 0.0 }
    }

    pub fn fail(&mut self, check: &str, values: Value, inputs: Value) {
        self.failures.push(super::Failure { trial: self.index, check: check.to_string(), values, inputs });
    }

    fn require(&mut self, ok: bool, check: &str, values: impl FnOnce() -> Value, inputs: impl FnOnce() -> Value) {
        if !ok {
            self.fail(check, values(), inputs());
        }
    }

    /// Records an independently recomputed residual of a feasible certificate.
    fn witness(&mut self, residual: f64, inputs: impl FnOnce() -> Value) {
        self.certificates += 1;
        self.max_witness_residual = self.max_witness_residual.max(residual);
        self.require(residual <= WITNESS_TOL, "witness residual <= 1e-7", || json!({ "residual": residual }), inputs);
    }
}

type SuiteFn = fn(&mut Trial, &mut ChaCha8Rng, usize) -> Result<()>;

pub(super) fn lookup(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "dpi_kl" => dpi_kl,
        "obs_monotone" => obs_monotone,
        "dpi_mi" => dpi_mi,
        "projective_equiv" => projective_equiv,
        "lemma_processing" => lemma_processing,
        "coarser_entropy" => coarser_entropy,
        "coarser_mi" => coarser_mi,
        "subspace_processing" => subspace_processing,
        "subspace_entropy" => subspace_entropy,
        "subspace_mi" => subspace_mi,
        "restriction" => restriction,
        "bounds" => bounds,
        "composition" => composition,
        _ => return None,
    })
}

fn mjson(c: &GeneralizedMeasurement) -> Value {
    serde_json::to_value(MeasurementFile::from_measurement(c)).unwrap_or(Value::Null)
}

fn sjson(rho: &DensityMatrix) -> Value {
    serde_json::to_value(StateFile::from_state(rho)).unwrap_or(Value::Null)
}

fn gjson(g: &Subspace) -> Value {
    serde_json::to_value(SubspaceFile::from_subspace(g)).unwrap_or(Value::Null)
}

fn pjson(p: &StochasticMatrix) -> Value {
    json!(p.to_rows())
}

fn wjson(w: &WeightedDistribution) -> Value {
    serde_json::to_value(w).unwrap_or(Value::Null)
}

fn random_mode<R: Rng>(rng: &mut R) -> StochasticMode {
    if rng.random_bool(0.5) {
        StochasticMode::Dense
    } else {
        StochasticMode::Deterministic
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Probability vector with a few entries zeroed out.
fn sparse_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p = simplex_point(rng, n);
    if rng.random_bool(0.3) {
        let keep = rng.random_range(0..n);
        for (i, x) in p.iter_mut().enumerate() {
            if i != keep && rng.random_bool(0.4) {
                *x = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
    }
    p
}

fn random_weighted<R: Rng>(rng: &mut R, n: usize) -> Result<WeightedDistribution> {
    let probs = sparse_simplex(rng, n);
    let volumes = (0..n).map(|_| 0.05 + rng.random::<f64>() * 2.0).collect();
    WeightedDistribution::new(probs, volumes)
}

fn dpi_kl(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let n = dim;
    let m = rng.random_range(1..=n + 1);
    let p = sparse_simplex(rng, n);
    let q = if rng.random_bool(0.2) { sparse_simplex(rng, n) } else { simplex_point(rng, n) };
    let mode = random_mode(rng);
    let chan = left_stochastic_with(rng, m, n, mode);
    let before = kl_divergence(&p, &q)?;
    let after = kl_divergence(&push_forward_probs(&chan, &p)?, &push_forward_probs(&chan, &q)?)?;
    t.require(
        after <= before + INEQUALITY_TOL,
        "D(Pp||Pq) <= D(p||q)",
        || json!({"before": before, "after": after}),
        || json!({"p": p, "q": q, "P": pjson(&chan)}),
    );
    Ok(())
}

fn obs_monotone(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let n = dim;
    let w = random_weighted(rng, n)?;
    let mode = random_mode(rng);
    let m = match mode {
        StochasticMode::Dense => rng.random_range(1..=n + 1),
        StochasticMode::Deterministic => rng.random_range(1..=n),
    };
    let chan = left_stochastic_with(rng, m, n, mode);
    let pushed = push_forward(&chan, &w)?;
    let (s1, s2) = (s_obs_classical(&w), s_obs_classical(&pushed));
    t.require(
        s2 >= s1 - INEQUALITY_TOL,
        "S(Pw) >= S(w)",
        || json!({"s_before": s1, "s_after": s2}),
        || json!({"w": wjson(&w), "P": pjson(&chan)}),
    );
    let cond = thm2_equality_condition(&chan, &w, 1e-10)?;
    let equal = (s2 - s1).abs() <= EQUALITY_TOL;
    t.require(
        cond == equal,
        "equality condition <=> equal entropies (random instance)",
        || json!({"condition": cond, "gap": s2 - s1}),
        || json!({"w": wjson(&w), "P": pjson(&chan)}),
    );

    let inst = equality_instance(rng, n)?;
    let pushed = push_forward(&inst.p, &inst.w)?;
    let gap = s_obs_classical(&pushed) - s_obs_classical(&inst.w);
    let cond = thm2_equality_condition(&inst.p, &inst.w, 1e-10)?;
    t.require(
        cond && gap.abs() <= EQUALITY_TOL,
        "equality instance: condition holds and entropies agree",
        || json!({"condition": cond, "gap": gap}),
        || json!({"w": wjson(&inst.w), "P": pjson(&inst.p)}),
    );
    if n >= 2 {
        let broken = break_equality(&inst)?;
        let pushed = push_forward(&inst.p, &broken)?;
        let gap = s_obs_classical(&pushed) - s_obs_classical(&broken);
        let cond = thm2_equality_condition(&inst.p, &broken, 1e-10)?;
        t.require(
            !cond && gap > EQUALITY_TOL,
            "broken instance: condition fails and entropy strictly grows",
            || json!({"condition": cond, "gap": gap}),
            || json!({"w": wjson(&broken), "P": pjson(&inst.p)}),
        );
    }
    Ok(())
}

fn dpi_mi(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let nx = dim;
    let ny = rng.random_range(1..=dim + 1);
    let flat = sparse_simplex(rng, nx * ny);
    let pxy: Vec<Vec<f64>> = flat.chunks(ny).map(|r| r.to_vec()).collect();
    let nz = rng.random_range(1..=ny + 1);
    let mode = random_mode(rng);
    let chan = left_stochastic_with(rng, nz, ny, mode);
    let pxz: Vec<Vec<f64>> = pxy.iter().map(|row| chan.apply(row)).collect::<Result<_>>()?;
    let i_xy = mutual_information(&JointDistribution::new(pxy.clone())?);
    let i_xz = mutual_information(&JointDistribution::new(pxz)?);
    t.require(
        i_xz <= i_xy + INEQUALITY_TOL,
        "I(X;Z) <= I(X;Y)",
        || json!({"i_xy": i_xy, "i_xz": i_xz}),
        || json!({"joint": pxy, "P": pjson(&chan)}),
    );
    Ok(())
}

fn record_certificate(
    t: &mut Trial,
    cert: &CoarsenessCertificate,
    coarse: &GeneralizedMeasurement,
    fine: &GeneralizedMeasurement,
) -> Result<()> {
    if let Some(p) = &cert.witness {
        let r = witness_residual(coarse, fine, p)?;
        t.witness(r, || json!({"coarse": mjson(coarse), "fine": mjson(fine), "P": pjson(p)}));
    }
    Ok(())
}

fn projective_equiv(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let m = rng.random_range(2..=dim.min(4));
    let (coarse, blocks) = projective_with(rng, dim, m)?;
    let positive = rng.random_bool(0.5);
    let fine = if positive {
        refinement(rng, &blocks)?
    } else if rng.random_bool(0.5) {
        let n = rng.random_range(2..=4);
        povm_with(rng, dim, n)?
    } else {
        let k = rng.random_range(1..=dim);
        projective_with(rng, dim, k)?.0
    };
    let fast = check_coarser_projective(&coarse, &fine, TOL_FEAS)?;
    let cert = check_coarser(&coarse, &fine, TOL_FEAS)?;
    record_certificate(t, &cert, &coarse, &fine)?;
    let inputs = || json!({"coarse": mjson(&coarse), "fine": mjson(&fine)});
    t.require(
        cert.verdict != Verdict::Ambiguous && cert.feasible == fast.is_some(),
        "LP verdict equals partition verdict",
        || json!({"lp": cert.verdict, "partition": fast}),
        inputs,
    );
    if positive {
        t.require(cert.feasible, "refinement is finer", || json!({"lp": cert.verdict}), inputs);
    }
    if let Some(part) = &fast {
        let r = witness_residual(&coarse, &fine, &part.to_stochastic(fine.len())?)?;
        t.require(r <= EQUALITY_TOL, "partition reproduces projectors", || json!({"residual": r}), inputs);
    }
    Ok(())
}

fn lemma_processing(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let pair = processed_pair(rng, dim)?;
    let cert = check_coarser(&pair.coarse, &pair.fine, TOL_FEAS)?;
    record_certificate(t, &cert, &pair.coarse, &pair.fine)?;
    let inputs = || json!({"coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine), "P": pjson(&pair.p)});
    t.require(cert.feasible, "processed measurement is coarser", || json!({"verdict": cert.verdict}), inputs);
    let Some(witness) = &cert.witness else { return Ok(()) };
    let kept: Vec<Vec<f64>> = pair.kept_rows.iter().map(|&j| pair.p.row(j).to_vec()).collect();
    for _ in 0..50 {
        let rho = any_state(rng, dim)?;
        let p1 = outcome_probabilities(&pair.fine, &rho)?;
        let p2 = outcome_probabilities(&pair.coarse, &rho)?;
        let via_witness = witness.apply(p1.probs())?;
        let via_p: Vec<f64> = kept.iter().map(|r| r.iter().zip(p1.probs()).map(|(a, b)| a * b).sum()).collect();
        let dev = max_dev(&via_witness, p2.probs()).max(max_dev(&via_p, p2.probs()));
        if dev > INEQUALITY_TOL {
            t.fail("p2 = P p1", json!({"deviation": dev}), json!({"inputs": inputs(), "rho": sjson(&rho)}));
            break;
        }
    }
    Ok(())
}

fn coarser_entropy(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let pair = processed_pair(rng, dim)?;
    let cert = check_coarser(&pair.coarse, &pair.fine, TOL_FEAS)?;
    record_certificate(t, &cert, &pair.coarse, &pair.fine)?;
    for _ in 0..5 {
        let rho = any_state(rng, dim)?;
        let (s1, s2) = (s_obs(&pair.fine, &rho)?, s_obs(&pair.coarse, &rho)?);
        t.require(
            s2 >= s1 - INEQUALITY_TOL,
            "S_C2 >= S_C1",
            || json!({"s_fine": s1, "s_coarse": s2}),
            || json!({"coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine), "rho": sjson(&rho)}),
        );
    }
    let twin = mutually_coarse(rng, &pair.fine)?;
    let rho = any_state(rng, dim)?;
    let (s1, s2) = (s_obs(&pair.fine, &rho)?, s_obs(&twin, &rho)?);
    t.require(
        (s1 - s2).abs() <= EQUALITY_TOL,
        "mutually coarse measurements have equal entropy",
        || json!({"s1": s1, "s2": s2}),
        || json!({"c1": mjson(&pair.fine), "c2": mjson(&twin), "rho": sjson(&rho)}),
    );
    Ok(())
}

fn mi(c: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<f64> {
    Ok(mutual_information(&measurement_state_joint(c, rho)?))
}

fn coarser_mi(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let pair = processed_pair(rng, dim)?;
    for _ in 0..5 {
        let rho = any_state(rng, dim)?;
        let (i1, i2) = (mi(&pair.fine, &rho)?, mi(&pair.coarse, &rho)?);
        t.require(
            i2 <= i1 + INEQUALITY_TOL,
            "I(C2) <= I(C1)",
            || json!({"i_fine": i1, "i_coarse": i2}),
            || json!({"coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine), "rho": sjson(&rho)}),
        );
    }
    let twin = mutually_coarse(rng, &pair.fine)?;
    let rho = any_state(rng, dim)?;
    let (i1, i2) = (mi(&pair.fine, &rho)?, mi(&twin, &rho)?);
    t.require(
        (i1 - i2).abs() <= EQUALITY_TOL,
        "mutually coarse measurements extract equal information",
        || json!({"i1": i1, "i2": i2}),
        || json!({"c1": mjson(&pair.fine), "c2": mjson(&twin), "rho": sjson(&rho)}),
    );
    Ok(())
}

fn subspace_processing(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let pair = subspace_pair(rng, dim)?;
    let inputs = || json!({"coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine), "subspace": gjson(&pair.g)});
    let cert = check_coarser_in_subspace(&pair.coarse, &pair.fine, &pair.g, TOL_FEAS)?;
    t.require(cert.feasible, "constructed pair is coarser in G", || json!({"verdict": cert.verdict}), inputs);
    let (Some(o2), Some(o1)) = (&cert.outcomes_coarse, &cert.outcomes_fine) else { return Ok(()) };
    t.require(
        o1.indices() == (0..pair.visible_fine).collect::<Vec<_>>().as_slice()
            && o2.indices() == (0..pair.visible_coarse).collect::<Vec<_>>().as_slice(),
        "outcome sets are the visible outcomes",
        || json!({"o1": o1, "o2": o2}),
        inputs,
    );
    let built = verify_subspace_witness(&pair.coarse, &pair.fine, &pair.g, o2, o1, &pair.p);
    if let Ok(check) = built {
        t.require(
            check.residual <= EQUALITY_TOL && check.max_volume_violation() <= INEQUALITY_TOL,
            "construction matrix is a witness",
            || json!({"residual": check.residual, "slack": check.volume_slack}),
            inputs,
        );
    }
    let (Some(w), Some(ext)) = (&cert.witness, &cert.extension) else {
        t.fail("feasible certificate carries witness and extension", json!({}), inputs());
        return Ok(());
    };
    let check = verify_subspace_witness(&pair.coarse, &pair.fine, &pair.g, o2, o1, w)?;
    t.witness(check.residual, inputs);
    t.require(
        check.max_volume_violation() <= INEQUALITY_TOL,
        "volume slack >= 0",
        || json!({"slack": check.volume_slack}),
        inputs,
    );
    let v_ext = ext.apply(&pair.fine.volumes())?;
    let dv = max_dev(&v_ext, &pair.coarse.volumes());
    t.require(dv <= EQUALITY_TOL, "extension maps volumes", || json!({"deviation": dv}), || {
        json!({"inputs": inputs(), "extension": pjson(ext)})
    });
    for _ in 0..20 {
        let rho = density_matrix_in(rng, &pair.g)?;
        let p1 = outcome_probabilities(&pair.fine, &rho)?;
        let p2 = outcome_probabilities(&pair.coarse, &rho)?;
        let dev = max_dev(&ext.apply(p1.probs())?, p2.probs());
        if dev > INEQUALITY_TOL {
            t.fail("p2 = P p1 on D(G)", json!({"deviation": dev}), json!({"inputs": inputs(), "rho": sjson(&rho)}));
            break;
        }
    }
    Ok(())
}

/// Checks `check(fine, coarse, rho)` on 50 states in `g` for a constructed
/// pair, then certificate soundness on an unconstrained random pair.
fn subspace_monotone(
    t: &mut Trial,
    rng: &mut ChaCha8Rng,
    dim: usize,
    name: &str,
    holds: fn(&GeneralizedMeasurement, &GeneralizedMeasurement, &DensityMatrix) -> Result<(bool, Value)>,
) -> Result<()> {
    let pair = subspace_pair(rng, dim)?;
    for _ in 0..50 {
        let rho = density_matrix_in(rng, &pair.g)?;
        let (ok, values) = holds(&pair.fine, &pair.coarse, &rho)?;
        if !ok {
            t.fail(
                name,
                values,
                json!({"coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine), "rho": sjson(&rho)}),
            );
            break;
        }
    }

    let rank = rng.random_range(1..dim);
    let (g, _) = subspace_with(rng, dim, rank)?;
    let n1 = rng.random_range(2..=3);
    let n2 = rng.random_range(1..=3);
    let fine = povm_with(rng, dim, n1)?;
    let coarse = povm_with(rng, dim, n2)?;
    let cert = check_coarser_in_subspace(&coarse, &fine, &g, TOL_FEAS)?;
    if let (Some(w), Some(o2), Some(o1)) = (&cert.witness, &cert.outcomes_coarse, &cert.outcomes_fine) {
        let check = verify_subspace_witness(&coarse, &fine, &g, o2, o1, w)?;
        let inputs = || json!({"coarse": mjson(&coarse), "fine": mjson(&fine), "subspace": gjson(&g)});
        t.witness(check.residual, inputs);
        for _ in 0..10 {
            let rho = density_matrix_in(rng, &g)?;
            let (ok, values) = holds(&fine, &coarse, &rho)?;
            if !ok {
                t.fail(name, values, json!({"inputs": inputs(), "rho": sjson(&rho)}));
                break;
            }
        }
    }
    Ok(())
}

fn subspace_entropy(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    subspace_monotone(t, rng, dim, "S_C2 >= S_C1 on D(G)", |fine, coarse, rho| {
        let (s1, s2) = (s_obs(fine, rho)?, s_obs(coarse, rho)?);
        Ok((s2 >= s1 - INEQUALITY_TOL, json!({"s_fine": s1, "s_coarse": s2})))
    })
}

fn subspace_mi(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    subspace_monotone(t, rng, dim, "I(C2) <= I(C1) on D(G)", |fine, coarse, rho| {
        let (i1, i2) = (mi(fine, rho)?, mi(coarse, rho)?);
        Ok((i2 <= i1 + INEQUALITY_TOL, json!({"i_fine": i1, "i_coarse": i2})))
    })
}

fn restriction(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let pair = subspace_pair(rng, dim)?;
    let f = random_subsubspace(rng, &pair.g)?;
    let inputs = || {
        json!({
            "coarse": mjson(&pair.coarse), "fine": mjson(&pair.fine),
            "g": gjson(&pair.g), "f": gjson(&f),
        })
    };
    let cert = check_coarser_in_subspace(&pair.coarse, &pair.fine, &pair.g, TOL_FEAS)?;
    let (Some(w), Some(o2g), Some(o1g)) = (&cert.witness, &cert.outcomes_coarse, &cert.outcomes_fine) else {
        t.fail("constructed pair is coarser in G", json!({"verdict": cert.verdict}), inputs());
        return Ok(());
    };
    let o2f = possible_outcomes(&pair.coarse, &f, TOL_FEAS)?;
    let o1f = possible_outcomes(&pair.fine, &f, TOL_FEAS)?;
    t.require(
        o2f.is_subset(o2g) && o1f.is_subset(o1g),
        "O(F) within O(G)",
        || json!({"o2f": o2f, "o1f": o1f, "o2g": o2g, "o1g": o1g}),
        inputs,
    );
    match restrict_transition_matrix(w, o2g, o1g, &o2f, &o1f, 1e-7) {
        Ok(pf) => {
            let check = verify_subspace_witness(&pair.coarse, &pair.fine, &f, &o2f, &o1f, &pf)?;
            t.witness(check.residual, inputs);
            t.require(
                check.max_volume_violation() <= INEQUALITY_TOL,
                "restricted witness keeps volume slack",
                || json!({"slack": check.volume_slack}),
                inputs,
            );
        }
        Err(e) => t.fail("restriction keeps column sums", json!({"error": e.to_string()}), inputs()),
    }
    let cert_f = check_coarser_in_subspace(&pair.coarse, &pair.fine, &f, TOL_FEAS)?;
    t.require(cert_f.feasible, "coarser in F", || json!({"verdict": cert_f.verdict}), inputs);
    for _ in 0..10 {
        let rho = density_matrix_in(rng, &f)?;
        let (s1, s2) = (s_obs(&pair.fine, &rho)?, s_obs(&pair.coarse, &rho)?);
        if s2 < s1 - INEQUALITY_TOL {
            t.fail("S_C2 >= S_C1 on D(F)", json!({"s_fine": s1, "s_coarse": s2}), json!({"inputs": inputs(), "rho": sjson(&rho)}));
            break;
        }
    }
    Ok(())
}

fn bounds(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let n = rng.random_range(1..=dim + 2);
    let c = povm_with(rng, dim, n)?;
    let rho = any_state(rng, dim)?;
    let report = observational_entropy(&c, &rho)?;
    let ln_d = (dim as f64).ln();
    let inputs = || json!({"measurement": mjson(&c), "rho": sjson(&rho)});
    t.require(
        report.s_vn - INEQUALITY_TOL <= report.s_obs && report.s_obs <= ln_d + INEQUALITY_TOL,
        "S_vN <= S_C <= ln d",
        || json!({"s_vn": report.s_vn, "s_obs": report.s_obs, "ln_d": ln_d}),
        inputs,
    );
    t.require(
        report.identity_gap() <= INEQUALITY_TOL,
        "S_C = ln V - D(p || V/V_tot)",
        || json!({"gap": report.identity_gap()}),
        inputs,
    );

    let own = measurement_from_state(&rho)?;
    let s_own = s_obs(&own, &rho)?;
    t.require(
        (s_own - report.s_vn).abs() <= INEQUALITY_TOL,
        "S_{C_rho}(rho) = S_vN(rho)",
        || json!({"s_obs": s_own, "s_vn": report.s_vn}),
        inputs,
    );
    let mixed = DensityMatrix::maximally_mixed(dim);
    let s_mixed = s_obs(&c, &mixed)?;
    t.require(
        (s_mixed - ln_d).abs() <= INEQUALITY_TOL,
        "S_C(1/d) = ln d",
        || json!({"s_obs": s_mixed, "ln_d": ln_d}),
        inputs,
    );

    let m = rng.random_range(2..=dim.min(4));
    let (c2, blocks) = projective_with(rng, dim, m)?;
    let c1 = if rng.random_bool(0.5) {
        refinement(rng, &blocks)?
    } else {
        let n1 = rng.random_range(2..=4);
        povm_with(rng, dim, n1)?
    };
    let rho2 = state_with_eigenprojectors(&c2)?;
    let predicate = (von_neumann_entropy(&rho2) - s_obs(&c1, &rho2)?).abs() <= EQUALITY_TOL;
    let cert = check_coarser(&c2, &c1, TOL_FEAS)?;
    record_certificate(t, &cert, &c2, &c1)?;
    t.require(
        cert.verdict != Verdict::Ambiguous && cert.feasible == predicate,
        "C2 coarser than C1 <=> S_C1(rho2) = S_vN(rho2)",
        || json!({"lp": cert.verdict, "entropy_predicate": predicate}),
        || json!({"coarse": mjson(&c2), "fine": mjson(&c1), "rho": sjson(&rho2)}),
    );
    Ok(())
}

fn composition(t: &mut Trial, rng: &mut ChaCha8Rng, dim: usize) -> Result<()> {
    let first = if rng.random_bool(0.3) {
        let k = rng.random_range(2..=dim);
        projective_with(rng, dim, k)?.0
    } else {
        let n = rng.random_range(2..=3);
        povm_with(rng, dim, n)?
    };
    let n2 = rng.random_range(2..=3);
    let second = povm_with(rng, dim, n2)?;
    let comp = compose_measurements(&first, &second)?;
    let inputs = || json!({"first": mjson(&first), "second": mjson(&second)});

    let mut marginal_dev: f64 = 0.0;
    for i in 0..first.len() {
        let mut acc = matrix::zeros(dim);
        for (k, &(a, _)) in comp.labels.iter().enumerate() {
            if a == i {
                acc += comp.measurement.element(k);
            }
        }
        marginal_dev = marginal_dev.max(frobenius(&(acc - first.element(i))));
    }
    t.require(
        marginal_dev <= EQUALITY_TOL,
        "sum_j Pi_(i,j) = Pi_i",
        || json!({"deviation": marginal_dev}),
        inputs,
    );

    let cert = check_coarser(&first, &comp.measurement, TOL_FEAS)?;
    record_certificate(t, &cert, &first, &comp.measurement)?;
    t.require(cert.feasible, "first measurement is coarser than the composition", || json!({"verdict": cert.verdict}), inputs);

    let kraus = first.kraus().expect("generated measurements carry Kraus operators");
    for _ in 0..5 {
        let rho = any_state(rng, dim)?;
        let (s1, s12) = (s_obs(&first, &rho)?, s_obs(&comp.measurement, &rho)?);
        t.require(
            s12 <= s1 + INEQUALITY_TOL,
            "S_(C1,C2) <= S_C1",
            || json!({"s_first": s1, "s_composed": s12}),
            || json!({"inputs": inputs(), "rho": sjson(&rho)}),
        );
        let joint = outcome_probabilities(&comp.measurement, &rho)?;
        let mut worst: f64 = 0.0;
        for (k, &(i, j)) in comp.labels.iter().enumerate() {
            let expected = match post_measurement_state(kraus, i, &rho) {
                Ok((post, pi)) => pi * second.elements()[j].trace_with(post.matrix()),
                Err(_) => 0.0,
            };
            worst = worst.max((joint.probs()[k] - expected).abs());
        }
        t.require(
            worst <= INEQUALITY_TOL,
            "p(i,j) = p(i) Tr[Pi2_j rho_i]",
            || json!({"deviation": worst}),
            || json!({"inputs": inputs(), "rho": sjson(&rho)}),
        );
    }
    Ok(())
}
