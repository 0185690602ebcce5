//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use povm_coarse::coarse::{
    check_coarser, check_coarser_classical, check_coarser_in_subspace, verify_subspace_witness, OutcomeSet,
    StochasticMatrix, Verdict, TOL_FEAS,
};
use povm_coarse::info::{observational_entropy, s_obs_classical, von_neumann_entropy, WeightedDistribution};
use povm_coarse::qm::matrix::{frobenius, ket, zeros};
use povm_coarse::qm::{outcome_probabilities, GeneralizedMeasurement, Subspace};
use povm_coarse::region::{inclusion_violations, region_point, region_scan, RegionSpec};
use povm_coarse::verify::constructions::refinement;
use povm_coarse::verify::counterexamples::{converse_quantum, plus_minus_pair, reassembled_state, vn_instance};
use povm_coarse::verify::random::{povm_with, projective_with, trial_rng};
use povm_coarse::verify::{run_suite, SuiteReport};
use rand::Rng;

const SEED: u64 = 20_240_917;

const THEOREM_SUITES: &[&str] = &[
    "dpi_kl",
    "obs_monotone",
    "dpi_mi",
    "projective_equiv",
    "lemma_processing",
    "coarser_entropy",
    "coarser_mi",
    "subspace_processing",
    "subspace_entropy",
    "subspace_mi",
    "restriction",
    "bounds",
    "composition",
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if elapsed > limit {
        out.passed = false;
    }
    out.detail = format!("{} [{:.2?} / limit {:?}]", out.detail, elapsed, limit);
    out
}

/// Binary entropy in nats, the reference value for `p = (3/4, 1/4)`, `V = (1, 1)`.
fn h(p: f64) -> f64 {
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

fn converse_counterexample() -> Outcome {
    let w1 = WeightedDistribution::new(vec![0.75, 0.25], vec![1.0, 1.0]).unwrap();
    let w2 = WeightedDistribution::new(vec![1.0, 0.0], vec![1.8, 0.2]).unwrap();
    let cert = check_coarser_classical(&w1, &w2, TOL_FEAS).unwrap();
    let s1 = s_obs_classical(&w1);
    let s2 = s_obs_classical(&w2);
    let s1_ok = (s1 - h(0.75)).abs() <= 1e-9;
    let s2_ok = (s2 - 1.8f64.ln()).abs() <= 1e-9;

    let (c1, c2, rho) = converse_quantum();
    let q1 = outcome_probabilities(&c1, &rho).unwrap();
    let q2 = outcome_probabilities(&c2, &rho).unwrap();
    let dev = [
        (q1.probs(), w1.probs()),
        (q1.volumes(), w1.volumes()),
        (q2.probs(), w2.probs()),
        (q2.volumes(), w2.volumes()),
    ]
    .iter()
    .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
    .fold(0.0, f64::max);
    Outcome {
        passed: cert.verdict == Verdict::Infeasible && s1_ok && s2_ok && s2 > s1 + 1e-9 && dev <= 1e-12,
        detail: format!(
            "verdict={:?} S2={s2:.10} S1={s1:.10} realization_dev={dev:.1e}",
            cert.verdict
        ),
    }
}

fn vn_relation_failure() -> Outcome {
    let (m, rho) = vn_instance();
    let s_c = observational_entropy(&m, &rho).unwrap().s_obs;
    let sigma = reassembled_state(&m, &rho).unwrap();
    let s_vn = von_neumann_entropy(&sigma);
    let gap = (s_c - s_vn).abs();
    Outcome {
        passed: gap > 0.1,
        detail: format!("S_C={s_c:.10} S_vN(sigma)={s_vn:.10} gap={gap:.10} (required > 0.1 nats)"),
    }
}

fn subspace_counterexamples() -> Outcome {
    let (pm, z) = plus_minus_pair();
    let v0 = check_coarser_in_subspace(&pm, &z, &Subspace::new(2, vec![ket(2, 0)]).unwrap(), TOL_FEAS)
        .unwrap()
        .verdict;
    let v1 = check_coarser_in_subspace(&pm, &z, &Subspace::new(2, vec![ket(2, 1)]).unwrap(), TOL_FEAS)
        .unwrap()
        .verdict;
    let vfull = check_coarser_in_subspace(&pm, &z, &Subspace::full(2), TOL_FEAS).unwrap().verdict;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = povm_coarse::qm::matrix::real_vector(&[s, s]);
    let f = Subspace::new(2, vec![plus]).unwrap();
    let all = OutcomeSet::all(2);
    let swap = StochasticMatrix::from_assignment(2, &[1, 0]).unwrap();
    let in_f = verify_subspace_witness(&z, &z, &f, &all, &all, &swap).unwrap();
    let swap_f = in_f.residual <= 1e-12 && in_f.max_volume_violation() <= 1e-12;
    // Full space: enumerate every 0/1 and the LP witness; only the identity fits.
    let full = check_coarser(&z, &z, TOL_FEAS).unwrap();
    let w = full.witness.clone().unwrap();
    let id_dist = (0..2)
        .flat_map(|j| (0..2).map(move |i| (j, i)))
        .map(|(j, i)| (w.get(j, i) - f64::from(u8::from(i == j))).abs())
        .fold(0.0, f64::max);
    let swap_full = povm_coarse::coarse::witness_residual(&z, &z, &swap).unwrap();
    Outcome {
        passed: v0 == Verdict::Feasible
            && v1 == Verdict::Feasible
            && vfull == Verdict::Infeasible
            && swap_f
            && id_dist <= 1e-9
            && swap_full > 0.5,
        detail: format!(
            "span|0>={v0:?} span|1>={v1:?} full={vfull:?}; swap residual in F={:.1e}, full-space witness distance to identity={id_dist:.1e}, swap residual in full space={swap_full:.3}",
            in_f.residual
        ),
    }
}

fn theorem_suites() -> (Outcome, Vec<SuiteReport>) {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut bad = Vec::new();
    for dim in 2..=6 {
        for name in THEOREM_SUITES {
            let r = run_suite(name, 500, dim, SEED).unwrap();
            if !r.passed() {
                bad.push(format!("{name}@{dim}: {} failures, first {:?}", r.failures, r.details.first()));
            }
            reports.push(r);
        }
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(300);
    let outcome = Outcome {
        passed: bad.is_empty() && elapsed <= limit,
        detail: format!(
            "{} suite runs x 500 trials, {} with failures{} [{:.2?} / limit {:?}]",
            reports.len(),
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) },
            elapsed,
            limit
        ),
    };
    (outcome, reports)
}

/// Exhaustive search over all maps from fine outcomes to coarse outcomes.
fn partition_oracle(coarse: &GeneralizedMeasurement, fine: &GeneralizedMeasurement) -> bool {
    let m = coarse.len();
    let n = fine.len();
    let mut assign = vec![0usize; n];
    loop {
        let ok = (0..m).all(|j| {
            let mut acc = zeros(fine.dim());
            for i in 0..n {
                if assign[i] == j {
                    acc += fine.element(i);
                }
            }
            frobenius(&(acc - coarse.element(j))) <= 1e-8
        });
        if ok {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            assign[k] += 1;
            if assign[k] < m {
                break;
            }
            assign[k] = 0;
            k += 1;
        }
    }
}

fn projective_oracle() -> Outcome {
    let mut disagreements = 0;
    let mut positives = 0;
    let mut max_outcomes = 0;
    for trial in 0..200u64 {
        let mut rng = trial_rng(SEED ^ 0x7e57, trial);
        let dim = rng.random_range(2..=4);
        let m = rng.random_range(2..=dim.min(3));
        let (coarse, blocks) = projective_with(&mut rng, dim, m).unwrap();
        let fine = match rng.random_range(0..3) {
            0 => refinement(&mut rng, &blocks).unwrap(),
            1 => {
                let n = rng.random_range(2..=4);
                povm_with(&mut rng, dim, n).unwrap()
            }
            _ => {
                let k = rng.random_range(1..=dim);
                projective_with(&mut rng, dim, k).unwrap().0
            }
        };
        max_outcomes = max_outcomes.max(fine.len());
        let oracle = partition_oracle(&coarse, &fine);
        let lp = check_coarser(&coarse, &fine, TOL_FEAS).unwrap();
        positives += usize::from(oracle);
        if lp.verdict == Verdict::Ambiguous || lp.feasible != oracle {
            disagreements += 1;
        }
    }
    Outcome {
        passed: disagreements == 0 && max_outcomes <= 6,
        detail: format!("200 pairs, {positives} coarser by partition, {disagreements} disagreements, max fine outcomes {max_outcomes}"),
    }
}

fn region() -> Outcome {
    let spec = RegionSpec { p1: 0.75, v1: 1.0, vtot: 2.0, grid_n: 101 };
    let points = region_scan(&spec, TOL_FEAS).unwrap();
    let violations = inclusion_violations(&points).len();
    let blue = points.iter().filter(|p| p.feasible).count();
    let orange = points.iter().filter(|p| p.s_greater).count();
    let ambiguous = points.iter().filter(|p| p.verdict == Verdict::Ambiguous).count();
    let reference = WeightedDistribution::two_outcome(0.75, 1.0, 2.0).unwrap();
    let named = region_point(&reference, 1.0, 1.8, 2.0, TOL_FEAS).unwrap();
    let on_grid = points.iter().any(|p| p.p2 == 1.0 && (p.v2 - 1.8).abs() < 1e-12 && p.s_greater && !p.feasible);
    Outcome {
        passed: violations == 0 && blue < orange && named.s_greater && !named.feasible && on_grid,
        detail: format!(
            "{} points, blue={blue} orange={orange} violations={violations} ambiguous={ambiguous}, (1, 1.8): s_greater={} feasible={}",
            points.len(),
            named.s_greater,
            named.feasible
        ),
    }
}

fn witness_soundness(reports: &[SuiteReport]) -> Outcome {
    let certificates: usize = reports.iter().map(|r| r.certificates).sum();
    let worst = reports.iter().map(|r| r.max_witness_residual).fold(0.0, f64::max);
    Outcome {
        passed: certificates > 0 && worst <= 1e-7,
        detail: format!("{certificates} feasible certificates recomputed, max residual {worst:.2e}"),
    }
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    results.push(("converse counterexample", timed(Duration::from_secs(1), converse_counterexample)));
    results.push(("vN-relation failure", timed(Duration::from_secs(1), vn_relation_failure)));
    results.push(("subspace counterexamples", timed(Duration::from_secs(1), subspace_counterexamples)));
    let (suites, reports) = theorem_suites();
    results.push(("theorem suites", suites));
    results.push(("projective oracle equivalence", timed(Duration::from_secs(60), projective_oracle)));
    results.push(("region scan", timed(Duration::from_secs(10), region)));
    results.push(("witness soundness", witness_soundness(&reports)));

    let mut failed = 0;
    for (name, out) in &results {
        let tag = if out.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!out.passed);
        println!("acceptance {tag}: {name}: {}", out.detail);
    }
    println!("acceptance summary: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
