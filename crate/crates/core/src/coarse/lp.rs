//! Phase-1 simplex feasibility for `A x = b, G x <= h, x >= 0`.
//!
//! Dense tableau, Bland's rule. The phase-1 objective is the sum of the
//! artificial variables, i.e. the L1 norm of the constraint violation that
//! remains at the optimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default feasibility threshold on the phase-1 optimum and the residual.
pub const TOL_FEAS: f64 = 1e-8;
/// An optimum above `AMBIGUITY_FACTOR * tol` is a proof of infeasibility.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-12;
/// Relative norm below which an equality row counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
    /// Phase-1 optimum lies between `tol` and `10 tol`.
    Ambiguous,
}

impl Verdict {
    pub fn is_feasible(self) -> bool {
        self == Verdict::Feasible
    }
}

/// Linear constraints `rows * x (= or <=) rhs`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: Vec<f64>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub verdict: Verdict,
    /// Best point found; non-negative.
    pub x: Vec<f64>,
    pub phase1_optimum: f64,
    /// Largest violation of any equality or inequality at `x`.
    pub residual: f64,
    pub iterations: usize,
}

/// Decides whether some `x >= 0` satisfies the equalities and inequalities.
pub fn lp_feasible(
    equalities: &Constraints,
    inequalities: Option<&Constraints>,
    n_vars: usize,
    tol_feas: f64,
) -> Result<LpOutcome> {
    let empty = Constraints::new();
    let ineq = inequalities.unwrap_or(&empty);
    for (kind, c) in [("equality", equalities), ("inequality", ineq)] {
        if c.rows.len() != c.rhs.len() {
            return Err(Error::ShapeMismatch(format!(
                "{kind} block has {} rows but {} right-hand sides",
                c.rows.len(),
                c.rhs.len()
            )));
        }
        if let Some(r) = c.rows.iter().find(|r| r.len() != n_vars) {
            return Err(Error::ShapeMismatch(format!("{kind} row has {} entries, expected {n_vars}", r.len())));
        }
    }

    let reduced = reduce_equalities(equalities, n_vars);
    let m_eq = reduced.len();
    let m_in = ineq.len();
    let m = m_eq + m_in;
    let n_struct = n_vars + m_in;

    // Which rows need an artificial: every equality, and inequalities with
    // negative right-hand side.
    let mut artificial_of_row = vec![None; m];
    let mut n_art = 0;
    for (r, slot) in artificial_of_row.iter_mut().enumerate() {
        let needs = r < m_eq || ineq.rhs[r - m_eq] < 0.0;
        if needs {
            *slot = Some(n_struct + n_art);
            n_art += 1;
        }
    }
    let n_cols = n_struct + n_art;
    let width = n_cols + 1;
    let mut t = vec![0.0; m * width];
    let mut basis = vec![0usize; m];

    for r in 0..m {
        let (row, rhs, slack) = if r < m_eq {
            (&reduced.rows[r], reduced.rhs[r], None)
        } else {
            (&ineq.rows[r - m_eq], ineq.rhs[r - m_eq], Some(n_vars + (r - m_eq)))
        };
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        let base = r * width;
        for (k, &a) in row.iter().enumerate() {
            t[base + k] = sign * a;
        }
        if let Some(s) = slack {
            t[base + s] = sign;
        }
        t[base + n_cols] = sign * rhs;
        match artificial_of_row[r] {
            Some(a) => {
                t[base + a] = 1.0;
                basis[r] = a;
            }
            None => basis[r] = slack.expect("inequality row"),
        }
    }

    // Reduced costs for min sum(artificials): d_j = -sum over artificial rows.
    let mut cost = vec![0.0; width];
    for r in 0..m {
        if artificial_of_row[r].is_some() {
            let base = r * width;
            for k in 0..n_struct {
                cost[k] -= t[base + k];
            }
            cost[n_cols] -= t[base + n_cols];
        }
    }
    let mut allowed = vec![true; n_cols];

    let max_iter = 10 * (m + n_cols).pow(2).max(1);
    let mut iterations = 0;
    loop {
        // Bland: lowest-index improving column.
        // Columns without a positive pivot entry only carry round-off in
        // their reduced cost (the phase-1 objective is bounded below).
        let pivotable = |k: usize| (0..m).any(|r| t[r * width + k] > PIVOT_EPS);
        let Some(enter) = (0..n_cols).find(|&k| allowed[k] && cost[k] < -COST_EPS && pivotable(k)) else {
            break;
        };
        // Ratio test. Ties (common: many zero right-hand sides) go to the
        // largest pivot element, then to the lowest basic index.
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = t[r * width + enter];
            if a > PIVOT_EPS {
                let ratio = t[r * width + n_cols].max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                        let la = t[lr * width + enter];
                        let better = if tie {
                            a > la * (1.0 + 1e-9) || (a >= la * (1.0 - 1e-9) && basis[r] < basis[lr])
                        } else {
                            ratio < lratio
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        let (pivot_row, _) = leave.expect("entering column is pivotable");
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::IterationLimit { iterations });
        }
        pivot(&mut t, &mut cost, width, m, pivot_row, enter);
        let left = basis[pivot_row];
        basis[pivot_row] = enter;
        if left >= n_struct {
            allowed[left] = false;
        }
    }

    let mut x = vec![0.0; n_vars];
    let mut phase1_optimum = 0.0;
    for r in 0..m {
        let v = t[r * width + n_cols];
        if basis[r] < n_vars {
            x[basis[r]] = v.max(0.0);
        } else if basis[r] >= n_struct {
            phase1_optimum += v.max(0.0);
        }
    }

    let residual = residual_of(equalities, ineq, &x);
    let verdict = if phase1_optimum <= tol_feas && residual <= tol_feas {
        Verdict::Feasible
    } else if phase1_optimum > AMBIGUITY_FACTOR * tol_feas {
        Verdict::Infeasible
    } else {
        Verdict::Ambiguous
    };
    Ok(LpOutcome { verdict, x, phase1_optimum, residual, iterations })
}

/// Replaces the equalities by an orthonormal basis of their row space (the
/// right-hand sides transformed alongside). Dependent rows are dropped when
/// consistent; an inconsistent dependent row is kept as `0 x = r`, which
/// leaves its artificial variable at `|r|`.
fn reduce_equalities(eq: &Constraints, n_vars: usize) -> Constraints {
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut inconsistent = Constraints::new();
    for (row, &rhs) in eq.rows.iter().zip(&eq.rhs) {
        let norm0 = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        let mut v = row.clone();
        let mut b = rhs;
        for _ in 0..2 {
            for (q, qb) in &basis {
                let dot: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                if dot != 0.0 {
                    for (vk, qk) in v.iter_mut().zip(q) {
                        *vk -= dot * qk;
                    }
                    b -= dot * qb;
                }
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > DEPENDENCE_TOL * norm0.max(1.0) {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push((v, b / norm));
        } else if b.abs() > DEPENDENCE_TOL * (1.0 + rhs.abs()) {
            inconsistent.push(vec![0.0; n_vars], b);
        }
    }
    let mut out = Constraints::new();
    for (q, b) in basis {
        out.push(q, b);
    }
    for (q, b) in inconsistent.rows.into_iter().zip(inconsistent.rhs) {
        out.push(q, b);
    }
    out
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, m: usize, pr: usize, pc: usize) {
    let base = pr * width;
    let inv = 1.0 / t[base + pc];
    for k in 0..width {
        t[base + k] *= inv;
    }
    t[base + pc] = 1.0;
    let pivot_row: Vec<f64> = t[base..base + width].to_vec();
    for r in 0..m {
        if r == pr {
            continue;
        }
        let rb = r * width;
        let f = t[rb + pc];
        if f != 0.0 {
            for k in 0..width {
                t[rb + k] -= f * pivot_row[k];
            }
            t[rb + pc] = 0.0;
        }
    }
    let f = cost[pc];
    if f != 0.0 {
        for k in 0..width {
            cost[k] -= f * pivot_row[k];
        }
        cost[pc] = 0.0;
    }
}

/// Largest violation of `A x = b` and `G x <= h`.
pub fn residual_of(equalities: &Constraints, inequalities: &Constraints, x: &[f64]) -> f64 {
    let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    let eq = equalities
        .rows
        .iter()
        .zip(&equalities.rhs)
        .map(|(r, b)| (dot(r) - b).abs())
        .fold(0.0, f64::max);
    let ineq = inequalities
        .rows
        .iter()
        .zip(&inequalities.rhs)
        .map(|(r, h)| (dot(r) - h).max(0.0))
        .fold(0.0, f64::max);
    eq.max(ineq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eqs(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Constraints {
        Constraints { rows, rhs }
    }

    #[test]
    fn simple_feasible() {
        let out = lp_feasible(&eqs(vec![vec![1.0, 1.0]], vec![1.0]), None, 2, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible);
        assert!((out.x[0] + out.x[1] - 1.0).abs() < 1e-12);
        assert!(out.x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn negative_rhs_infeasible() {
        let out = lp_feasible(&eqs(vec![vec![1.0]], vec![-1.0]), None, 1, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Infeasible);
        assert!((out.phase1_optimum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inequalities_respected() {
        // x1 + x2 = 1, x1 <= 0.25, -x2 <= -0.5
        let e = eqs(vec![vec![1.0, 1.0]], vec![1.0]);
        let g = eqs(vec![vec![1.0, 0.0], vec![0.0, -1.0]], vec![0.25, -0.5]);
        let out = lp_feasible(&e, Some(&g), 2, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible);
        assert!(out.x[0] <= 0.25 + 1e-12 && out.x[1] >= 0.5 - 1e-12);

        let g = eqs(vec![vec![-1.0, 0.0], vec![0.0, -1.0]], vec![-0.6, -0.6]);
        let out = lp_feasible(&e, Some(&g), 2, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Infeasible);
    }

    #[test]
    fn redundant_equalities_are_fine() {
        let e = eqs(
            vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 2.0, 1.0]],
            vec![1.0, 2.0, 1.0, 2.0],
        );
        let out = lp_feasible(&e, None, 3, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible);
        assert!(out.residual < 1e-12);
    }

    #[test]
    fn tiny_violation_is_ambiguous() {
        let out = lp_feasible(&eqs(vec![vec![1.0]], vec![-5e-8]), None, 1, TOL_FEAS).unwrap();
        assert_eq!(out.verdict, Verdict::Ambiguous);
    }

    #[test]
    fn shape_errors() {
        let bad = eqs(vec![vec![1.0, 2.0]], vec![1.0]);
        assert!(matches!(lp_feasible(&bad, None, 3, TOL_FEAS), Err(Error::ShapeMismatch(_))));
        let bad = eqs(vec![vec![1.0]], vec![]);
        assert!(matches!(lp_feasible(&bad, None, 1, TOL_FEAS), Err(Error::ShapeMismatch(_))));
    }
}
