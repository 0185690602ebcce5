//! Scan of two-outcome classical coarse-grainings.
//!
//! For a fixed `(p1, V1)` with total volume `vtot`, every grid point
//! `(p2, v2)` describes the distribution `p = (p2, 1 - p2)`,
//! `V = (v2, vtot - v2)`. Each point records whether its observational entropy
//! is at least that of the reference and whether it is reachable from the
//! reference by a left stochastic map.

use serde::Serialize;

use crate::coarse::{check_coarser_classical, Verdict};
use crate::error::{Error, Result};
use crate::info::{s_obs_classical, WeightedDistribution};

/// Slack in the entropy comparison, so the reference point counts as `>=`.
pub const ENTROPY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub p2: f64,
    pub v2: f64,
    pub s_greater: bool,
    pub feasible: bool,
    #[serde(skip)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub p1: f64,
    pub v1: f64,
    pub vtot: f64,
    pub grid_n: usize,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p1 > 0.0 && self.p1 < 1.0) {
            return Err(Error::InvalidRange(format!("p1 = {} must lie in (0, 1)", self.p1)));
        }
        if !(self.vtot > 0.0 && self.vtot.is_finite()) {
            return Err(Error::InvalidRange(format!("vtot = {} must be positive", self.vtot)));
        }
        if !(self.v1 > 0.0 && self.v1 < self.vtot) {
            return Err(Error::InvalidRange(format!("v1 = {} must lie in (0, {})", self.v1, self.vtot)));
        }
        if self.grid_n < 2 {
            return Err(Error::InvalidRange(format!("grid size {} must be at least 2", self.grid_n)));
        }
        Ok(())
    }

    /// `i / (n - 1)`
    pub fn p_grid(&self) -> Vec<f64> {
        let last = (self.grid_n - 1) as f64;
        (0..self.grid_n).map(|i| i as f64 / last).collect()
    }

    /// `j vtot / (n - 1)`, with the two end points moved inward by half a step.
    pub fn v_grid(&self) -> Vec<f64> {
        let step = self.vtot / (self.grid_n - 1) as f64;
        (0..self.grid_n)
            .map(|j| {
                if j == 0 {
                    0.5 * step
                } else if j == self.grid_n - 1 {
                    self.vtot - 0.5 * step
                } else {
                    j as f64 * step
                }
            })
            .collect()
    }
}

/// Evaluates a single point against the reference.
pub fn region_point(reference: &WeightedDistribution, p2: f64, v2: f64, vtot: f64, tol: f64) -> Result<RegionPoint> {
    let w2 = WeightedDistribution::two_outcome(p2, v2, vtot)?;
    let s_greater = s_obs_classical(&w2) >= s_obs_classical(reference) - ENTROPY_SLACK;
    let verdict = check_coarser_classical(reference, &w2, tol)?.verdict;
    Ok(RegionPoint { p2, v2, s_greater, feasible: verdict.is_feasible(), verdict })
}

/// All grid points, `p2` major.
pub fn region_scan(spec: &RegionSpec, tol: f64) -> Result<Vec<RegionPoint>> {
    spec.validate()?;
    let reference = WeightedDistribution::two_outcome(spec.p1, spec.v1, spec.vtot)?;
    let vs = spec.v_grid();
    let mut out = Vec::with_capacity(spec.grid_n * spec.grid_n);
    for p2 in spec.p_grid() {
        for &v2 in &vs {
            out.push(region_point(&reference, p2, v2, spec.vtot, tol)?);
        }
    }
    Ok(out)
}

/// Points that are feasible but not entropy-increasing.
pub fn inclusion_violations(points: &[RegionPoint]) -> Vec<RegionPoint> {
    points.iter().filter(|p| p.feasible && !p.s_greater).copied().collect()
}

pub fn to_csv(points: &[RegionPoint]) -> String {
    let mut s = String::from("p2,v2,s_greater,feasible\n");
    for p in points {
        s.push_str(&format!("{},{},{},{}\n", p.p2, p.v2, u8::from(p.s_greater), u8::from(p.feasible)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::TOL_FEAS;

    #[test]
    fn grid_end_points_are_clamped() {
        let spec = RegionSpec { p1: 0.75, v1: 1.0, vtot: 2.0, grid_n: 5 };
        assert_eq!(spec.v_grid(), vec![0.25, 0.5, 1.0, 1.5, 1.75]);
        assert_eq!(spec.p_grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn named_points() {
        let reference = WeightedDistribution::two_outcome(0.75, 1.0, 2.0).unwrap();
        let orange_only = region_point(&reference, 1.0, 1.8, 2.0, TOL_FEAS).unwrap();
        assert!(orange_only.s_greater && !orange_only.feasible);
        let same = region_point(&reference, 0.75, 1.0, 2.0, TOL_FEAS).unwrap();
        assert!(same.s_greater && same.feasible);
    }

    #[test]
    fn bad_ranges() {
        for spec in [
            RegionSpec { p1: 1.0, v1: 1.0, vtot: 2.0, grid_n: 3 },
            RegionSpec { p1: 0.5, v1: 2.0, vtot: 2.0, grid_n: 3 },
            RegionSpec { p1: 0.5, v1: 1.0, vtot: 2.0, grid_n: 1 },
        ] {
            assert!(matches!(region_scan(&spec, TOL_FEAS), Err(Error::InvalidRange(_))));
        }
    }

    #[test]
    fn small_scan_csv() {
        let spec = RegionSpec { p1: 0.75, v1: 1.0, vtot: 2.0, grid_n: 3 };
        let pts = region_scan(&spec, TOL_FEAS).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(inclusion_violations(&pts).is_empty());
        let csv = to_csv(&pts);
        assert!(csv.starts_with("p2,v2,s_greater,feasible\n0,0.5,"));
        assert_eq!(csv.lines().count(), 10);
    }
}
