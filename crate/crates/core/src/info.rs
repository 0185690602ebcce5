//! Entropies and divergences, all in nats.
//!
//! Observational entropy of a probability/volume pair is
//! `S_obs(p, V) = sum_i p_i (ln V_i - ln p_i)`. For a measurement `C` and state
//! `rho` the pair is `p_i = Tr[Pi_i rho]`, `V_i = Tr[Pi_i]`, and the entropy
//! splits as `ln V_tot - D_KL[p || V / V_tot]`.

use serde::{Deserialize, Serialize};

use crate::coarse::StochasticMatrix;
use crate::error::{Error, Result};
use crate::qm::matrix;
use crate::qm::{outcome_probabilities, DensityMatrix, GeneralizedMeasurement};

/// Probabilities at or below this value are treated as zero in `0 ln 0 = 0`.
pub const ZERO_PROB: f64 = 1e-14;
/// Normalization tolerance for probability vectors.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Outcome probabilities paired with outcome volumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeighted", into = "RawWeighted")]
pub struct WeightedDistribution {
    probs: Vec<f64>,
    volumes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawWeighted {
    probs: Vec<f64>,
    volumes: Vec<f64>,
}

impl TryFrom<RawWeighted> for WeightedDistribution {
    type Error = Error;
    fn try_from(raw: RawWeighted) -> Result<Self> {
        Self::new(raw.probs, raw.volumes)
    }
}

impl From<WeightedDistribution> for RawWeighted {
    fn from(w: WeightedDistribution) -> Self {
        RawWeighted { probs: w.probs, volumes: w.volumes }
    }
}

impl WeightedDistribution {
    pub fn new(probs: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if probs.len() != volumes.len() {
            return Err(Error::LengthMismatch { left: probs.len(), right: volumes.len() });
        }
        check_probabilities(&probs)?;
        for (index, &v) in volumes.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveVolume { index, value: v });
            }
        }
        Ok(Self { probs, volumes })
    }

    /// Two-outcome pair completed from its first entries: `p = (p1, 1 - p1)`,
    /// `V = (v1, vtot - v1)`.
    pub fn two_outcome(p1: f64, v1: f64, vtot: f64) -> Result<Self> {
        Self::new(vec![p1, 1.0 - p1], vec![v1, vtot - v1])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// `p_i^id = V_i / V_tot`, the distribution under the uniform state.
    pub fn uniform_reference(&self) -> Vec<f64> {
        let total = self.total_volume();
        self.volumes.iter().map(|v| v / total).collect()
    }
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    for (index, &x) in p.iter().enumerate() {
        if !x.is_finite() || x < 0.0 || x > 1.0 + NORMALIZATION_TOL {
            return Err(Error::InvalidProbability { index, value: x });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Joint distribution `p_xy` stored row-major (rows `x`, columns `y`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for JointDistribution {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        Self::new(raw.matrix)
    }
}

impl From<JointDistribution> for RawJoint {
    fn from(j: JointDistribution) -> Self {
        RawJoint { matrix: j.to_rows() }
    }
}

impl JointDistribution {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map(Vec::len).unwrap_or(0);
        if rows == 0 || cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("joint distribution must be a non-empty rectangle".into()));
        }
        let data: Vec<f64> = matrix.into_iter().flatten().collect();
        for (index, &x) in data.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidProbability { index, value: x });
            }
        }
        let sum: f64 = data.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.data.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols).map(|y| (0..self.rows).map(|x| self.get(x, y)).sum()).collect()
    }
}

/// Entropy bookkeeping for one measurement and state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub probs: Vec<f64>,
    pub volumes: Vec<f64>,
    pub s_obs: f64,
    pub s_vn: f64,
    pub ln_vtot: f64,
    pub d_kl_to_uniform: f64,
}

impl EntropyReport {
    /// `|S_obs - (ln V_tot - D_KL[p || p^id])|`
    pub fn identity_gap(&self) -> f64 {
        (self.s_obs - (self.ln_vtot - self.d_kl_to_uniform)).abs()
    }
}

/// `sum_i p_i (ln V_i - ln p_i)`
pub fn s_obs_classical(w: &WeightedDistribution) -> f64 {
    w.probs
        .iter()
        .zip(&w.volumes)
        .filter(|(p, _)| **p > ZERO_PROB)
        .map(|(p, v)| p * (v.ln() - p.ln()))
        .sum()
}

/// Observational entropy of `rho` under `c_meas`, with the decomposition terms.
pub fn observational_entropy(c_meas: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<EntropyReport> {
    let w = outcome_probabilities(c_meas, rho)?;
    let s_obs = s_obs_classical(&w);
    let d_kl_to_uniform = kl_divergence(w.probs(), &w.uniform_reference())?;
    Ok(EntropyReport {
        s_obs,
        s_vn: von_neumann_entropy(rho),
        ln_vtot: w.total_volume().ln(),
        d_kl_to_uniform,
        probs: w.probs,
        volumes: w.volumes,
    })
}

/// Observational entropy only.
pub fn s_obs(c_meas: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<f64> {
    Ok(s_obs_classical(&outcome_probabilities(c_meas, rho)?))
}

/// `-Tr[rho ln rho]`
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(&rho.eigenvalues())
}

/// Shannon entropy of a probability vector.
pub fn entropy_of(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > ZERO_PROB).map(|&x| -x * x.ln()).sum()
}

/// `D_KL[p || q]`, or `f64::INFINITY` when `p` is not absolutely continuous
/// with respect to `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    for v in [p, q] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= ZERO_PROB {
            continue;
        }
        if qi <= ZERO_PROB {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi.ln() - qi.ln());
    }
    Ok(acc)
}

/// `sum_xy p_xy ln(p_xy / (p_x p_y))`
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let px = j.row_marginal();
    let py = j.col_marginal();
    let mut acc = 0.0;
    for x in 0..j.rows {
        for y in 0..j.cols {
            let pxy = j.get(x, y);
            if pxy > ZERO_PROB {
                acc += pxy * (pxy.ln() - px[x].ln() - py[y].ln());
            }
        }
    }
    acc
}

/// `p_xi = <x|Pi_i|x> <x|rho|x>` over the phase-fixed eigenbasis of `rho`.
pub fn measurement_state_joint(c_meas: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<JointDistribution> {
    if c_meas.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: c_meas.dim(), found: rho.dim() });
    }
    let (_, vectors) = matrix::hermitian_eigen(rho.matrix());
    let mut rows = Vec::with_capacity(vectors.len());
    for x in &vectors {
        let px = x.dotc(&(rho.matrix() * x)).re.max(0.0);
        let row = c_meas
            .elements()
            .iter()
            .map(|e| x.dotc(&(e.matrix() * x)).re.max(0.0) * px)
            .collect();
        rows.push(row);
    }
    // Absorb round-off so the normalization check is exact to machine precision.
    let total: f64 = rows.iter().flat_map(|r: &Vec<f64>| r.iter()).sum();
    for r in rows.iter_mut() {
        for v in r.iter_mut() {
            *v /= total;
        }
    }
    JointDistribution::new(rows)
}

/// `p_j = sum_i P_ji p_i`, `V_j = sum_i P_ji V_i`.
pub fn push_forward(p: &StochasticMatrix, w: &WeightedDistribution) -> Result<WeightedDistribution> {
    if p.cols() != w.len() {
        return Err(Error::ShapeMismatch(format!(
            "transition matrix has {} columns, distribution has {} outcomes",
            p.cols(),
            w.len()
        )));
    }
    let probs = p.apply(&w.probs)?;
    let volumes = p.apply(&w.volumes)?;
    WeightedDistribution::new(probs, volumes)
}

/// Push-forward of a plain probability vector.
pub fn push_forward_probs(p: &StochasticMatrix, probs: &[f64]) -> Result<Vec<f64>> {
    p.apply(probs)
}
