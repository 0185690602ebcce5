//! Generalized measurements: POVM elements with optional Kraus operators.

use super::matrix::{self, c, frobenius, ComplexMatrix};
use super::operator::{DensityMatrix, HermitianOperator, Projector, Tolerances};
use crate::error::{Error, Result};
use crate::info::WeightedDistribution;

/// Kraus operators grouped by outcome: `ops[i][m]` is `K_im`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<Vec<ComplexMatrix>>,
}

impl KrausSet {
    pub fn new(ops: Vec<Vec<ComplexMatrix>>) -> Self {
        Self { ops }
    }

    /// One Kraus operator per outcome.
    pub fn single(ops: Vec<ComplexMatrix>) -> Self {
        Self { ops: ops.into_iter().map(|k| vec![k]).collect() }
    }

    pub fn outcomes(&self) -> usize {
        self.ops.len()
    }

    pub fn outcome(&self, i: usize) -> &[ComplexMatrix] {
        &self.ops[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<ComplexMatrix>> {
        self.ops.iter()
    }

    /// `sum_m K_im^dagger K_im` for outcome `i`.
    pub fn effect(&self, i: usize) -> ComplexMatrix {
        let first = &self.ops[i][0];
        let mut acc = ComplexMatrix::zeros(first.ncols(), first.ncols());
        for k in &self.ops[i] {
            acc += k.adjoint() * k;
        }
        acc
    }

    /// `A_i(rho) = sum_m K_im rho K_im^dagger`
    pub fn apply(&self, i: usize, rho: &ComplexMatrix) -> ComplexMatrix {
        let first = &self.ops[i][0];
        let mut acc = ComplexMatrix::zeros(first.nrows(), first.nrows());
        for k in &self.ops[i] {
            acc += k * rho * k.adjoint();
        }
        acc
    }
}

/// A validated POVM, optionally carrying an instrument (Kraus) description.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedMeasurement {
    dim: usize,
    elements: Vec<HermitianOperator>,
    kraus: Option<KrausSet>,
}

/// Checks completeness, positivity and Kraus consistency.
pub fn validate_measurement(
    elements: Vec<HermitianOperator>,
    kraus: Option<KrausSet>,
) -> Result<GeneralizedMeasurement> {
    validate_measurement_with(elements, kraus, &Tolerances::default())
}

pub fn validate_measurement_with(
    elements: Vec<HermitianOperator>,
    kraus: Option<KrausSet>,
    tol: &Tolerances,
) -> Result<GeneralizedMeasurement> {
    let dim = elements.first().ok_or(Error::EmptyMeasurement)?.dim();
    let mut sum = matrix::zeros(dim);
    for (index, e) in elements.iter().enumerate() {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
        }
        let norm = e.frobenius();
        if norm <= tol.zero {
            return Err(Error::ZeroElement { index, norm });
        }
        let min_eigenvalue = e.min_eigenvalue();
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd { index, min_eigenvalue });
        }
        sum += e.matrix();
    }
    let deviation = frobenius(&(sum - matrix::identity(dim)));
    if deviation > tol.complete {
        return Err(Error::IncompleteSum { deviation });
    }
    if let Some(k) = &kraus {
        if k.outcomes() != elements.len() {
            return Err(Error::KrausMismatch { outcome: k.outcomes().min(elements.len()), deviation: f64::INFINITY });
        }
        for (outcome, e) in elements.iter().enumerate() {
            let ops = k.outcome(outcome);
            if ops.is_empty() {
                return Err(Error::KrausMismatch { outcome, deviation: f64::INFINITY });
            }
            for op in ops {
                if op.ncols() != dim || op.nrows() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: op.ncols() });
                }
            }
            let deviation = frobenius(&(k.effect(outcome) - e.matrix()));
            if deviation > tol.complete {
                return Err(Error::KrausMismatch { outcome, deviation });
            }
        }
    }
    Ok(GeneralizedMeasurement { dim, elements, kraus })
}

impl GeneralizedMeasurement {
    /// Validates raw matrices as POVM elements, without Kraus operators.
    pub fn from_matrices(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let ops = elements
            .into_iter()
            .map(HermitianOperator::new)
            .collect::<Result<Vec<_>>>()?;
        validate_measurement(ops, None)
    }

    /// A projective measurement whose Kraus operators are the projectors.
    pub fn projective(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let tol = Tolerances::default();
        let mut ops = Vec::with_capacity(projectors.len());
        for p in &projectors {
            ops.push(Projector::with_tolerances(p.clone(), &tol)?.into_operator());
        }
        let kraus = KrausSet::single(ops.iter().map(|o| o.matrix().clone()).collect());
        validate_measurement_with(ops, Some(kraus), &tol)
    }

    /// Attaches `K_i = sqrt(Pi_i)` when no Kraus operators are present.
    pub fn with_sqrt_kraus(self) -> Self {
        if self.kraus.is_some() {
            return self;
        }
        let kraus = KrausSet::single(self.elements.iter().map(|e| matrix::psd_sqrt(e.matrix())).collect());
        Self { kraus: Some(kraus), ..self }
    }

    pub fn without_kraus(self) -> Self {
        Self { kraus: None, ..self }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        self.elements[i].matrix()
    }

    pub fn kraus(&self) -> Option<&KrausSet> {
        self.kraus.as_ref()
    }

    /// `V_i = Tr[Pi_i]`
    pub fn volumes(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.trace()).collect()
    }

    /// True when every element is a projector within `tol`.
    pub fn is_projective(&self, tol: f64) -> bool {
        self.projector_deviation().iter().all(|&d| d <= tol)
    }

    /// `||Pi_i^2 - Pi_i||_F` per element.
    pub fn projector_deviation(&self) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| {
                let m = e.matrix();
                frobenius(&(m * m - m))
            })
            .collect()
    }

    /// Same elements in a different order.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let elements = order.iter().map(|&i| self.elements[i].clone()).collect();
        let kraus = self
            .kraus
            .as_ref()
            .map(|k| KrausSet::new(order.iter().map(|&i| k.outcome(i).to_vec()).collect()));
        Self { dim: self.dim, elements, kraus }
    }
}

/// One eigenspace: eigenvalue and the projector onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub value: f64,
    pub projector: Projector,
}

/// Spectral decomposition with degenerate eigenvalues merged. Eigenvalues are
/// descending; two consecutive eigenvalues closer than
/// `degeneracy_tol * max(1, spectral radius)` share a projector.
pub fn eigendecompose(a: &HermitianOperator, degeneracy_tol: f64) -> Vec<Eigenspace> {
    let (values, vectors) = matrix::hermitian_eigen(a.matrix());
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let threshold = degeneracy_tol * scale;
    let d = a.dim();
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some((vals, idx)) if (vals[vals.len() - 1] - v).abs() <= threshold => {
                vals.push(v);
                idx.push(k);
            }
            _ => groups.push((vec![v], vec![k])),
        }
    }
    groups
        .into_iter()
        .map(|(vals, idx)| {
            let basis: Vec<_> = idx.iter().map(|&k| vectors[k].clone()).collect();
            Eigenspace {
                value: vals.iter().sum::<f64>() / vals.len() as f64,
                projector: Projector::from_orthonormal(d, &basis),
            }
        })
        .collect()
}

/// The projective measurement onto the eigenspaces of `rho`.
pub fn measurement_from_state(rho: &DensityMatrix) -> Result<GeneralizedMeasurement> {
    measurement_from_operator(rho.operator(), Tolerances::default().degeneracy)
}

/// The projective measurement onto the eigenspaces of a Hermitian operator.
pub fn measurement_from_operator(a: &HermitianOperator, degeneracy_tol: f64) -> Result<GeneralizedMeasurement> {
    let spaces = eigendecompose(a, degeneracy_tol);
    let ops: Vec<HermitianOperator> = spaces.into_iter().map(|s| s.projector.into_operator()).collect();
    let kraus = KrausSet::single(ops.iter().map(|o| o.matrix().clone()).collect());
    validate_measurement(ops, Some(kraus))
}

/// Outcome probabilities `Tr[Pi_i rho]` and volumes `Tr[Pi_i]`.
pub fn outcome_probabilities(c_meas: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<WeightedDistribution> {
    if c_meas.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: c_meas.dim(), found: rho.dim() });
    }
    let mut probs = Vec::with_capacity(c_meas.len());
    for (outcome, e) in c_meas.elements().iter().enumerate() {
        let p = e.trace_with(rho.matrix());
        if p < -1e-9 {
            return Err(Error::NegativeProbability { outcome, probability: p });
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    WeightedDistribution::new(probs, c_meas.volumes())
}

/// Result of running one measurement after another.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub measurement: GeneralizedMeasurement,
    /// `(i, j)` label of every retained element, in order.
    pub labels: Vec<(usize, usize)>,
    /// Labels whose element vanished numerically and was dropped.
    pub dropped: Vec<(usize, usize)>,
}

/// Performs `first`, then `second`; outcomes are pairs `(i, j)` with
/// elements `sum_n K_in^dagger Pi_j K_in`.
pub fn compose_measurements(first: &GeneralizedMeasurement, second: &GeneralizedMeasurement) -> Result<Composition> {
    compose_measurements_with(first, second, &Tolerances::default())
}

pub fn compose_measurements_with(
    first: &GeneralizedMeasurement,
    second: &GeneralizedMeasurement,
    tol: &Tolerances,
) -> Result<Composition> {
    let k1 = first.kraus().ok_or(Error::MissingKraus)?;
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
    }
    let mut elements = Vec::new();
    let mut kraus_out = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..first.len() {
        for j in 0..second.len() {
            let mut e = matrix::zeros(first.dim());
            for k in k1.outcome(i) {
                e += k.adjoint() * second.element(j) * k;
            }
            if frobenius(&e) <= tol.zero {
                dropped.push((i, j));
                continue;
            }
            if let Some(k2) = second.kraus() {
                let mut ops = Vec::new();
                for ka in k1.outcome(i) {
                    for kb in k2.outcome(j) {
                        ops.push(kb * ka);
                    }
                }
                kraus_out.push(ops);
            }
            elements.push(HermitianOperator::from_hermitian_unchecked(e));
            labels.push((i, j));
        }
    }
    let kraus = second.kraus().map(|_| KrausSet::new(kraus_out));
    let measurement = validate_measurement_with(elements, kraus, tol)?;
    Ok(Composition { measurement, labels, dropped })
}

/// Updates `rho` after observing `outcome`; returns the normalized state and
/// the outcome probability.
pub fn post_measurement_state(kraus: &KrausSet, outcome: usize, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    if outcome >= kraus.outcomes() {
        return Err(Error::OutcomeOutOfRange { index: outcome, len: kraus.outcomes() });
    }
    for k in kraus.outcome(outcome) {
        if k.ncols() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: k.ncols() });
        }
    }
    let updated = kraus.apply(outcome, rho.matrix());
    let probability = matrix::trace(&updated).re;
    if probability <= Tolerances::default().zero {
        return Err(Error::ZeroProbabilityOutcome { outcome, probability });
    }
    let state = matrix::hermitize(&updated) * c(1.0 / probability, 0.0);
    Ok((DensityMatrix::new(state)?, probability))
}

/// `Tr[Pi P]` for a PSD operator and a projector, with the zero-product flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePairing {
    pub trace: f64,
    /// `Tr[Pi P] <= tol`; then `Pi P` and `P Pi` vanish up to `product_bound`.
    pub is_zero_product: bool,
    /// `sqrt(lambda_max(Pi) * max(Tr[Pi P], tol))`, an upper bound on `||Pi P||_F`.
    pub product_bound: f64,
}

pub fn trace_pairing(pi: &HermitianOperator, p: &Projector, tol: f64) -> Result<TracePairing> {
    if pi.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: pi.dim(), found: p.dim() });
    }
    let trace = pi.trace_with(p.matrix());
    let lmax = pi.eigenvalues().first().copied().unwrap_or(0.0).max(0.0);
    Ok(TracePairing {
        trace,
        is_zero_product: trace <= tol,
        product_bound: (lmax * trace.max(tol)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qm::matrix::{diagonal, ket, ketbra, max_abs_diff, real_vector};

    fn proj(d: usize, k: usize) -> ComplexMatrix {
        ketbra(&ket(d, k))
    }

    fn plus_minus() -> (ComplexMatrix, ComplexMatrix) {
        let s = 0.5f64.sqrt();
        (ketbra(&real_vector(&[s, s])), ketbra(&real_vector(&[s, -s])))
    }

    #[test]
    fn validates_projective_and_non_projective() {
        let m = GeneralizedMeasurement::from_matrices(vec![proj(2, 0), proj(2, 1)]).unwrap();
        assert!(m.is_projective(1e-10));
        let half = c(0.5, 0.0);
        let np = GeneralizedMeasurement::from_matrices(vec![proj(2, 0) * half, proj(2, 0) * half + proj(2, 1)]).unwrap();
        assert!(!np.is_projective(1e-10));
    }

    #[test]
    fn rejects_incomplete_zero_and_negative() {
        let half = c(0.5, 0.0);
        let err = GeneralizedMeasurement::from_matrices(vec![proj(2, 0), proj(2, 1) * half]).unwrap_err();
        match err {
            Error::IncompleteSum { deviation } => assert!((deviation - 0.5).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let err = GeneralizedMeasurement::from_matrices(vec![matrix::identity(2), matrix::zeros(2)]).unwrap_err();
        assert!(matches!(err, Error::ZeroElement { index: 1, .. }));
        let err = GeneralizedMeasurement::from_matrices(vec![diagonal(&[1.5, 1.0]), diagonal(&[-0.5, 0.0])]).unwrap_err();
        match err {
            Error::NotPsd { index, min_eigenvalue } => {
                assert_eq!(index, 1);
                assert!((min_eigenvalue + 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_inconsistent_kraus() {
        let ops = vec![
            HermitianOperator::new(proj(2, 0)).unwrap(),
            HermitianOperator::new(proj(2, 1)).unwrap(),
        ];
        let kraus = KrausSet::single(vec![proj(2, 1), proj(2, 0)]);
        assert!(matches!(validate_measurement(ops, Some(kraus)), Err(Error::KrausMismatch { .. })));
    }

    #[test]
    fn eigendecompose_identity_is_one_space() {
        let id = HermitianOperator::new(matrix::identity(3)).unwrap();
        let spaces = eigendecompose(&id, 1e-8);
        assert_eq!(spaces.len(), 1);
        assert_eq!(spaces[0].projector.rank(), 3);
        assert!((spaces[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigendecompose_diagonal() {
        let a = HermitianOperator::new(diagonal(&[0.25, 0.75])).unwrap();
        let spaces = eigendecompose(&a, 1e-8);
        assert_eq!(spaces.len(), 2);
        assert!((spaces[0].value - 0.75).abs() < 1e-12);
        assert!(max_abs_diff(spaces[0].projector.matrix(), &proj(2, 1)) < 1e-12);
        assert!(max_abs_diff(spaces[1].projector.matrix(), &proj(2, 0)) < 1e-12);
    }

    #[test]
    fn eigendecompose_pure_state() {
        let psi = real_vector(&[3f64.sqrt() / 2.0, 0.5]);
        let rho = HermitianOperator::new(ketbra(&psi)).unwrap();
        let spaces = eigendecompose(&rho, 1e-8);
        assert_eq!(spaces.len(), 2);
        assert!((spaces[0].value - 1.0).abs() < 1e-12);
        assert!(spaces[1].value.abs() < 1e-12);
        assert!(max_abs_diff(spaces[0].projector.matrix(), &ketbra(&psi)) < 1e-12);
        let mut recon = matrix::zeros(2);
        for s in &spaces {
            recon += s.projector.matrix() * c(s.value, 0.0);
        }
        assert!(max_abs_diff(&recon, rho.matrix()) < 1e-9);
    }

    #[test]
    fn measurement_from_states() {
        let m = measurement_from_state(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(m.len(), 1);
        assert!(max_abs_diff(m.element(0), &matrix::identity(2)) < 1e-12);

        let m = measurement_from_state(&DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap()).unwrap();
        assert_eq!(m.len(), 2);
        assert!(max_abs_diff(m.element(0), &proj(2, 0)) < 1e-12);
        assert!(max_abs_diff(m.element(1), &proj(2, 1)) < 1e-12);

        let (plus, minus) = plus_minus();
        let m = measurement_from_state(&DensityMatrix::new(plus.clone()).unwrap()).unwrap();
        assert!(max_abs_diff(m.element(0), &plus) < 1e-12);
        assert!(max_abs_diff(m.element(1), &minus) < 1e-12);
        assert!(m.kraus().is_some());
    }

    #[test]
    fn probabilities_of_reference_instances() {
        let half = c(0.5, 0.0);
        let m = GeneralizedMeasurement::from_matrices(vec![proj(2, 0) * half, proj(2, 0) * half + proj(2, 1)]).unwrap();
        let w = outcome_probabilities(&m, &DensityMatrix::new(proj(2, 0)).unwrap()).unwrap();
        assert!((w.probs()[0] - 0.5).abs() < 1e-15 && (w.probs()[1] - 0.5).abs() < 1e-15);
        assert!((w.volumes()[0] - 0.5).abs() < 1e-15 && (w.volumes()[1] - 1.5).abs() < 1e-15);

        let w = outcome_probabilities(&m, &DensityMatrix::maximally_mixed(2)).unwrap();
        for (p, v) in w.probs().iter().zip(w.volumes()) {
            assert!((p * 2.0 - v).abs() < 1e-12);
        }

        let psi = real_vector(&[3f64.sqrt() / 2.0, 0.5]);
        let z = GeneralizedMeasurement::from_matrices(vec![proj(2, 0), proj(2, 1)]).unwrap();
        let w = outcome_probabilities(&z, &DensityMatrix::pure(&psi).unwrap()).unwrap();
        assert!((w.probs()[0] - 0.75).abs() < 1e-12 && (w.probs()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn probabilities_dimension_mismatch() {
        let z = GeneralizedMeasurement::from_matrices(vec![proj(2, 0), proj(2, 1)]).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(outcome_probabilities(&z, &rho), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_with_trivial_measurement() {
        let z = GeneralizedMeasurement::projective(vec![proj(2, 0), proj(2, 1)]).unwrap();
        let triv = GeneralizedMeasurement::projective(vec![matrix::identity(2)]).unwrap();
        let comp = compose_measurements(&z, &triv).unwrap();
        assert_eq!(comp.measurement.len(), 2);
        for i in 0..2 {
            assert!(max_abs_diff(comp.measurement.element(i), z.element(i)) < 1e-15);
        }
    }

    #[test]
    fn compose_z_then_x() {
        let z = GeneralizedMeasurement::projective(vec![proj(2, 0), proj(2, 1)]).unwrap();
        let (plus, minus) = plus_minus();
        let x = GeneralizedMeasurement::projective(vec![plus, minus]).unwrap();
        let comp = compose_measurements(&z, &x).unwrap();
        assert_eq!(comp.labels, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let half = c(0.5, 0.0);
        let expected = [proj(2, 0) * half, proj(2, 0) * half, proj(2, 1) * half, proj(2, 1) * half];
        for (k, e) in expected.iter().enumerate() {
            assert!(max_abs_diff(comp.measurement.element(k), e) < 1e-15);
        }
        assert!(comp.measurement.kraus().is_some());
    }

    #[test]
    fn compose_drops_vanishing_products() {
        let z = GeneralizedMeasurement::projective(vec![proj(2, 0), proj(2, 1)]).unwrap();
        let comp = compose_measurements(&z, &z).unwrap();
        assert_eq!(comp.measurement.len(), 2);
        assert_eq!(comp.dropped, vec![(0, 1), (1, 0)]);
        assert_eq!(comp.labels, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn compose_requires_kraus() {
        let z = GeneralizedMeasurement::from_matrices(vec![proj(2, 0), proj(2, 1)]).unwrap();
        assert!(matches!(compose_measurements(&z, &z), Err(Error::MissingKraus)));
    }

    #[test]
    fn post_measurement_updates() {
        let kraus = KrausSet::single(vec![proj(2, 0), proj(2, 1)]);
        let (state, p) = post_measurement_state(&kraus, 0, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(max_abs_diff(state.matrix(), &proj(2, 0)) < 1e-15);

        let raise = outer_01();
        let kraus = KrausSet::new(vec![vec![raise], vec![proj(2, 0)]]);
        let (state, p) = post_measurement_state(&kraus, 0, &DensityMatrix::new(proj(2, 1)).unwrap()).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(max_abs_diff(state.matrix(), &proj(2, 0)) < 1e-15);

        let kraus = KrausSet::single(vec![proj(2, 0), proj(2, 1)]);
        let err = post_measurement_state(&kraus, 1, &DensityMatrix::new(proj(2, 0)).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityOutcome { outcome: 1, .. }));
    }

    fn outer_01() -> ComplexMatrix {
        matrix::outer(&ket(2, 0), &ket(2, 1))
    }

    #[test]
    fn trace_pairing_examples() {
        let pi = HermitianOperator::new(proj(2, 0)).unwrap();
        let p = Projector::new(proj(2, 1)).unwrap();
        let t = trace_pairing(&pi, &p, 1e-10).unwrap();
        assert!(t.trace.abs() < 1e-15 && t.is_zero_product);
        assert!(frobenius(&(pi.matrix() * p.matrix())) < 1e-15);

        let pi = HermitianOperator::new(proj(2, 0) * c(0.5, 0.0) + proj(2, 1)).unwrap();
        let t = trace_pairing(&pi, &Projector::new(proj(2, 0)).unwrap(), 1e-10).unwrap();
        assert!((t.trace - 0.5).abs() < 1e-15 && !t.is_zero_product);

        let pi = HermitianOperator::new(matrix::identity(3)).unwrap();
        let p = Projector::new(proj(3, 0) + proj(3, 2)).unwrap();
        let t = trace_pairing(&pi, &p, 1e-10).unwrap();
        assert!((t.trace - 2.0).abs() < 1e-15 && !t.is_zero_product);
    }
}
