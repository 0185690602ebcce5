//! Finite-dimensional operator algebra: Hermitian operators, states,
//! projectors, subspaces and generalized measurements.

pub mod matrix;
pub mod measurement;
pub mod operator;

pub use matrix::{ComplexMatrix, ComplexVector};
pub use measurement::{
    compose_measurements, compose_measurements_with, eigendecompose, measurement_from_operator,
    measurement_from_state, outcome_probabilities, post_measurement_state, trace_pairing,
    validate_measurement, validate_measurement_with, Composition, Eigenspace, GeneralizedMeasurement,
    KrausSet, TracePairing,
};
pub use operator::{DensityMatrix, HermitianOperator, Projector, Subspace, Tolerances};
