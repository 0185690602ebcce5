//! Generalized quantum measurements, observational entropy and the
//! coarser-measurement relation, with linear-programming certificates and
//! randomized checks of the information inequalities that follow from it.

pub mod coarse;
pub mod error;
pub mod info;
pub mod io;
pub mod qm;
pub mod region;
pub mod verify;

pub use coarse::{
    check_coarser, check_coarser_classical, check_coarser_in_subspace, check_coarser_projective, coarsen,
    possible_outcomes, restrict_transition_matrix, thm2_equality_condition, CoarsenessCertificate, OutcomeSet,
    Partition, StochasticMatrix, Verdict,
};
pub use error::{Error, Result};
pub use info::{
    kl_divergence, measurement_state_joint, mutual_information, observational_entropy, push_forward, s_obs,
    s_obs_classical, von_neumann_entropy, EntropyReport, JointDistribution, WeightedDistribution,
};
pub use qm::{
    compose_measurements, outcome_probabilities, post_measurement_state, ComplexMatrix, ComplexVector, DensityMatrix,
    GeneralizedMeasurement, HermitianOperator, KrausSet, Projector, Subspace,
};
pub use verify::{run_suite, SuiteReport};
