//! Deterministic black-box PIT for circuits of small product depth.

pub mod acircuit;
pub mod biwa;
pub mod nonassoc;
pub mod setmult;
pub mod weights;

pub use acircuit::{gen_random_acircuit, ACircuit, AGate};
pub use biwa::{
    biwa_candidates, hitting_set_unambiguous, CoefficientTable, substitute_univariate, verify_biwa, Candidate, ClassParams, HittingSet,
};
pub use nonassoc::{blackbox_pit_det, hitting_set_nonassoc, DetOutcome, HittingOptions, NonassocHittingSet};
pub use setmult::set_multilinearize;
pub use weights::{kronecker_family, weight_family, weight_family_names, WeightAssignment, WeightFamily};
