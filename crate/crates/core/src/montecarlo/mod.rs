//! Seeded estimation of the probabilistic properties, with exact enumeration
//! on small discrete instances, and the Combes–Thomas verifier.

pub mod combes_thomas;
pub mod engine;
pub mod estimators;
pub mod pairs;
pub mod stats;

pub use combes_thomas::{verify_combes_thomas, CtGenerator, CtReport};
pub use engine::{Mode, ModeRequest};
pub use estimators::{
    estimate_dsk, estimate_lifshitz, estimate_s0, estimate_w1, estimate_w2, singularity_correlation,
    BoundStatus, EstimatorResult, EventName, Model, RunSpec,
};
pub use pairs::{CubePair, PairKind};
pub use stats::clopper_pearson;
