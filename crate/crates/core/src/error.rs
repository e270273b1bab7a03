use thiserror::Error;

use crate::lattice::{ParticleKind, Point};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operation requires a {expected} cube")]
    WrongParticleKind { expected: ParticleKind },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("disorder sample has no value at site {0}")]
    MissingSiteValue(Point),

    #[error("cube has {sites} sites, above the dense cap of {cap}")]
    DenseCapExceeded { sites: usize, cap: usize },

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    /// `H - E` is numerically singular: `E` sits on the spectrum.
    #[error("resonance at E = {energy}: pivot {pivot:e} below threshold")]
    Resonance { energy: f64, pivot: f64 },

    #[error("mass schedule invalid: factor {factor} at scale index {index} is not positive")]
    ScheduleInvalid { index: usize, factor: f64 },

    #[error("scale too small: mass factor {factor} is not positive (increase L)")]
    ScaleTooSmall { factor: f64 },

    #[error("length schedule overflows at scale index {0}")]
    Overflow(usize),

    #[error("only {0} usable shells, need at least 3")]
    TooFewShells(usize),

    #[error("no closed-form concentration for this distribution")]
    AnalyticUnavailable,

    #[error("cannot construct cube pair: {0}")]
    Unconstructible(String),

    #[error("config: {0}")]
    Config(String),

    #[error("replay mismatch in {0}")]
    ReplayMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
