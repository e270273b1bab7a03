//! Finite-volume machinery for the two-particle lattice Anderson model.
//!
//! The crate assembles one- and two-particle Dirichlet Hamiltonians
//! `H = -Δ + V(x₁) + V(x₂) + U(x₁, x₂)` on max-norm cubes, evaluates their
//! spectra and Green functions, classifies cubes with the multi-scale
//! analysis taxonomy (resonant, completely non-resonant, singular,
//! tunnelling, interactive) and estimates the probabilities that drive the
//! induction with a seeded, schedule-independent Monte Carlo harness.
//!
//! Module map:
//!
//! * [`lattice`] – points, cubes, boundaries, symmetrized distance.
//! * [`randomfield`] – i.i.d. disorder, interaction profiles, concentration.
//! * [`operator`] – sparse Hamiltonian assembly and tensor-sum spectra.
//! * [`spectral`] – dense/iterative eigensolvers and Green functions.
//! * [`msa`] – scale schedules, cube classification, singular-cube counting.
//! * [`montecarlo`] – probability estimators and the Combes–Thomas verifier.
//! * [`decay`] – eigenfunction decay-rate fitting.
//! * [`cli`] – experiment configuration, command dispatch and replay.

pub mod cli;
pub mod decay;
mod error;
pub mod lattice;
pub mod montecarlo;
pub mod msa;
pub mod operator;
pub mod randomfield;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{Cube, ParticleKind, Point};
pub use operator::{HamiltonianMatrix, LaplacianConvention, Realization};
pub use randomfield::{DisorderSample, DistributionKind, DistributionSpec, InteractionSpec};
