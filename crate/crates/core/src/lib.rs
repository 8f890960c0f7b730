//! Simulation and segmentation of measurement outcome sequences from small
//! quantum systems.
//!
//! The crate has five parts:
//!
//! - [`qmath`]: dense complex linear algebra for d <= 4 Hilbert spaces,
//!   Hermitian observables with cached spectral decompositions, density
//!   matrices, and Born-rule outcome distributions.
//! - [`infodiv`]: Shannon entropy, Kullback-Leibler divergence, and the
//!   weighted Jensen-Shannon divergence (two- and m-distribution forms),
//!   all in nats.
//! - [`seqgen`]: seeded generation of outcome sequences from an observable
//!   program measured against a piecewise-constant state schedule, plus a
//!   line-oriented text format for them.
//! - [`segment`]: the cursor scan that turns a sequence into per-observable
//!   JSD curves and a changing-index estimate, with a recursive extension
//!   for multiple changepoints.
//! - [`scenarios`]: the catalog of one- and two-qubit experiments with
//!   derived ground truth about which observables distinguish the states.
//!
//! Numeric kernels are generic over the [`Scalar`] floating-point type;
//! the crate root exposes `f64` aliases for the common case.

pub mod error;
pub mod infodiv;
pub mod qmath;
pub mod scenarios;
pub mod segment;
pub mod seqgen;

mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` complex matrix.
pub type Matrix64 = qmath::ComplexMatrix<f64>;
/// `f64` Hermitian observable.
pub type Observable64 = qmath::HermitianObservable<f64>;
/// `f64` density matrix.
pub type State64 = qmath::QuantumState<f64>;
/// `f64` probability distribution.
pub type ProbDist64 = infodiv::ProbDist<f64>;
/// `f64` weight pair.
pub type WeightPair64 = infodiv::WeightPair<f64>;
/// `f64` observable program.
pub type Program64 = seqgen::ObservableProgram<f64>;
/// `f64` state schedule.
pub type Schedule64 = seqgen::StateSchedule<f64>;
/// `f64` catalog view (labels and outcome alphabets).
pub type OutcomeCatalog64 = seqgen::OutcomeCatalog<f64>;
/// `f64` divergence profile.
pub type JsdProfile64 = segment::JsdProfile<f64>;
/// `f64` segmentation result.
pub type SegmentationResult64 = segment::SegmentationResult<f64>;
/// `f64` scenario.
pub type Scenario64 = scenarios::Scenario<f64>;
