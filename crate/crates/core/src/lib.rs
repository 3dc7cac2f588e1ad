//! Key properties of finite irreducible Markov chains — the stationary
//! distribution, the group inverse of `I - P`, and the matrix of mean first
//! passage times — computed by rank-one row-perturbation sweeps that start
//! from the uniform chain and swap in one row of the target matrix at a
//! time.
//!
//! Six sweep variants are provided ([`algorithms::AlgorithmId`]), together
//! with a GTH state-reduction benchmark solver, generalized-inverse algebra
//! for deriving any of the three properties from any one-condition
//! g-inverse of `I - P`, standalone rank-one update kernels, and the error
//! statistics used to grade runs against each other and across precisions.
//! Every numerical routine is generic over [`precision::Scalar`], so whole
//! pipelines run end to end in either binary32 or binary64.

pub mod algorithms;
pub mod chain;
pub mod error;
pub mod ginverse;
pub mod gth;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod perturb;
pub mod precision;

pub use algorithms::{run_algorithm, run_all, AlgorithmId, AlgorithmResult, RunSummary};
pub use chain::{PerturbationRow, ProbabilityVector, StochasticMatrix};
pub use error::{Error, Result};
pub use gth::gth_stationary;
pub use matrix::Mat;
pub use precision::{PrecisionMode, Scalar};
