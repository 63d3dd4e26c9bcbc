//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by evaluators, simulators and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The request would exceed a combinatorial or memory guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The request is valid in principle but not covered by this implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A stochastic run did not reach its stopping rule.
    #[error("truncated after {steps} steps (sample {sample}): {reason}")]
    Truncation {
        sample: u64,
        steps: u64,
        reason: String,
    },
    /// A discretization step is too coarse for the configuration.
    #[error("refinement needed: {0}")]
    Refinement(String),
    /// A q-number or Gamma factor hits a pole or zero at this kappa.
    #[error("resonance: {0}")]
    Resonance(String),
    /// A numerical procedure did not reach the requested tolerance.
    #[error("tolerance not reached: {0}")]
    Tolerance(String),
    /// An internal invariant of a traced object was violated.
    #[error("consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
