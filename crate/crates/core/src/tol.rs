//! Numeric tolerances shared across the crate.
//!
//! Every threshold that decides pass/fail or a classification lives here so
//! the modules never carry ad-hoc magic numbers.

/// Default absolute tolerance for operator kind checks and norm bookkeeping.
pub const ATOL: f64 = 1e-9;

/// Residual allowed on reconstructions and eigen-relations.
pub const RESIDUAL: f64 = 1e-8;

/// Angles closer than this to 0 or π are treated as one-dimensional blocks.
pub const EIGPHASE: f64 = 1e-7;

/// Orthonormalization residual above which a decomposition is rejected.
pub const DEGENERATE: f64 = 1e-6;

/// Squared norm at or below which a state counts as the zero vector.
pub const ZERO_STATE: f64 = 1e-15;

/// Norm below which a branch is numerically zero (its phase defaults to 1).
pub const ZERO_BRANCH: f64 = 1e-12;

/// Allowed slack on a sub-normalized norm (norm² ≤ 1 + this).
pub const NORM_SLACK: f64 = 1e-9;

/// Default qubit cap for dense states: 2^20 amplitudes.
pub const DEFAULT_QUBIT_CAP: usize = 20;

/// Numeric slack on the test-round acceptance bound in ideal mode.
pub const TEST_ROUND: f64 = 1e-6;

/// Stand-in for the negligible term in the grid-averaged error bound.
pub const CLAIM1_NEGL: f64 = 0.02;

/// Stand-in for the negligible term in the sequential threshold-averaged bound.
pub const FURTHER_NEGL: f64 = 0.05;

/// Binomial standard deviations allowed between a sampled rate and its oracle.
pub const SIGMAS: f64 = 3.0;
