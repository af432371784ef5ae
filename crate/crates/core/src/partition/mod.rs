//! Phase-estimation partition of a cheating prover's state.
//!
//! For coordinate `i` and threshold `γ`, [`PartitionContext::run_g`]
//! splits a state `|ψ⟩` over `(X, Z)` into a part that fails the test round
//! on coordinate `i` (`ψ₀`), a part from which an accepted answer can be
//! extracted (`ψ₁`), and the leftover `ψ_err`. [`SequentialPartition`]
//! chains this over all coordinates and [`extract_with`] is the alternating
//! measurement extractor.
//!
//! Phase estimation is spectral: `Q` is diagonalised once and the estimator
//! acts on each eigenvector's `ph` register. The fast path works directly in
//! the `C = 0` sector from the Jordan blocks; the materialised path runs the
//! four steps on the full `(C, X, Z, ph, th, in)` register set.

mod claims;
mod estimate;
mod extract;
mod further;
mod params;
mod procedure;
mod strategy;

pub use claims::{
    cauchy_schwarz_slack, claim1_grid_average, claim3_average, claim4_max_acceptance, further_claim3_average,
    further_claim4_average, ClaimRow,
};
pub use estimate::{
    ideal_label, kernel_amplitude, kernel_weight, label_phase, phase_estimate, phase_estimate_inverse, th_bit,
    Estimator, Spectrum,
};
pub use extract::{ext_success_formula, extract_with, synthetic_block, ExtractOutcome, SyntheticBlock};
pub use further::{FurtherOutcome, HOutcome, SequentialPartition};
pub use params::{gamma_grid, EstimationMode, PartitionParams, DEFAULT_N_FAIL};
pub use procedure::{run_g, PartitionContext, PartitionOutcome};
pub use strategy::{build_projectors, ProverStrategy, StrategyLayout};

use thiserror::Error;

use crate::jordan::JordanError;
use crate::qsim::QsimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("missing register `{0}`")]
    MissingRegister(String),
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("the prover unitary must be block diagonal in the challenge register")]
    NotClassicallyControlled,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("branch has zero norm")]
    ZeroState,
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Jordan(#[from] JordanError),
}
