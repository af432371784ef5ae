//! Desk-scale numerics for interactive proofs with quantum provers and classical verifiers.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`]: dense statevectors over named registers.
//! * [`jordan`]: the two-projector decomposition into 2-D rotation blocks
//!   and 1-D invariant lines.
//! * [`partition`]: the phase-estimation partition procedure, its sequential
//!   version, the alternating-measurement extractor and numeric checks of
//!   their claims.
//! * [`protocol`]: a four-round public-coin protocol interface, a toy
//!   claw-based instance, parallel repetition, Fiat-Shamir over a
//!   lazily-sampled oracle, and scripted adversaries.
//! * [`effverify`]: the delegated-verifier composition over stub PRG, FHE,
//!   randomized-encoding and SNARK backends with cost accounting.
//! * [`cli`]: experiment configs, runners and report rendering used by the
//!   `cvqc-lab` binary.
//!
//! Runnable examples live in `examples/`:
//!
//! ```text
//! cargo run --example statevector
//! cargo run --example jordan_blocks
//! cargo run --example partition_claims
//! cargo run --example sequential_partition
//! cargo run --example extractor
//! cargo run --example repetition_sweep
//! cargo run --example fs_grinding
//! cargo run --example delegated_verifier
//! cargo run --example experiment_harness
//! ```

// links the system LAPACK used by `linalg`
extern crate lapack_src;

pub mod cli;
pub mod effverify;
pub mod jordan;
pub mod linalg;
pub mod partition;
pub mod protocol;
pub mod qsim;
pub mod tol;

pub use num_complex::Complex64;
