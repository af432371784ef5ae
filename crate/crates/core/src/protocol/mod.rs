//! Four-round public-coin protocols `V1 → P2 → V3 → P4 → V_out`, a toy
//! claw-based instance, parallel repetition, Fiat-Shamir over a lazily
//! sampled oracle, and scripted adversaries.
//!
//! Messages are opaque byte strings so combinators can nest freely.
//! Challenges are one byte per bit.

use rand::RngCore;
use thiserror::Error;

use crate::partition::PartitionError;

mod fs;
mod oracle;
mod repeat;
mod run;
mod toy;
mod transcript;

pub use fs::{fiat_shamir, FiatShamir};
pub use oracle::{leading_bits, OracleTable, RandomOracle, ReprogrammedOracle};
pub use repeat::{parallel_repeat, ParallelRepeat};
pub use run::{
    grinding_success, run_protocol, run_session, trial_rng, AdversaryStrategy, ChallengeSource, RoundTally, SessionRecord,
    SessionRunner, Stats,
};
pub use toy::{mix64, toy_protocol, ToyProtocol};
pub use transcript::{decode_exact, decode_fields, encode_fields, Instance, Transcript, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("requested {requested} qubits, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("width mismatch: expected {expected} bits, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("oracle entry programmed after the first query")]
    OracleConflict,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// What a scripted cheater does on one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateMove {
    /// Valid test-round answer; wrong-format Hadamard answer.
    TestOnly,
    /// Answer derived from a measured outcome. `accepted` says whether the
    /// outcome lies in the strategy's accepting set.
    Measured { value: usize, accepted: bool },
}

pub trait FourRoundProtocol: Send + Sync {
    /// Bits sent by `v3`.
    fn challenge_bits(&self) -> usize;

    /// Independently verified coordinates; 1 for a base protocol.
    fn coordinates(&self) -> usize;

    /// `(k, td)`.
    fn v1(&self, x: &Instance, rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError>;

    /// Honest commitment `(y, prover_state)`.
    fn p2(&self, x: &Instance, k: &[u8], rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError>;

    /// Public coin: uniform challenge bits, nothing else consulted.
    fn v3(&self, rng: &mut dyn RngCore) -> Vec<u8> {
        let n = self.challenge_bits();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = rng.next_u64();
            out.extend((0..64.min(n - out.len())).map(|k| ((w >> k) & 1) as u8));
        }
        out
    }

    /// Honest answer.
    fn p4(&self, st: &[u8], c: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>, ProtocolError>;

    /// Scripted answer, one move per coordinate.
    fn p4_scripted(&self, st: &[u8], c: &[u8], moves: &[CoordinateMove]) -> Result<Vec<u8>, ProtocolError>;

    #[allow(clippy::too_many_arguments)]
    fn v_out_coordinates(
        &self,
        x: &Instance,
        k: &[u8],
        td: &[u8],
        y: &[u8],
        c: &[u8],
        a: &[u8],
    ) -> Result<Vec<Verdict>, ProtocolError>;

    fn v_out(&self, x: &Instance, k: &[u8], td: &[u8], y: &[u8], c: &[u8], a: &[u8]) -> Result<Verdict, ProtocolError> {
        let v = self.v_out_coordinates(x, k, td, y, c, a)?;
        Ok(Verdict::from_bool(v.iter().all(|v| v.is_accept())))
    }

    /// Test-round check without the trapdoor.
    fn public_test_verify(&self, x: &Instance, k: &[u8], y: &[u8], a: &[u8]) -> Result<Verdict, ProtocolError>;
}

pub(crate) fn check_challenge(c: &[u8], bits: usize) -> Result<(), ProtocolError> {
    if c.len() != bits {
        return Err(ProtocolError::WidthMismatch { expected: bits, found: c.len() });
    }
    if c.iter().any(|&b| b > 1) {
        return Err(ProtocolError::Malformed("challenge bits must be 0 or 1".into()));
    }
    Ok(())
}
