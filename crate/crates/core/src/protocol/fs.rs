use std::collections::HashSet;

use rand::RngCore;

use super::{
    encode_fields, leading_bits, AdversaryStrategy, FourRoundProtocol, Instance, OracleTable, ProtocolError,
    RandomOracle, SessionRecord, SessionRunner, Transcript, Verdict,
};

/// `(y, st, c)` of the commitment a grinder settles on.
type Ground = (Vec<u8>, Vec<u8>, Vec<u8>);

/// Two-round version of `P`: the prover sets `c = H(y)` and sends `(y, a)`;
/// the verifier recomputes `c` from `y`.
#[derive(Debug, Clone)]
pub struct FiatShamir<P> {
    inner: P,
    oracle: OracleTable,
}

pub fn fiat_shamir<P: FourRoundProtocol>(inner: P, oracle: OracleTable) -> Result<FiatShamir<P>, ProtocolError> {
    if oracle.output_bits() != inner.challenge_bits() {
        return Err(ProtocolError::WidthMismatch { expected: inner.challenge_bits(), found: oracle.output_bits() });
    }
    Ok(FiatShamir { inner, oracle })
}

impl<P: FourRoundProtocol> FiatShamir<P> {
    pub fn inner(&self) -> &P {
        &self.inner
    }

    /// A fresh copy of the oracle; every copy is the same function.
    pub fn oracle(&self) -> OracleTable {
        self.oracle.clone()
    }

    pub fn challenge<O: RandomOracle + ?Sized>(&self, oracle: &mut O, y: &[u8]) -> Vec<u8> {
        leading_bits(&oracle.query(&encode_fields(&[y])), self.inner.challenge_bits())
    }

    /// The prover's single message `(y, a)`.
    pub fn prove<O: RandomOracle + ?Sized>(
        &self,
        adv: &AdversaryStrategy,
        x: &Instance,
        k: &[u8],
        oracle: &mut O,
        rng: &mut dyn RngCore,
    ) -> Result<(Vec<u8>, Vec<u8>), ProtocolError> {
        let (y, st, c) = match adv {
            AdversaryStrategy::FsGrinder { query_budget, .. } => self.grind(*query_budget, x, k, oracle, rng)?,
            _ => {
                let (y, st) = self.inner.p2(x, k, rng)?;
                let c = self.challenge(oracle, &y);
                (y, st, c)
            }
        };
        let a = adv.answer(&self.inner, &st, &c, rng)?;
        Ok((y, a))
    }

    // commits afresh until the challenge is all zero or the budget of
    // distinct commitments runs out
    fn grind<O: RandomOracle + ?Sized>(
        &self,
        budget: usize,
        x: &Instance,
        k: &[u8],
        oracle: &mut O,
        rng: &mut dyn RngCore,
    ) -> Result<Ground, ProtocolError> {
        if budget == 0 {
            return Err(ProtocolError::InvalidParams("grinder budget must be at least 1".into()));
        }
        let mut seen = HashSet::new();
        let mut last = None;
        let mut attempts = 0;
        while seen.len() < budget && attempts < 8 * budget + 64 {
            attempts += 1;
            let (y, st) = self.inner.p2(x, k, rng)?;
            if !seen.insert(y.clone()) {
                continue;
            }
            let c = self.challenge(oracle, &y);
            let hit = c.iter().all(|&b| b == 0);
            last = Some((y, st, c));
            if hit {
                break;
            }
        }
        Ok(last.expect("at least one commitment"))
    }

    /// Returns the recomputed challenge and per-coordinate verdicts.
    #[allow(clippy::too_many_arguments)]
    pub fn verify<O: RandomOracle + ?Sized>(
        &self,
        x: &Instance,
        k: &[u8],
        td: &[u8],
        y: &[u8],
        a: &[u8],
        oracle: &mut O,
    ) -> Result<(Vec<u8>, Vec<Verdict>), ProtocolError> {
        let c = self.challenge(oracle, y);
        let v = self.inner.v_out_coordinates(x, k, td, y, &c, a)?;
        Ok((c, v))
    }
}

impl<P: FourRoundProtocol> SessionRunner for FiatShamir<P> {
    fn run_one(&self, adv: &AdversaryStrategy, x: &Instance, rng: &mut dyn RngCore) -> Result<SessionRecord, ProtocolError> {
        let mut oracle = self.oracle();
        let (k, td) = self.inner.v1(x, rng)?;
        let (y, a) = self.prove(adv, x, &k, &mut oracle, rng)?;
        let (c, coordinates) = self.verify(x, &k, &td, &y, &a, &mut oracle)?;
        let verdict = Verdict::from_bool(coordinates.iter().all(|v| v.is_accept()));
        Ok(SessionRecord {
            transcript: Transcript { x: *x, k, y, c, a, verdict },
            coordinates,
            queries: oracle.query_count(),
        })
    }
}
