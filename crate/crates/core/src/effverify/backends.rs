use rand::RngCore;
use sha2::{Digest, Sha256};

use super::machine::Program;
use super::EffError;
use crate::protocol::{decode_exact, encode_fields, mix64, RandomOracle, Verdict};

/// Machine words touched when processing `n` bytes; the unit of every cost
/// counter.
pub fn words(n: usize) -> u64 {
    n.div_ceil(8) as u64
}

fn bits(t: u64) -> u64 {
    u64::from(64 - t.leading_zeros())
}

fn sha(parts: &[&[u8]]) -> Vec<u8> {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_be_bytes());
        h.update(p);
    }
    h.finalize().to_vec()
}

pub trait Prg: Send + Sync {
    fn expand(&self, seed: &[u8], len: usize, ops: &mut u64) -> Result<Vec<u8>, EffError>;
}

/// A deterministic function of a byte string, as evaluated under FHE.
pub trait Circuit {
    fn eval(&self, input: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
}

pub trait Fhe: Send + Sync {
    fn keygen(&self, rng: &mut dyn RngCore, ops: &mut u64) -> (Vec<u8>, Vec<u8>);
    fn enc(&self, pk: &[u8], msg: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
    fn eval(&self, pk: &[u8], circuit: &dyn Circuit, ct: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
    fn dec(&self, sk: &[u8], ct: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
}

pub trait RandomizedEncoding: Send + Sync {
    fn setup(&self, security: usize, ell: usize, crs: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
    fn enc(&self, ek: &[u8], machine: &Program, input: &[u64], time_bound: u64, ops: &mut u64)
        -> Result<Vec<u8>, EffError>;
    fn dec(&self, crs: &[u8], encoding: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError>;
}

pub trait Snark: Send + Sync {
    fn prove(&self, oracle: &mut dyn RandomOracle, statement: &[u8], witness: &[u8], ops: &mut u64) -> Vec<u8>;
    /// `time_bound` is the running time of the relation being argued about,
    /// which sets the verifier's simulated cost.
    fn verify(
        &self,
        oracle: &mut dyn RandomOracle,
        statement: &[u8],
        proof: &[u8],
        time_bound: u64,
        ops: &mut u64,
    ) -> Verdict;
    /// Witness carried by a well-formed proof.
    fn extract(&self, proof: &[u8]) -> Option<Vec<u8>>;
}

pub struct BackendSuite {
    pub name: String,
    pub prg: Box<dyn Prg>,
    pub fhe: Box<dyn Fhe>,
    pub re: Box<dyn RandomizedEncoding>,
    pub snark: Box<dyn Snark>,
}

impl BackendSuite {
    /// Functionally correct, deliberately insecure reference backends.
    pub fn stub() -> Self {
        Self {
            name: "stub".into(),
            prg: Box::new(MixPrg),
            fhe: Box::new(TransparentFhe),
            re: Box::new(BundleRe),
            snark: Box::new(BindingSnark { polylog_weight: 16 }),
        }
    }
}

/// Word `i` of the output is `mix64(s₀ ⊕ mix64(s₁ ⊕ i))` for the two seed
/// words `s₀, s₁`.
#[derive(Debug, Clone, Copy)]
pub struct MixPrg;

impl MixPrg {
    pub fn seed_words(seed: &[u8]) -> Result<[u64; 2], EffError> {
        if seed.len() != 16 {
            return Err(EffError::BackendFailure(format!("PRG seed must be 16 bytes, got {}", seed.len())));
        }
        Ok([u64::from_be_bytes(seed[..8].try_into().unwrap()), u64::from_be_bytes(seed[8..].try_into().unwrap())])
    }

    pub fn word(s: [u64; 2], i: u64) -> u64 {
        mix64(s[0] ^ mix64(s[1] ^ i))
    }
}

impl Prg for MixPrg {
    fn expand(&self, seed: &[u8], len: usize, ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let s = Self::seed_words(seed)?;
        let n = words(len);
        *ops += n;
        let mut out: Vec<u8> = (0..n).flat_map(|i| Self::word(s, i).to_be_bytes()).collect();
        out.truncate(len);
        Ok(out)
    }
}

const PK_TAG: &[u8] = b"INSECURE-STUB:pk:";
const SK_TAG: &[u8] = b"INSECURE-STUB:sk:";
const CT_TAG: &[u8] = b"INSECURE-STUB:ct:";

/// Ciphertexts are the plaintext tagged with the key id; `eval` runs the
/// circuit in the clear. Keys and ciphertexts carry an `INSECURE-STUB` marker
/// and are refused without it.
#[derive(Debug, Clone, Copy)]
pub struct TransparentFhe;

impl TransparentFhe {
    fn key_id<'a>(key: &'a [u8], tag: &[u8]) -> Result<&'a [u8], EffError> {
        match key.strip_prefix(tag) {
            Some(id) if id.len() == 8 => Ok(id),
            _ => Err(EffError::BackendFailure("not a stub FHE key".into())),
        }
    }

    fn open<'a>(id: &[u8], ct: &'a [u8]) -> Result<&'a [u8], EffError> {
        let body = ct.strip_prefix(CT_TAG).ok_or_else(|| EffError::BackendFailure("not a stub ciphertext".into()))?;
        match body.strip_prefix(id) {
            Some(msg) => Ok(msg),
            None => Err(EffError::BackendFailure("ciphertext under another key".into())),
        }
    }

    fn seal(id: &[u8], msg: &[u8]) -> Vec<u8> {
        [CT_TAG, id, msg].concat()
    }
}

impl Fhe for TransparentFhe {
    fn keygen(&self, rng: &mut dyn RngCore, ops: &mut u64) -> (Vec<u8>, Vec<u8>) {
        let mut id = [0u8; 8];
        rng.fill_bytes(&mut id);
        *ops += 1;
        ([PK_TAG, &id].concat(), [SK_TAG, &id].concat())
    }

    fn enc(&self, pk: &[u8], msg: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let id = Self::key_id(pk, PK_TAG)?;
        *ops += words(msg.len()) + 1;
        Ok(Self::seal(id, msg))
    }

    fn eval(&self, pk: &[u8], circuit: &dyn Circuit, ct: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let id = Self::key_id(pk, PK_TAG)?;
        let out = circuit.eval(Self::open(id, ct)?, ops)?;
        Ok(Self::seal(id, &out))
    }

    fn dec(&self, sk: &[u8], ct: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let id = Self::key_id(sk, SK_TAG)?;
        let msg = Self::open(id, ct)?;
        *ops += words(msg.len()) + 1;
        Ok(msg.to_vec())
    }
}

/// Encoding = `(ek, machine, input, time bound)` in the clear; `ek` commits to
/// the crs and the parameters, and decoding runs the machine under the bound.
#[derive(Debug, Clone, Copy)]
pub struct BundleRe;

impl BundleRe {
    fn ek_for(security: usize, ell: usize, crs: &[u8]) -> Vec<u8> {
        let mut ek = sha(&[b"re-ek", crs, &(security as u64).to_be_bytes(), &(ell as u64).to_be_bytes()]);
        ek.extend_from_slice(&(security as u16).to_be_bytes());
        ek.extend_from_slice(&(ell as u64).to_be_bytes());
        ek
    }

    fn ek_params(ek: &[u8]) -> Result<(usize, usize), EffError> {
        if ek.len() != 42 {
            return Err(EffError::BackendFailure("malformed encoding key".into()));
        }
        Ok((
            u16::from_be_bytes(ek[32..34].try_into().unwrap()) as usize,
            u64::from_be_bytes(ek[34..].try_into().unwrap()) as usize,
        ))
    }
}

impl RandomizedEncoding for BundleRe {
    fn setup(&self, security: usize, ell: usize, crs: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        if ell == 0 || security == 0 || security > u16::MAX as usize {
            return Err(EffError::BackendFailure("encoding setup needs ell >= 1 and 1 <= security < 2^16".into()));
        }
        *ops += words(crs.len()) + 2;
        Ok(Self::ek_for(security, ell, crs))
    }

    fn enc(
        &self,
        ek: &[u8],
        machine: &Program,
        input: &[u64],
        time_bound: u64,
        ops: &mut u64,
    ) -> Result<Vec<u8>, EffError> {
        Self::ek_params(ek)?;
        let inp: Vec<u8> = input.iter().flat_map(|w| w.to_be_bytes()).collect();
        // the time bound is written, never run: log T of work
        *ops += machine.len() as u64 + input.len() as u64 + bits(time_bound);
        Ok(encode_fields(&[ek.to_vec(), machine.to_bytes(), inp, time_bound.to_be_bytes().to_vec()]))
    }

    fn dec(&self, crs: &[u8], encoding: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let f = decode_exact(encoding, 4).map_err(|e| EffError::BackendFailure(e.to_string()))?;
        let (security, ell) = Self::ek_params(&f[0])?;
        if Self::ek_for(security, ell, crs) != f[0] {
            return Err(EffError::BackendFailure("encoding was made for another crs".into()));
        }
        let machine = Program::from_bytes(&f[1])?;
        if f[2].len() % 8 != 0 || f[3].len() != 8 {
            return Err(EffError::BackendFailure("malformed encoding".into()));
        }
        let input: Vec<u64> = f[2].chunks(8).map(|c| u64::from_be_bytes(c.try_into().unwrap())).collect();
        let bound = u64::from_be_bytes(f[3].as_slice().try_into().unwrap());
        let run = machine.run(&input, bound)?;
        *ops += run.steps;
        if run.output.len() > ell {
            return Err(EffError::BackendFailure(format!("output of {} bytes exceeds ell = {ell}", run.output.len())));
        }
        Ok(run.output)
    }
}

/// Proof = `(H(statement), SHA-256(witness), witness)` under whatever oracle
/// it is handed. It binds the statement and the oracle but checks no
/// relation: it is not sound. Verification is charged
/// `polylog_weight · bits(T)²` to stand in for a succinct verifier.
#[derive(Debug, Clone, Copy)]
pub struct BindingSnark {
    pub polylog_weight: u64,
}

impl Snark for BindingSnark {
    fn prove(&self, oracle: &mut dyn RandomOracle, statement: &[u8], witness: &[u8], ops: &mut u64) -> Vec<u8> {
        *ops += words(statement.len()) + 2 * words(witness.len());
        let binding = oracle.query(statement);
        encode_fields(&[binding, sha(&[witness]), witness.to_vec()])
    }

    fn verify(
        &self,
        oracle: &mut dyn RandomOracle,
        statement: &[u8],
        proof: &[u8],
        time_bound: u64,
        ops: &mut u64,
    ) -> Verdict {
        *ops += words(statement.len()) + self.polylog_weight * bits(time_bound).pow(2);
        let Ok(f) = decode_exact(proof, 3) else {
            return Verdict::Reject;
        };
        *ops += words(f[2].len());
        Verdict::from_bool(oracle.query(statement) == f[0] && sha(&[&f[2]]) == f[1])
    }

    fn extract(&self, proof: &[u8]) -> Option<Vec<u8>> {
        decode_exact(proof, 3).ok().map(|mut f| f.swap_remove(2))
    }
}
