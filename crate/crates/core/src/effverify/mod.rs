//! Delegated verification: the verifier hands key generation to the prover
//! through a randomized encoding, has the prover evaluate the inner verdict
//! under FHE, and checks a SNARK for the evaluation under a salted oracle.
//!
//! The backends in [`BackendSuite::stub`] are functionally correct and
//! insecure on purpose. Costs are tallied in machine words per party.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::protocol::{encode_fields, Instance, OracleTable, ProtocolError, RandomOracle, Verdict};

mod backends;
mod inner;
mod machine;

pub use backends::{
    words, BackendSuite, BindingSnark, BundleRe, Circuit, Fhe, MixPrg, Prg, RandomizedEncoding, Snark, TransparentFhe,
};
pub use inner::{DelegatedInner, VerificationCircuit};
pub use machine::{Execution, Instr, Program, REGISTERS};

/// Security parameter in bytes.
pub const N_SEC: usize = 16;
/// `ℓ_s`: PRG seed length in bytes.
pub const SEED_LEN: usize = 16;
/// Salt length `2·n_sec` in bytes.
pub const SALT_LEN: usize = 2 * N_SEC;
/// Public seed of the SNARK oracle `H`.
pub const SNARK_ORACLE_SEED: u64 = 0x48;
/// Public seed of the salt oracle `H′` used by the two-round variant.
pub const SALT_ORACLE_SEED: u64 = 0x4827;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EffError {
    #[error("backend failure: {0}")]
    BackendFailure(String),
    #[error("inner protocol error: {0}")]
    InnerProtocol(String),
    #[error("session is incomplete")]
    IncompleteSession,
}

impl From<ProtocolError> for EffError {
    fn from(e: ProtocolError) -> Self {
        EffError::InnerProtocol(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffProver {
    Honest,
    /// Flips a byte of the inner response `e`, then follows the protocol.
    CorruptResponse,
    /// Sends `ct′ = Enc(0)` with a proof made for the honest `ct′`.
    MismatchedProof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub verifier_ops: u64,
    pub prover_ops: u64,
    pub message_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffSession {
    pub x: Instance,
    pub s: Vec<u8>,
    pub pk_fhe: Vec<u8>,
    pub sk_fhe: Vec<u8>,
    pub ct: Vec<u8>,
    pub encoding: Vec<u8>,
    pub salt: Vec<u8>,
    pub ct_prime: Vec<u8>,
    pub proof: Vec<u8>,
    /// `T′`, the exact running time of the encoded machine.
    pub time_bound: u64,
    /// `ℓ`, the exact key length.
    pub ell: usize,
    pub verdict: Option<Verdict>,
    pub costs: CostReport,
}

impl EffSession {
    pub fn statement(&self) -> Vec<u8> {
        statement(&self.x, &self.pk_fhe, &self.ct, &self.ct_prime)
    }

    /// Session dump with every message hex-encoded.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "x": self.x,
            "s": hex::encode(&self.s),
            "pk_fhe": hex::encode(&self.pk_fhe),
            "sk_fhe": hex::encode(&self.sk_fhe),
            "ct": hex::encode(&self.ct),
            "encoding": hex::encode(&self.encoding),
            "salt": hex::encode(&self.salt),
            "ct_prime": hex::encode(&self.ct_prime),
            "proof": hex::encode(&self.proof),
            "time_bound": self.time_bound,
            "ell": self.ell,
            "verdict": self.verdict,
            "costs": self.costs,
        }))
        .expect("session dumps serialize")
    }
}

/// The SNARK statement `(x, pk_fhe, ct, ct′)`.
pub fn statement(x: &Instance, pk: &[u8], ct: &[u8], ct_prime: &[u8]) -> Vec<u8> {
    encode_fields(&[x.to_bytes().as_slice(), pk, ct, ct_prime])
}

pub fn snark_oracle() -> OracleTable {
    OracleTable::new(SNARK_ORACLE_SEED, 8 * N_SEC * 2).expect("nonzero width")
}

/// `z = H′(ct′)`.
pub fn derive_salt(ct_prime: &[u8], ops: &mut u64) -> Vec<u8> {
    *ops += words(ct_prime.len());
    OracleTable::new(SALT_ORACLE_SEED, 8 * SALT_LEN).expect("nonzero width").query(ct_prime)
}

/// `(crs_P, crs_V) = (crs_re, ek_re)`.
pub fn setup_eff(
    suite: &BackendSuite,
    security: usize,
    ell: usize,
    rng: &mut dyn RngCore,
) -> Result<(Vec<u8>, Vec<u8>), EffError> {
    let mut crs = vec![0u8; 32];
    rng.fill_bytes(&mut crs);
    let ek = suite.re.setup(security, ell, &crs, &mut 0)?;
    Ok((crs, ek))
}

/// `V_eff,out`: the SNARK verifies under `H(z, ·)` and `ct′` decrypts to 1.
#[allow(clippy::too_many_arguments)]
pub fn v_eff_out(
    suite: &BackendSuite,
    x: &Instance,
    pk: &[u8],
    sk: &[u8],
    ct: &[u8],
    ct_prime: &[u8],
    salt: &[u8],
    proof: &[u8],
    time_bound: u64,
    ops: &mut u64,
) -> Verdict {
    let st = statement(x, pk, ct, ct_prime);
    let proof_ok = suite.snark.verify(&mut snark_oracle().with_salt(salt), &st, proof, time_bound, ops).is_accept();
    let bit_ok = matches!(suite.fhe.dec(sk, ct_prime, ops).as_deref(), Ok([1]));
    Verdict::from_bool(proof_ok && bit_ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SaltMode {
    Fresh,
    Derived,
}

fn run(
    suite: &BackendSuite,
    inner: &DelegatedInner,
    x: &Instance,
    prover: EffProver,
    seed: u64,
    mode: SaltMode,
) -> Result<(Verdict, EffSession), EffError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut v, mut p, mut bytes) = (0u64, 0u64, 0usize);
    let ell = inner.key_len();
    let (crs, ek) = setup_eff(suite, N_SEC, ell, &mut rng)?;

    // V_eff,1
    let mut s = vec![0u8; SEED_LEN];
    rng.fill_bytes(&mut s);
    v += words(SEED_LEN);
    let (pk, sk) = suite.fhe.keygen(&mut rng, &mut v);
    let ct = suite.fhe.enc(&pk, &s, &mut v)?;
    let t_prime = inner.machine_steps();
    let encoding = suite.re.enc(&ek, &inner.machine(), &DelegatedInner::machine_input(x, &s)?, t_prime, &mut v)?;
    bytes += encoding.len() + pk.len() + ct.len();

    // P_eff,2
    let k = suite.re.dec(&crs, &encoding, &mut p)?;
    let mut e = inner.prove(x, &k, &mut rng, &mut p)?;
    if prover == EffProver::CorruptResponse {
        *e.last_mut().expect("responses are nonempty") ^= 1;
    }
    let circuit = VerificationCircuit { inner, prg: suite.prg.as_ref(), x: *x, e: e.clone() };
    let honest_ct = suite.fhe.eval(&pk, &circuit, &ct, &mut p)?;
    let ct_prime = match prover {
        EffProver::MismatchedProof => suite.fhe.enc(&pk, &[0], &mut p)?,
        _ => honest_ct.clone(),
    };
    bytes += ct_prime.len();

    // V_eff,3, or H′ in the two-round variant
    let salt = match mode {
        SaltMode::Fresh => {
            let mut z = vec![0u8; SALT_LEN];
            rng.fill_bytes(&mut z);
            v += words(SALT_LEN);
            bytes += z.len();
            z
        }
        SaltMode::Derived => derive_salt(&ct_prime, &mut p),
    };

    // P_eff,4
    let claimed = statement(x, &pk, &ct, if prover == EffProver::MismatchedProof { &honest_ct } else { &ct_prime });
    let proof = suite.snark.prove(&mut snark_oracle().with_salt(&salt), &claimed, &e, &mut p);
    bytes += proof.len();

    // V_eff,out
    let z = match mode {
        SaltMode::Fresh => salt.clone(),
        SaltMode::Derived => derive_salt(&ct_prime, &mut v),
    };
    let verdict = v_eff_out(suite, x, &pk, &sk, &ct, &ct_prime, &z, &proof, t_prime, &mut v);

    let session = EffSession {
        x: *x,
        s,
        pk_fhe: pk,
        sk_fhe: sk,
        ct,
        encoding,
        salt,
        ct_prime,
        proof,
        time_bound: t_prime,
        ell,
        verdict: Some(verdict),
        costs: CostReport { verifier_ops: v, prover_ops: p, message_bytes: bytes as u64 },
    };
    Ok((verdict, session))
}

/// Four-round run: fresh salt from the verifier.
pub fn run_four_round(
    suite: &BackendSuite,
    inner: &DelegatedInner,
    x: &Instance,
    prover: EffProver,
    seed: u64,
) -> Result<(Verdict, EffSession), EffError> {
    run(suite, inner, x, prover, seed, SaltMode::Fresh)
}

/// Two-round run: the salt is `H′(ct′)`, recomputed by the verifier.
pub fn run_two_round_fs(
    suite: &BackendSuite,
    inner: &DelegatedInner,
    x: &Instance,
    prover: EffProver,
    seed: u64,
) -> Result<(Verdict, EffSession), EffError> {
    run(suite, inner, x, prover, seed, SaltMode::Derived)
}

/// Verifier's decision in the two-round variant on the received `(ct′, π)`.
pub fn v_eff_out_fs(suite: &BackendSuite, session: &EffSession, ct_prime: &[u8], proof: &[u8], ops: &mut u64) -> Verdict {
    let z = derive_salt(ct_prime, ops);
    let s = session;
    v_eff_out(suite, &s.x, &s.pk_fhe, &s.sk_fhe, &s.ct, ct_prime, &z, proof, s.time_bound, ops)
}

pub fn cost_report(session: &EffSession) -> Result<CostReport, EffError> {
    match session.verdict {
        Some(_) => Ok(session.costs),
        None => Err(EffError::IncompleteSession),
    }
}

/// Least-squares fit of `y = a·x^b` on logs; returns `(a, b)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    ((my - b * mx).exp(), b)
}
