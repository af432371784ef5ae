use rand::RngCore;

use super::backends::{words, Circuit, Prg};
use super::machine::{Instr, Program};
use super::EffError;
use crate::protocol::{
    decode_exact, encode_fields, fiat_shamir, mix64, parallel_repeat, toy_protocol, AdversaryStrategy, FiatShamir,
    Instance, OracleTable, ParallelRepeat, RandomOracle, ToyProtocol, Verdict,
};

/// Two-round inner protocol `(V₁, P, V_out)`: Fiat-Shamir over `copies`
/// parallel toy instances, with key generation stretched to `time_bound`
/// chained `mix64` steps so that computing `k` costs time `T`.
///
/// `V₁(x; ρ)` with `ρ = (ρ₀, ρ₁)`: `a = ρ₀ ⊕ mix64(id)`, then `T` times
/// `a ← mix64(a ⊕ ρ₁)`; copy `j` gets `κ_j = mix64(a ⊕ 3j)`,
/// `s_j = 1 + mix64(a ⊕ (3j+1)) mod (2ⁿ − 1)` and, on no-instances,
/// `r_j = mix64(a ⊕ (3j+2)) & 1`.
#[derive(Debug, Clone)]
pub struct DelegatedInner {
    fs: FiatShamir<ParallelRepeat<ToyProtocol>>,
    n: usize,
    copies: usize,
    time_bound: u64,
}

/// Index of the first instruction of the key-stretching loop.
const LOOP_START: u16 = 16;
const LOOP_LEN: u64 = 4;

impl DelegatedInner {
    pub fn new(num_qubits: usize, copies: usize, time_bound: u64, oracle_seed: u64) -> Result<Self, EffError> {
        if time_bound == 0 {
            return Err(EffError::InnerProtocol("time bound must be at least 1".into()));
        }
        let rep = parallel_repeat(toy_protocol(num_qubits)?, copies)?;
        let fs = fiat_shamir(rep, OracleTable::new(oracle_seed, copies)?)?;
        Ok(Self { fs, n: num_qubits, copies, time_bound })
    }

    pub fn time_bound(&self) -> u64 {
        self.time_bound
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exact byte length of `k`.
    pub fn key_len(&self) -> usize {
        16 * self.copies
    }

    fn stretch(&self, x: &Instance, rho: [u64; 2], ops: &mut u64) -> u64 {
        let mut a = rho[0] ^ mix64(x.id);
        for _ in 0..self.time_bound {
            a = mix64(a ^ rho[1]);
        }
        *ops += self.time_bound;
        a
    }

    /// Native `V₁(1ⁿ, x; ρ)` for 16 bytes of randomness `ρ`.
    pub fn keygen(&self, x: &Instance, rho: &[u8], ops: &mut u64) -> Result<(Vec<u8>, Vec<u8>), EffError> {
        if rho.len() != 16 {
            return Err(EffError::InnerProtocol(format!("key generation takes 16 random bytes, got {}", rho.len())));
        }
        let rho = [u64::from_be_bytes(rho[..8].try_into().unwrap()), u64::from_be_bytes(rho[8..].try_into().unwrap())];
        let a = self.stretch(x, rho, ops);
        let modulus = (1u64 << self.n) - 1;
        let mut ks = Vec::with_capacity(self.copies);
        let mut tds = Vec::with_capacity(self.copies);
        for j in 0..self.copies as u64 {
            let kappa = mix64(a ^ (3 * j));
            let s = 1 + mix64(a ^ (3 * j + 1)) % modulus;
            let r = if x.yes { 0 } else { (mix64(a ^ (3 * j + 2)) & 1) as u8 };
            ks.push([kappa.to_be_bytes().as_slice(), &(s as u32).to_be_bytes()].concat());
            tds.push(vec![r]);
        }
        *ops += 3 * self.copies as u64;
        Ok((encode_fields(&ks), encode_fields(&tds)))
    }

    /// The machine `M(s)`: expand `s` with the mix64 PRG, run `V₁` on the
    /// result and output `k`. Input words are `[s₀, s₁, id]`.
    pub fn machine(&self) -> Program {
        use Instr::*;
        let mut p = vec![
            Input(0, 0),
            Input(1, 1),
            Input(2, 2),
            // ρ₀ = mix64(s₀ ⊕ mix64(s₁ ⊕ 0))
            Const(3, 0),
            Xor(3, 1, 3),
            Mix(3),
            Xor(3, 0, 3),
            Mix(3),
            // ρ₁ = mix64(s₀ ⊕ mix64(s₁ ⊕ 1))
            Const(4, 1),
            Xor(4, 1, 4),
            Mix(4),
            Xor(4, 0, 4),
            Mix(4),
            Mix(2),
            Xor(5, 3, 2),
            Const(6, self.time_bound),
        ];
        debug_assert_eq!(p.len(), LOOP_START as usize);
        p.extend([Xor(5, 5, 4), Mix(5), Dec(6), Jnz(6, LOOP_START)]);
        for j in 0..self.copies as u64 {
            p.extend([
                Const(7, 12),
                Out(7, 4),
                Const(0, 3 * j),
                Xor(0, 5, 0),
                Mix(0),
                Out(0, 8),
                Const(1, 3 * j + 1),
                Xor(1, 5, 1),
                Mix(1),
                Const(2, (1 << self.n) - 1),
                Mod(1, 1, 2),
                Const(2, 1),
                Add(1, 1, 2),
                Out(1, 4),
            ]);
        }
        p.push(Halt);
        Program { instrs: p }
    }

    pub fn machine_input(x: &Instance, s: &[u8]) -> Result<Vec<u64>, EffError> {
        if s.len() != 16 {
            return Err(EffError::BackendFailure(format!("seed must be 16 bytes, got {}", s.len())));
        }
        Ok(vec![u64::from_be_bytes(s[..8].try_into().unwrap()), u64::from_be_bytes(s[8..].try_into().unwrap()), x.id])
    }

    /// Exact running time `T′` of [`Self::machine`]: every instruction once,
    /// the loop body `T` times.
    pub fn machine_steps(&self) -> u64 {
        (self.machine().len() as u64 - LOOP_LEN) + LOOP_LEN * self.time_bound
    }

    /// `e = P(x, k)`: the Fiat-Shamir message `(y, a)` of an honest prover.
    pub fn prove(&self, x: &Instance, k: &[u8], rng: &mut dyn RngCore, ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let mut oracle = self.fs.oracle();
        let (y, a) = self.fs.prove(&AdversaryStrategy::Honest, x, k, &mut oracle, rng)?;
        let e = encode_fields(&[y, a]);
        *ops += words(e.len()) + oracle.query_count() as u64;
        Ok(e)
    }

    /// `V_out(x, k, td, e)`; a malformed `e` is a rejection.
    pub fn v_out(&self, x: &Instance, k: &[u8], td: &[u8], e: &[u8], ops: &mut u64) -> Verdict {
        *ops += words(e.len()) + 1;
        let Ok(f) = decode_exact(e, 2) else {
            return Verdict::Reject;
        };
        match self.fs.verify(x, k, td, &f[0], &f[1], &mut self.fs.oracle()) {
            Ok((_, v)) => Verdict::from_bool(v.iter().all(|v| v.is_accept())),
            Err(_) => Verdict::Reject,
        }
    }
}

/// `C[x,e](s) = 1` iff `V_out(x, k, td, e)` accepts for `(k, td) = V₁(x; PRG(s))`.
pub struct VerificationCircuit<'a> {
    pub inner: &'a DelegatedInner,
    pub prg: &'a dyn Prg,
    pub x: Instance,
    pub e: Vec<u8>,
}

impl Circuit for VerificationCircuit<'_> {
    fn eval(&self, s: &[u8], ops: &mut u64) -> Result<Vec<u8>, EffError> {
        let rho = self.prg.expand(s, 16, ops)?;
        let (k, td) = self.inner.keygen(&self.x, &rho, ops)?;
        Ok(vec![self.inner.v_out(&self.x, &k, &td, &self.e, ops).is_accept() as u8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effverify::backends::MixPrg;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inner(t: u64) -> DelegatedInner {
        DelegatedInner::new(8, 4, t, 77).unwrap()
    }

    #[test]
    fn steps_formula_matches_interpreter() {
        for t in [1, 2, 17, 256] {
            let d = inner(t);
            let run = d.machine().run(&[1, 2, 3], u64::MAX).unwrap();
            assert_eq!(run.steps, d.machine_steps());
            assert_eq!(run.output.len(), d.key_len());
            assert!(d.machine().run(&[1, 2, 3], d.machine_steps() - 1).is_err());
        }
    }

    #[test]
    fn honest_inner_run_accepts_yes() {
        let d = inner(64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in 0..50 {
            let x = Instance::yes(id);
            let rho: [u8; 16] = rng.gen();
            let (k, td) = d.keygen(&x, &rho, &mut 0).unwrap();
            let e = d.prove(&x, &k, &mut rng, &mut 0).unwrap();
            assert!(d.v_out(&x, &k, &td, &e, &mut 0).is_accept());
            assert!(!d.v_out(&x, &k, &td, &e[..e.len() - 1], &mut 0).is_accept());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DelegatedInner::new(8, 4, 0, 0).is_err());
        assert!(DelegatedInner::new(1, 4, 8, 0).is_err());
        assert!(DelegatedInner::new(8, 0, 8, 0).is_err());
        assert!(inner(4).keygen(&Instance::yes(0), &[0; 15], &mut 0).is_err());
    }

    #[test]
    fn keygen_costs_the_time_bound() {
        let (mut a, mut b) = (0, 0);
        inner(100).keygen(&Instance::yes(0), &[0; 16], &mut a).unwrap();
        inner(1000).keygen(&Instance::yes(0), &[0; 16], &mut b).unwrap();
        assert_eq!(b - a, 900);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        // the interpreted machine and native V₁ on PRG(s) produce the same key
        #[test]
        fn machine_matches_native_keygen(s in any::<[u8; 16]>(), id in any::<u64>(), t in 1u64..300, copies in 1usize..5) {
            let d = DelegatedInner::new(10, copies, t, 5).unwrap();
            let x = Instance::yes(id);
            let out = d.machine().run(&DelegatedInner::machine_input(&x, &s).unwrap(), u64::MAX).unwrap().output;
            let rho = MixPrg.expand(&s, 16, &mut 0).unwrap();
            prop_assert_eq!(out, d.keygen(&x, &rho, &mut 0).unwrap().0);
        }
    }
}
