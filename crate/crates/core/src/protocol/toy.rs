use rand::{Rng, RngCore};

use super::{check_challenge, CoordinateMove, FourRoundProtocol, Instance, ProtocolError, Verdict};
use crate::tol::DEFAULT_QUBIT_CAP;

const TEST_TAG: u8 = 0;
const HADAMARD_TAG: u8 = 1;

/// splitmix64 finaliser.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stand-in for a claw-based protocol with no hardness at all.
///
/// `k = (κ, s)` publishes two tables `T_b[x] = low32(mix64(κ ⊕ (x ⊕ b·s)))` on
/// `n`-bit inputs, so every `y = T_0[x₀]` has the claw `(x₀, x₀ ⊕ s)`. The
/// test round asks for a preimage `(b, x_b)` of `y`; the Hadamard round asks
/// for `d ≠ 0` with `d·s = r (mod 2)`. On yes-instances `r = 0`; on
/// no-instances `r` is a uniform bit kept in `td`, so no prover can pass the
/// Hadamard round with probability above 1/2 and no strategy passes both
/// rounds with certainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyProtocol {
    n: usize,
}

pub fn toy_protocol(num_qubits: usize) -> Result<ToyProtocol, ProtocolError> {
    ToyProtocol::new(num_qubits)
}

struct Key {
    kappa: u64,
    s: u32,
}

fn parity(v: u32) -> u8 {
    (v.count_ones() & 1) as u8
}

impl ToyProtocol {
    pub fn new(num_qubits: usize) -> Result<Self, ProtocolError> {
        if num_qubits > DEFAULT_QUBIT_CAP {
            return Err(ProtocolError::CapExceeded { requested: num_qubits, cap: DEFAULT_QUBIT_CAP });
        }
        if num_qubits < 2 {
            return Err(ProtocolError::InvalidParams("the toy protocol needs at least 2 qubits".into()));
        }
        Ok(Self { n: num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn domain(&self) -> u32 {
        1u32 << self.n
    }

    fn table(&self, k: &Key, b: u8, x: u32) -> u32 {
        mix64(k.kappa ^ u64::from(x ^ ((b as u32) * k.s))) as u32
    }

    fn key(&self, k: &[u8]) -> Result<Key, ProtocolError> {
        if k.len() != 12 {
            return Err(ProtocolError::Malformed("toy key".into()));
        }
        let s = u32::from_be_bytes(k[8..].try_into().unwrap());
        if s == 0 || s >= self.domain() {
            return Err(ProtocolError::Malformed("toy key shift".into()));
        }
        Ok(Key { kappa: u64::from_be_bytes(k[..8].try_into().unwrap()), s })
    }

    fn state(&self, st: &[u8]) -> Result<(Key, u32), ProtocolError> {
        if st.len() != 16 {
            return Err(ProtocolError::Malformed("toy prover state".into()));
        }
        Ok((self.key(&st[..12])?, u32::from_be_bytes(st[12..].try_into().unwrap())))
    }

    fn test_answer(b: u8, x: u32) -> Vec<u8> {
        let mut a = vec![TEST_TAG, b];
        a.extend_from_slice(&x.to_be_bytes());
        a
    }

    fn hadamard_answer(d: u32) -> Vec<u8> {
        let mut a = vec![HADAMARD_TAG];
        a.extend_from_slice(&d.to_be_bytes());
        a
    }

    /// Smallest `d ≥ 1` with `d·s = bit`.
    fn first_with_parity(&self, s: u32, bit: u8) -> u32 {
        (1..self.domain()).find(|&d| parity(d & s) == bit).expect("n >= 2 leaves both parities")
    }

    fn verify_test(&self, k: &Key, y: &[u8], a: &[u8]) -> bool {
        let (Ok(y), [TEST_TAG, b @ (0 | 1), x @ ..]) = (<[u8; 4]>::try_from(y), a) else {
            return false;
        };
        let Ok(x) = <[u8; 4]>::try_from(x) else {
            return false;
        };
        let x = u32::from_be_bytes(x);
        x < self.domain() && self.table(k, *b, x) == u32::from_be_bytes(y)
    }

    fn verify_hadamard(&self, k: &Key, r: u8, a: &[u8]) -> bool {
        let [HADAMARD_TAG, d @ ..] = a else {
            return false;
        };
        let Ok(d) = <[u8; 4]>::try_from(d) else {
            return false;
        };
        let d = u32::from_be_bytes(d);
        d != 0 && d < self.domain() && parity(d & k.s) == r
    }
}

impl FourRoundProtocol for ToyProtocol {
    fn challenge_bits(&self) -> usize {
        1
    }

    fn coordinates(&self) -> usize {
        1
    }

    fn v1(&self, x: &Instance, rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError> {
        let kappa: u64 = rng.gen();
        let s: u32 = rng.gen_range(1..self.domain());
        let r: u8 = if x.yes { 0 } else { rng.gen_range(0..2) };
        let mut k = kappa.to_be_bytes().to_vec();
        k.extend_from_slice(&s.to_be_bytes());
        Ok((k, vec![r]))
    }

    fn p2(&self, _x: &Instance, k: &[u8], rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError> {
        let key = self.key(k)?;
        let x0: u32 = rng.gen_range(0..self.domain());
        let y = self.table(&key, 0, x0).to_be_bytes().to_vec();
        let mut st = k.to_vec();
        st.extend_from_slice(&x0.to_be_bytes());
        Ok((y, st))
    }

    fn p4(&self, st: &[u8], c: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>, ProtocolError> {
        check_challenge(c, 1)?;
        let (key, x0) = self.state(st)?;
        if c[0] == 0 {
            let b: u8 = rng.gen_range(0..2);
            return Ok(Self::test_answer(b, x0 ^ ((b as u32) * key.s)));
        }
        loop {
            let d: u32 = rng.gen_range(1..self.domain());
            if parity(d & key.s) == 0 {
                return Ok(Self::hadamard_answer(d));
            }
        }
    }

    fn p4_scripted(&self, st: &[u8], c: &[u8], moves: &[CoordinateMove]) -> Result<Vec<u8>, ProtocolError> {
        check_challenge(c, 1)?;
        let [mv] = moves else {
            return Err(ProtocolError::WidthMismatch { expected: 1, found: moves.len() });
        };
        let (key, x0) = self.state(st)?;
        Ok(match (*mv, c[0]) {
            (CoordinateMove::TestOnly, _) => Self::test_answer(0, x0),
            (CoordinateMove::Measured { value, accepted }, 0) => {
                let b = (value & 1) as u8;
                if accepted {
                    Self::test_answer(b, x0 ^ ((b as u32) * key.s))
                } else {
                    // b = 2 is never a valid preimage index
                    Self::test_answer(2, x0)
                }
            }
            (CoordinateMove::Measured { value, .. }, _) => {
                Self::hadamard_answer(self.first_with_parity(key.s, (value & 1) as u8))
            }
        })
    }

    fn v_out_coordinates(
        &self,
        _x: &Instance,
        k: &[u8],
        td: &[u8],
        y: &[u8],
        c: &[u8],
        a: &[u8],
    ) -> Result<Vec<Verdict>, ProtocolError> {
        check_challenge(c, 1)?;
        let key = self.key(k)?;
        let &[r @ (0 | 1)] = td else {
            return Err(ProtocolError::Malformed("toy trapdoor".into()));
        };
        let ok = if c[0] == 0 { self.verify_test(&key, y, a) } else { self.verify_hadamard(&key, r, a) };
        Ok(vec![Verdict::from_bool(ok)])
    }

    fn public_test_verify(&self, _x: &Instance, k: &[u8], y: &[u8], a: &[u8]) -> Result<Verdict, ProtocolError> {
        Ok(Verdict::from_bool(self.verify_test(&self.key(k)?, y, a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn session(p: &ToyProtocol, x: Instance, rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>, Vec<u8>, Vec<u8>) {
        let (k, td) = p.v1(&x, rng).unwrap();
        let (y, st) = p.p2(&x, &k, rng).unwrap();
        (k, td, y, st)
    }

    #[test]
    fn mix64_reference_values() {
        // splitmix64 outputs for seed 0: first two draws
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix64(0x9e37_79b9_7f4a_7c15), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn tables_have_claws() {
        let p = toy_protocol(8).unwrap();
        let key = Key { kappa: 99, s: 0b1011 };
        for x in 0..256 {
            assert_eq!(p.table(&key, 0, x), p.table(&key, 1, x ^ 0b1011));
        }
    }

    #[test]
    fn honest_is_complete_on_yes() {
        let p = toy_protocol(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Instance::yes(3);
        for t in 0..1000 {
            let c = [(t % 2) as u8];
            let (k, td, y, st) = session(&p, x, &mut rng);
            let a = p.p4(&st, &c, &mut rng).unwrap();
            assert!(p.v_out(&x, &k, &td, &y, &c, &a).unwrap().is_accept());
        }
    }

    #[test]
    fn test_only_passes_test_and_fails_hadamard() {
        let p = toy_protocol(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Instance::no(4);
        for _ in 0..500 {
            let (k, td, y, st) = session(&p, x, &mut rng);
            let a0 = p.p4_scripted(&st, &[0], &[CoordinateMove::TestOnly]).unwrap();
            assert!(p.v_out(&x, &k, &td, &y, &[0], &a0).unwrap().is_accept());
            assert!(p.public_test_verify(&x, &k, &y, &a0).unwrap().is_accept());
            let a1 = p.p4_scripted(&st, &[1], &[CoordinateMove::TestOnly]).unwrap();
            assert!(!p.v_out(&x, &k, &td, &y, &[1], &a1).unwrap().is_accept());
        }
    }

    // the hidden bit caps any fixed Hadamard answer at 1/2 on no-instances
    #[test]
    fn hadamard_round_on_no_instance_is_a_coin() {
        let p = toy_protocol(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Instance::no(5);
        let trials = 4000;
        let mut acc = 0;
        for _ in 0..trials {
            let (k, td, y, st) = session(&p, x, &mut rng);
            let a = p.p4(&st, &[1], &mut rng).unwrap();
            acc += p.v_out(&x, &k, &td, &y, &[1], &a).unwrap().is_accept() as usize;
        }
        assert!((acc as f64 / trials as f64 - 0.5).abs() < 0.04);
    }

    #[test]
    fn test_round_verdict_is_public() {
        let p = toy_protocol(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in 0..300 {
            let x = if t % 2 == 0 { Instance::yes(t) } else { Instance::no(t) };
            let (k, td, y, st) = session(&p, x, &mut rng);
            let mv = CoordinateMove::Measured { value: t as usize, accepted: t % 3 != 0 };
            for a in [p.p4(&st, &[0], &mut rng).unwrap(), p.p4_scripted(&st, &[0], &[mv]).unwrap(), vec![9, 9]] {
                assert_eq!(p.v_out(&x, &k, &td, &y, &[0], &a).unwrap(), p.public_test_verify(&x, &k, &y, &a).unwrap());
            }
        }
    }

    #[test]
    fn measured_moves_follow_the_outcome() {
        let p = toy_protocol(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Instance::no(6);
        for _ in 0..200 {
            let (k, td, y, st) = session(&p, x, &mut rng);
            let r = td[0] as usize;
            let rej = CoordinateMove::Measured { value: 1, accepted: false };
            assert!(!p.v_out(&x, &k, &td, &y, &[0], &p.p4_scripted(&st, &[0], &[rej]).unwrap()).unwrap().is_accept());
            let guess = CoordinateMove::Measured { value: r, accepted: false };
            assert!(p.v_out(&x, &k, &td, &y, &[1], &p.p4_scripted(&st, &[1], &[guess]).unwrap()).unwrap().is_accept());
            let wrong = CoordinateMove::Measured { value: 1 - r, accepted: true };
            assert!(!p.v_out(&x, &k, &td, &y, &[1], &p.p4_scripted(&st, &[1], &[wrong]).unwrap()).unwrap().is_accept());
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(toy_protocol(21), Err(ProtocolError::CapExceeded { requested: 21, cap: 20 }));
        assert!(toy_protocol(1).is_err());
        let p = toy_protocol(4).unwrap();
        assert!(p.key(&[0; 11]).is_err());
        assert!(p.key(&[0; 12]).is_err());
    }
}
