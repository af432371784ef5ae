use rand::RngCore;

use super::{
    check_challenge, decode_exact, encode_fields, CoordinateMove, FourRoundProtocol, Instance, ProtocolError, Verdict,
};

/// `m` independent copies run side by side. Keys, trapdoors, commitments,
/// states and answers are length-prefixed `m`-tuples; challenges are the
/// concatenation of the copies' challenge bits.
#[derive(Debug, Clone)]
pub struct ParallelRepeat<P> {
    base: P,
    m: usize,
}

pub fn parallel_repeat<P: FourRoundProtocol>(base: P, m: usize) -> Result<ParallelRepeat<P>, ProtocolError> {
    if m == 0 {
        return Err(ProtocolError::InvalidParams("parallel repetition needs m >= 1".into()));
    }
    Ok(ParallelRepeat { base, m })
}

impl<P: FourRoundProtocol> ParallelRepeat<P> {
    pub fn base(&self) -> &P {
        &self.base
    }

    pub fn copies(&self) -> usize {
        self.m
    }

    fn split(&self, bytes: &[u8], what: &str) -> Result<Vec<Vec<u8>>, ProtocolError> {
        decode_exact(bytes, self.m).map_err(|_| ProtocolError::Malformed(format!("{what}: expected {} parts", self.m)))
    }

    fn chunks<'a, T>(&self, v: &'a [T], per: usize) -> impl Iterator<Item = &'a [T]> {
        v.chunks(per)
    }
}

impl<P: FourRoundProtocol> FourRoundProtocol for ParallelRepeat<P> {
    fn challenge_bits(&self) -> usize {
        self.m * self.base.challenge_bits()
    }

    fn coordinates(&self) -> usize {
        self.m * self.base.coordinates()
    }

    fn v1(&self, x: &Instance, rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError> {
        let (ks, tds): (Vec<_>, Vec<_>) = (0..self.m).map(|_| self.base.v1(x, rng)).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
        Ok((encode_fields(&ks), encode_fields(&tds)))
    }

    fn p2(&self, x: &Instance, k: &[u8], rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>), ProtocolError> {
        let ks = self.split(k, "key")?;
        let (ys, sts): (Vec<_>, Vec<_>) =
            ks.iter().map(|k| self.base.p2(x, k, rng)).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
        Ok((encode_fields(&ys), encode_fields(&sts)))
    }

    fn p4(&self, st: &[u8], c: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>, ProtocolError> {
        check_challenge(c, self.challenge_bits())?;
        let sts = self.split(st, "prover state")?;
        let answers = sts
            .iter()
            .zip(self.chunks(c, self.base.challenge_bits()))
            .map(|(s, ci)| self.base.p4(s, ci, rng))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(encode_fields(&answers))
    }

    fn p4_scripted(&self, st: &[u8], c: &[u8], moves: &[CoordinateMove]) -> Result<Vec<u8>, ProtocolError> {
        check_challenge(c, self.challenge_bits())?;
        if moves.len() != self.coordinates() {
            return Err(ProtocolError::WidthMismatch { expected: self.coordinates(), found: moves.len() });
        }
        let sts = self.split(st, "prover state")?;
        let answers = sts
            .iter()
            .zip(self.chunks(c, self.base.challenge_bits()))
            .zip(self.chunks(moves, self.base.coordinates()))
            .map(|((s, ci), mi)| self.base.p4_scripted(s, ci, mi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(encode_fields(&answers))
    }

    fn v_out_coordinates(
        &self,
        x: &Instance,
        k: &[u8],
        td: &[u8],
        y: &[u8],
        c: &[u8],
        a: &[u8],
    ) -> Result<Vec<Verdict>, ProtocolError> {
        check_challenge(c, self.challenge_bits())?;
        let (ks, tds, ys) = (self.split(k, "key")?, self.split(td, "trapdoor")?, self.split(y, "commitment")?);
        // a malformed answer tuple is a rejection, not an error
        let Ok(as_) = decode_exact(a, self.m) else {
            return Ok(vec![Verdict::Reject; self.coordinates()]);
        };
        let mut out = Vec::with_capacity(self.coordinates());
        for (j, ci) in self.chunks(c, self.base.challenge_bits()).enumerate() {
            out.extend(self.base.v_out_coordinates(x, &ks[j], &tds[j], &ys[j], ci, &as_[j])?);
        }
        Ok(out)
    }

    fn public_test_verify(&self, x: &Instance, k: &[u8], y: &[u8], a: &[u8]) -> Result<Verdict, ProtocolError> {
        let (ks, ys) = (self.split(k, "key")?, self.split(y, "commitment")?);
        let Ok(as_) = decode_exact(a, self.m) else {
            return Ok(Verdict::Reject);
        };
        for j in 0..self.m {
            if !self.base.public_test_verify(x, &ks[j], &ys[j], &as_[j])?.is_accept() {
                return Ok(Verdict::Reject);
            }
        }
        Ok(Verdict::Accept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::toy_protocol;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_copy_matches_base_under_matched_seeds() {
        let base = toy_protocol(6).unwrap();
        let rep = parallel_repeat(base, 1).unwrap();
        for seed in 0..100 {
            let x = if seed % 2 == 0 { Instance::yes(seed) } else { Instance::no(seed) };
            let (mut r1, mut r2) = (ChaCha8Rng::seed_from_u64(seed), ChaCha8Rng::seed_from_u64(seed));
            let (k1, td1) = base.v1(&x, &mut r1).unwrap();
            let (k2, td2) = rep.v1(&x, &mut r2).unwrap();
            assert_eq!(decode_exact(&k2, 1).unwrap()[0], k1);
            assert_eq!(decode_exact(&td2, 1).unwrap()[0], td1);
            let (y1, st1) = base.p2(&x, &k1, &mut r1).unwrap();
            let (y2, st2) = rep.p2(&x, &k2, &mut r2).unwrap();
            assert_eq!(decode_exact(&y2, 1).unwrap()[0], y1);
            let (c1, c2) = (base.v3(&mut r1), rep.v3(&mut r2));
            assert_eq!(c1, c2);
            let a1 = base.p4(&st1, &c1, &mut r1).unwrap();
            let a2 = rep.p4(&st2, &c2, &mut r2).unwrap();
            assert_eq!(decode_exact(&a2, 1).unwrap()[0], a1);
            assert_eq!(base.v_out(&x, &k1, &td1, &y1, &c1, &a1).unwrap(), rep.v_out(&x, &k2, &td2, &y2, &c2, &a2).unwrap());
        }
    }

    #[test]
    fn rejects_zero_copies_and_bad_widths() {
        let base = toy_protocol(4).unwrap();
        assert!(parallel_repeat(base, 0).is_err());
        let rep = parallel_repeat(base, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = Instance::yes(0);
        let (k, _) = rep.v1(&x, &mut rng).unwrap();
        let (_, st) = rep.p2(&x, &k, &mut rng).unwrap();
        assert!(rep.p4(&st, &[0, 1], &mut rng).is_err());
        assert!(rep.p4_scripted(&st, &[0, 1, 0], &[CoordinateMove::TestOnly]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // the repeated verdict is the AND of base verdicts on the split messages
        #[test]
        fn verdict_is_conjunction(seed in any::<u64>(), m in 1usize..6, yes in any::<bool>(), script in any::<bool>()) {
            let base = toy_protocol(5).unwrap();
            let rep = parallel_repeat(base, m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Instance { id: seed, yes };
            let (k, td) = rep.v1(&x, &mut rng).unwrap();
            let (y, st) = rep.p2(&x, &k, &mut rng).unwrap();
            let c = rep.v3(&mut rng);
            let a = if script {
                let moves: Vec<_> = (0..m).map(|j| CoordinateMove::Measured { value: j, accepted: (seed >> j) & 1 == 1 }).collect();
                rep.p4_scripted(&st, &c, &moves).unwrap()
            } else {
                rep.p4(&st, &c, &mut rng).unwrap()
            };
            let parts = |b: &[u8]| decode_exact(b, m).unwrap();
            let (ks, tds, ys, as_) = (parts(&k), parts(&td), parts(&y), parts(&a));
            let all = (0..m).all(|j| base.v_out(&x, &ks[j], &tds[j], &ys[j], &c[j..j + 1], &as_[j]).unwrap().is_accept());
            prop_assert_eq!(rep.v_out(&x, &k, &td, &y, &c, &a).unwrap(), Verdict::from_bool(all));
        }
    }
}
