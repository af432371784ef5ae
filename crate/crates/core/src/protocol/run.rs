use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CoordinateMove, FourRoundProtocol, Instance, ProtocolError, Transcript, Verdict};
use crate::partition::ProverStrategy;

#[derive(Debug, Clone)]
pub enum AdversaryStrategy {
    Honest,
    /// Passes every test round, answers every Hadamard round in the wrong format.
    TestOnly,
    /// Measures the answer registers of `U|c⟩U₀|0⟩`. A one-coordinate
    /// strategy is applied independently to every coordinate; otherwise the
    /// strategy's `m` must equal the number of coordinates.
    UnitaryCheat(Arc<ProverStrategy>),
    /// Under Fiat-Shamir, re-commits up to `query_budget` times looking for an
    /// all-zero challenge, then answers like `inner`. Interactively it is `inner`.
    FsGrinder { query_budget: usize, inner: Box<AdversaryStrategy> },
}

impl AdversaryStrategy {
    pub fn name(&self) -> String {
        match self {
            AdversaryStrategy::Honest => "honest".into(),
            AdversaryStrategy::TestOnly => "test-only".into(),
            AdversaryStrategy::UnitaryCheat(_) => "unitary-cheat".into(),
            AdversaryStrategy::FsGrinder { query_budget, inner } => format!("fs-grinder({query_budget},{})", inner.name()),
        }
    }

    pub fn answer<P: FourRoundProtocol + ?Sized>(
        &self,
        p: &P,
        st: &[u8],
        c: &[u8],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<u8>, ProtocolError> {
        match self {
            AdversaryStrategy::Honest => p.p4(st, c, rng),
            AdversaryStrategy::TestOnly => p.p4_scripted(st, c, &vec![CoordinateMove::TestOnly; p.coordinates()]),
            AdversaryStrategy::UnitaryCheat(s) => {
                let moves = measured_moves(s, c, p.coordinates(), rng)?;
                p.p4_scripted(st, c, &moves)
            }
            AdversaryStrategy::FsGrinder { inner, .. } => inner.answer(p, st, c, rng),
        }
    }
}

fn sample_index(amps: &DVector<num_complex::Complex64>, rng: &mut dyn RngCore) -> usize {
    let r: f64 = rng.gen::<f64>() * amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut acc = 0.0;
    for (k, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if r < acc {
            return k;
        }
    }
    amps.len() - 1
}

fn measured_moves(
    s: &ProverStrategy,
    c: &[u8],
    coords: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<CoordinateMove>, ProtocolError> {
    if c.len() != coords {
        return Err(ProtocolError::InvalidParams("unitary cheats need one challenge bit per coordinate".into()));
    }
    let l = s.layout();
    let psi = DVector::from_column_slice(s.initial_state()?.amps());
    let mv = |xz: usize, i: usize| {
        let value = l.x_value(xz, i);
        CoordinateMove::Measured { value, accepted: s.accepts(i, value) }
    };
    if l.m == coords {
        let cidx = c.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let xz = sample_index(&(s.block(cidx) * psi), rng);
        Ok((1..=l.m).map(|i| mv(xz, i)).collect())
    } else if l.m == 1 {
        let blocks = [s.block(0) * &psi, s.block(1) * &psi];
        Ok(c.iter().map(|&b| mv(sample_index(&blocks[b as usize], rng), 1)).collect())
    } else {
        Err(ProtocolError::WidthMismatch { expected: coords, found: l.m })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChallengeSource {
    Coin,
    Fixed(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionRecord {
    pub transcript: Transcript,
    pub coordinates: Vec<Verdict>,
    pub queries: usize,
}

/// One interactive session.
pub fn run_session<P: FourRoundProtocol + ?Sized>(
    p: &P,
    adv: &AdversaryStrategy,
    x: &Instance,
    challenge: ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<SessionRecord, ProtocolError> {
    let (k, td) = p.v1(x, rng)?;
    let (y, st) = p.p2(x, &k, rng)?;
    let c = match challenge {
        ChallengeSource::Coin => p.v3(rng),
        ChallengeSource::Fixed(c) => c,
    };
    let a = adv.answer(p, &st, &c, rng)?;
    let coordinates = p.v_out_coordinates(x, &k, &td, &y, &c, &a)?;
    let verdict = Verdict::from_bool(coordinates.iter().all(|v| v.is_accept()));
    Ok(SessionRecord { transcript: Transcript { x: *x, k, y, c, a, verdict }, coordinates, queries: 0 })
}

/// Anything that can run a whole session from a random tape.
pub trait SessionRunner: Sync {
    fn run_one(&self, adv: &AdversaryStrategy, x: &Instance, rng: &mut dyn RngCore) -> Result<SessionRecord, ProtocolError>;
}

impl<P: FourRoundProtocol> SessionRunner for P {
    fn run_one(&self, adv: &AdversaryStrategy, x: &Instance, rng: &mut dyn RngCore) -> Result<SessionRecord, ProtocolError> {
        run_session(self, adv, x, ChallengeSource::Coin, rng)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RoundTally {
    pub seen: u64,
    pub accepted: u64,
}

/// Acceptance counts. `per_round[b]` tallies coordinates whose challenge bit
/// was `b` (0 = test round, 1 = Hadamard round).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub trials: u64,
    pub accepts: u64,
    pub per_round: [RoundTally; 2],
    pub queries: u64,
}

impl Stats {
    pub fn accept_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.accepts as f64 / self.trials as f64
        }
    }

    pub fn of(rec: &SessionRecord) -> Self {
        let mut s = Stats {
            trials: 1,
            accepts: rec.transcript.verdict.is_accept() as u64,
            queries: rec.queries as u64,
            ..Default::default()
        };
        if rec.transcript.c.len() == rec.coordinates.len() {
            for (&b, v) in rec.transcript.c.iter().zip(&rec.coordinates) {
                let t = &mut s.per_round[b as usize];
                t.seen += 1;
                t.accepted += v.is_accept() as u64;
            }
        }
        s
    }

    pub fn merge(mut self, o: Stats) -> Self {
        self.trials += o.trials;
        self.accepts += o.accepts;
        self.queries += o.queries;
        for b in 0..2 {
            self.per_round[b].seen += o.per_round[b].seen;
            self.per_round[b].accepted += o.per_round[b].accepted;
        }
        self
    }
}

/// Random tape of trial `t` under `seed`.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// `trials` independent sessions, run in parallel; trial `t` uses stream `t`
/// of a ChaCha8 generator seeded with `seed`, so the result does not depend
/// on the thread count.
pub fn run_protocol<R: SessionRunner + ?Sized>(
    p: &R,
    adv: &AdversaryStrategy,
    x: &Instance,
    trials: u64,
    seed: u64,
) -> Result<Stats, ProtocolError> {
    if trials == 0 {
        return Err(ProtocolError::InvalidParams("trials must be at least 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| p.run_one(adv, x, &mut trial_rng(seed, t)).map(|r| Stats::of(&r)))
        .try_reduce(Stats::default, |a, b| Ok(a.merge(b)))
}

/// `1 − (1 − 2^{−m})^q`: chance that one of `q` uniform `m`-bit challenges is all zero.
pub fn grinding_success(m: usize, q: usize) -> f64 {
    -((q as f64) * (-(0.5f64).powi(m as i32)).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::StrategyLayout;
    use crate::protocol::{parallel_repeat, toy_protocol};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn binomial_ok(hits: u64, n: u64, p: f64) -> bool {
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        (hits as f64 / n as f64 - p).abs() <= 3.0 * sigma + 1e-12
    }

    #[test]
    fn honest_completeness() {
        let p = parallel_repeat(toy_protocol(8).unwrap(), 20).unwrap();
        let s = run_protocol(&p, &AdversaryStrategy::Honest, &Instance::yes(1), 1000, 5).unwrap();
        assert!(s.accept_rate() >= 0.95);
        assert_eq!(s.per_round[0].seen + s.per_round[1].seen, 20_000);
    }

    #[test]
    fn test_only_with_fixed_challenges() {
        let p = toy_protocol(8).unwrap();
        let x = Instance::no(2);
        for (c, want) in [(0u8, true), (1, false)] {
            for seed in 0..200 {
                let r = run_session(&p, &AdversaryStrategy::TestOnly, &x, ChallengeSource::Fixed(vec![c]), &mut trial_rng(seed, 0))
                    .unwrap();
                assert_eq!(r.transcript.verdict.is_accept(), want);
            }
        }
    }

    #[test]
    fn test_only_rate_is_two_to_minus_m() {
        for m in 1..=5 {
            let p = parallel_repeat(toy_protocol(6).unwrap(), m).unwrap();
            let s = run_protocol(&p, &AdversaryStrategy::TestOnly, &Instance::no(3), 20_000, m as u64).unwrap();
            assert!(binomial_ok(s.accepts, s.trials, 0.5f64.powi(m as i32)), "m={m}: {}", s.accept_rate());
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let p = parallel_repeat(toy_protocol(6).unwrap(), 3).unwrap();
        let adv = AdversaryStrategy::TestOnly;
        let a = run_protocol(&p, &adv, &Instance::no(4), 500, 9).unwrap();
        let b = run_protocol(&p, &adv, &Instance::no(4), 500, 9).unwrap();
        assert_eq!(a, b);
        assert!(run_protocol(&p, &adv, &Instance::no(4), 0, 9).is_err());
    }

    // χ² goodness of fit of v3 over all 2^m challenge strings
    #[test]
    fn challenges_are_uniform() {
        let m = 4;
        let p = parallel_repeat(toy_protocol(4).unwrap(), m).unwrap();
        let mut rng = trial_rng(10, 0);
        let n = 100_000;
        let mut counts = vec![0f64; 1 << m];
        for _ in 0..n {
            let c = p.v3(&mut rng);
            counts[c.iter().fold(0, |a, &b| (a << 1) | b as usize)] += 1.0;
        }
        let e = n as f64 / counts.len() as f64;
        let chi2: f64 = counts.iter().map(|o| (o - e).powi(2) / e).sum();
        let pval = 1.0 - ChiSquared::new((counts.len() - 1) as f64).unwrap().cdf(chi2);
        assert!(pval > 0.01, "p = {pval}");
    }

    #[test]
    fn unitary_cheat_loses_ground_under_repetition() {
        let mut rng = trial_rng(11, 0);
        let s = Arc::new(ProverStrategy::random(StrategyLayout::new(1, 1, 1).unwrap(), &mut rng));
        let adv = AdversaryStrategy::UnitaryCheat(s);
        let x = Instance::no(5);
        let rates: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|&m| run_protocol(&parallel_repeat(toy_protocol(6).unwrap(), m).unwrap(), &adv, &x, 20_000, 12).unwrap().accept_rate())
            .collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
        assert!(rates[3] < rates[0]);
    }

    // a joint strategy on m coordinates: per-challenge acceptance is the
    // test-coordinate acceptance times 2^{-#Hadamard coordinates}
    #[test]
    fn joint_cheat_matches_exact_acceptance() {
        let mut rng = trial_rng(13, 0);
        let m = 2;
        let s = ProverStrategy::random(StrategyLayout::new(m, 1, 1).unwrap(), &mut rng);
        let l = s.layout();
        let psi = DVector::from_column_slice(s.initial_state().unwrap().amps());
        let mut exact = 0.0;
        for c in 0..1usize << m {
            let out = s.block(c) * &psi;
            let pass: f64 = (0..l.dim_xz())
                .filter(|&xz| (1..=m).all(|i| (c >> (m - i)) & 1 == 1 || s.accepts(i, l.x_value(xz, i))))
                .map(|xz| out[xz].norm_sqr())
                .sum();
            exact += pass * 0.5f64.powi(c.count_ones() as i32) / (1 << m) as f64;
        }
        let p = parallel_repeat(toy_protocol(6).unwrap(), m).unwrap();
        let st = run_protocol(&p, &AdversaryStrategy::UnitaryCheat(Arc::new(s)), &Instance::no(6), 40_000, 14).unwrap();
        assert!(binomial_ok(st.accepts, st.trials, exact), "{} vs {exact}", st.accept_rate());
    }

    #[test]
    fn grinding_formula() {
        assert_eq!(grinding_success(1, 1), 0.5);
        assert!((grinding_success(2, 3) - (1.0 - 0.75f64.powi(3))).abs() < 1e-15);
        assert!((grinding_success(10, 1024) - (1.0 - (1.0 - 1.0 / 1024.0f64).powi(1024))).abs() < 1e-13);
    }
}
