use rand::Rng;

use super::PartitionError;
use crate::qsim::gates::{cnot, ry};
use crate::qsim::{Operator, RegisterLayout, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractOutcome {
    /// Accepted answer `a_i` found in round `round` (1-based).
    Success { a: usize, round: usize },
    Failure,
}

impl ExtractOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ExtractOutcome::Success { .. })
    }
}

/// Alternating-measurement extractor. Each round measures `{Π_out, I − Π_out}`;
/// on the first outcome it rotates into the answer frame `W` (so that
/// `Π_out = W†(A ⊗ I)W`), measures `x_register` and returns. Otherwise it
/// measures `{Π_in, I − Π_in}` and tries again, up to `n_rounds` times.
#[allow(clippy::too_many_arguments)]
pub fn extract_with<R: Rng + ?Sized>(
    pi_in: &Operator,
    pi_out: &Operator,
    frame: &Operator,
    targets: &[&str],
    x_register: &str,
    state: &StateVector,
    n_rounds: usize,
    rng: &mut R,
) -> Result<ExtractOutcome, PartitionError> {
    if n_rounds == 0 {
        return Err(PartitionError::DomainError("n_rounds must be at least 1".into()));
    }
    let mut cur = state.normalized()?;
    for round in 1..=n_rounds {
        let (hit, post, _) = cur.measure_projector(pi_out, targets, rng)?;
        if hit {
            let answer = post.apply(frame, targets)?.measure(x_register, rng)?;
            return Ok(ExtractOutcome::Success { a: answer.outcome, round });
        }
        let (_, post, _) = post.measure_projector(pi_in, targets, rng)?;
        cur = post;
    }
    Ok(ExtractOutcome::Failure)
}

/// `P_N = 1 − (1 − 2p + 2p²)^{N−1}(1 − p)`: success probability of `N`
/// extractor rounds started on `α` of a block with `⟨α|Π_out|α⟩ = p`.
pub fn ext_success_formula(p: f64, n_rounds: usize) -> Result<f64, PartitionError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PartitionError::DomainError(format!("p = {p} outside [0, 1]")));
    }
    if n_rounds == 0 {
        return Err(PartitionError::DomainError("n_rounds must be at least 1".into()));
    }
    Ok(1.0 - (1.0 - 2.0 * p + 2.0 * p * p).powi(n_rounds as i32 - 1) * (1.0 - p))
}

/// A lone 2-D block on registers `C, X` (one qubit each): `Π_in = |0⟩⟨0|_C ⊗ I`,
/// `W = CNOT·(R_y(φ) ⊗ I)`, `Π_out = W†(I ⊗ |1⟩⟨1|)W` with `sin²(φ/2) = p`, and
/// start vector `α = |00⟩`.
#[derive(Debug, Clone)]
pub struct SyntheticBlock {
    pub pi_in: Operator,
    pub pi_out: Operator,
    pub frame: Operator,
    pub start: StateVector,
}

pub fn synthetic_block(p: f64) -> Result<SyntheticBlock, PartitionError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PartitionError::DomainError(format!("p = {p} outside [0, 1]")));
    }
    let phi = 2.0 * p.sqrt().asin();
    let frame = cnot().compose(&ry(phi).kron(&Operator::identity(2)))?;
    let accept = Operator::diagonal_projector(4, |s| s & 1 == 1);
    let pi_out = Operator::projector(frame.adjoint().matrix() * accept.matrix() * frame.matrix())?;
    let pi_in = Operator::diagonal_projector(4, |s| s >> 1 == 0);
    let start = StateVector::zero(RegisterLayout::new([("C", 1), ("X", 1)])?);
    Ok(SyntheticBlock { pi_in, pi_out, frame, start })
}

impl SyntheticBlock {
    pub fn run<R: Rng + ?Sized>(&self, n_rounds: usize, rng: &mut R) -> Result<ExtractOutcome, PartitionError> {
        extract_with(&self.pi_in, &self.pi_out, &self.frame, &["C", "X"], "X", &self.start, n_rounds, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{PartitionContext, ProverStrategy, StrategyLayout};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `P_{k+1} = p + (1−p)²P_k + (1−p)p·P⊥_k`, `P⊥_{k+1} = (1−p) + p(1−p)P_k + p²P⊥_k`.
    fn recurrence(p: f64, n: usize) -> f64 {
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..n {
            let na = p + (1.0 - p).powi(2) * a + (1.0 - p) * p * b;
            let nb = (1.0 - p) + p * (1.0 - p) * a + p * p * b;
            (a, b) = (na, nb);
        }
        a
    }

    #[test]
    fn formula_special_values() {
        assert_eq!(ext_success_formula(0.5, 2).unwrap(), 0.75);
        for n in 1..20 {
            assert_eq!(ext_success_formula(1.0, n).unwrap(), 1.0);
            assert_eq!(ext_success_formula(0.0, n).unwrap(), 0.0);
        }
        assert!(ext_success_formula(1.2, 3).is_err());
        assert!(ext_success_formula(-0.1, 3).is_err());
        assert!(ext_success_formula(0.5, 0).is_err());
    }

    #[test]
    fn synthetic_block_has_the_requested_overlap() {
        for &p in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let b = synthetic_block(p).unwrap();
            let hit = b.start.project(&b.pi_out, &["C", "X"]).unwrap().norm_sqr();
            assert!((hit - p).abs() <= 1e-12);
        }
    }

    #[test]
    fn monte_carlo_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for &(p, n) in &[(0.5, 2), (0.3, 5), (0.1, 10)] {
            let b = synthetic_block(p).unwrap();
            let trials = 4000;
            let wins = (0..trials).filter(|_| b.run(n, &mut rng).unwrap().is_success()).count();
            let f = ext_success_formula(p, n).unwrap();
            assert!((wins as f64 / trials as f64 - f).abs() <= 0.03, "p={p} n={n}");
        }
    }

    #[test]
    fn answers_are_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let b = synthetic_block(0.4).unwrap();
        for _ in 0..500 {
            if let ExtractOutcome::Success { a, .. } = b.run(6, &mut rng).unwrap() {
                assert_eq!(a, 1);
            }
        }
    }

    #[test]
    fn zero_overlap_always_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let b = synthetic_block(0.0).unwrap();
        assert!((0..200).all(|_| b.run(10, &mut rng).unwrap() == ExtractOutcome::Failure));
    }

    #[test]
    fn eleven_line_succeeds_in_round_one() {
        let l = StrategyLayout::new(2, 1, 0).unwrap();
        let s = ProverStrategy::new(l, None, Operator::identity(l.dim()), vec![vec![true, false]; 2]).unwrap();
        let ctx = PartitionContext::new(&s, 1).unwrap();
        let line = ctx.decomposition().blocks1d.iter().find(|b| b.b == 1 && b.c == 1).unwrap();
        let psi = StateVector::from_amps(l.xz_layout().unwrap(), line.vector.rows(0, l.dim_xz()).iter().copied().collect())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        for _ in 0..100 {
            match ctx.extract(&psi, 1, &mut rng).unwrap() {
                ExtractOutcome::Success { a, round } => {
                    assert_eq!(round, 1);
                    assert!(s.accepts(1, a));
                }
                ExtractOutcome::Failure => panic!("an (11) line must pass at once"),
            }
        }
    }

    #[test]
    fn strategy_extractor_matches_blockwise_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let s = ProverStrategy::random(StrategyLayout::new(2, 1, 1).unwrap(), &mut rng);
        let ctx = PartitionContext::new(&s, 2).unwrap();
        let psi = s.initial_state().unwrap();
        let n = 3;
        let exact = ctx.ext_success_exact(&psi, n).unwrap();
        let trials = 3000;
        let mut wins = 0;
        for _ in 0..trials {
            if let ExtractOutcome::Success { a, .. } = ctx.extract(&psi, n, &mut rng).unwrap() {
                assert!(s.accepts(2, a));
                wins += 1;
            }
        }
        assert!((wins as f64 / trials as f64 - exact).abs() <= 0.035, "{wins} vs {exact}");
    }

    proptest! {
        #[test]
        fn formula_solves_recurrence(p in 0.0f64..=1.0, n in 1usize..200) {
            prop_assert!((ext_success_formula(p, n).unwrap() - recurrence(p, n)).abs() <= 1e-12);
        }
    }
}
