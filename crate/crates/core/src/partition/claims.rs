//! Numeric checks of the partition lemmas' claims.

use serde::Serialize;

use super::{PartitionContext, PartitionError, PartitionOutcome, PartitionParams, SequentialPartition};
use crate::qsim::{Operator, StateVector};
use crate::tol::ZERO_BRANCH;

/// One experiment record; the CSV columns of partition sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimRow {
    pub seed: u64,
    pub m: usize,
    pub i: usize,
    pub gamma0: f64,
    #[serde(rename = "T")]
    pub big_t: usize,
    pub gamma: f64,
    pub mode: String,
    pub norm_psi0: f64,
    pub norm_psi1: f64,
    pub norm_err: f64,
    pub claim_id: String,
    pub bound: f64,
    pub measured: f64,
}

/// `E_γ[‖ψ_err‖²]` over the whole grid `γ = γ₀j/T`.
pub fn claim1_grid_average(
    ctx: &PartitionContext,
    base: &PartitionParams,
    psi: &StateVector,
) -> Result<f64, PartitionError> {
    let mut total = 0.0;
    for j in 1..=base.big_t {
        total += ctx.run_g(&base.with_gamma_index(j)?, psi)?.psi_err.norm_sqr();
    }
    Ok(total / base.big_t as f64)
}

/// `E_b[‖ψ_b‖²]`.
pub fn claim3_average(out: &PartitionOutcome) -> f64 {
    (out.branch_probs.0 + out.branch_probs.1) / 2.0
}

/// Largest test-round acceptance of `U|c⟩ψ₀/‖ψ₀‖` over every `c` with
/// `c_i = 0`; `None` when `ψ₀` is numerically zero.
pub fn claim4_max_acceptance(ctx: &PartitionContext, out: &PartitionOutcome) -> Result<Option<f64>, PartitionError> {
    if out.psi0.norm_sqr().sqrt() < ZERO_BRANCH {
        return Ok(None);
    }
    let s = ctx.strategy();
    let l = s.layout();
    let i = ctx.coordinate();
    let bit = 1 << (l.m - i);
    let mut worst: f64 = 0.0;
    for c in (0..l.dim_c()).filter(|c| c & bit == 0) {
        worst = worst.max(s.test_round_acceptance(i, c, &out.psi0)?);
    }
    Ok(Some(worst))
}

/// `E_c[‖ψ_{c̄₁…c̄_m}‖²]` over all `2^m` challenges.
pub fn further_claim3_average(
    seq: &SequentialPartition,
    params: &[PartitionParams],
    psi: &StateVector,
) -> Result<f64, PartitionError> {
    let m = seq.m();
    let mut total = 0.0;
    for c in 0..1usize << m {
        let bits: Vec<u8> = (0..m).map(|k| ((c >> (m - 1 - k)) & 1) as u8).collect();
        total += seq.partition_further(params, &bits, psi)?.remainder.norm_sqr();
    }
    Ok(total / (1usize << m) as f64)
}

/// `E_γ̂[‖ψ_err‖²]` over all `T^m` threshold tuples for a fixed `c`.
pub fn further_claim4_average(
    seq: &SequentialPartition,
    base: &[PartitionParams],
    c: &[u8],
    psi: &StateVector,
) -> Result<f64, PartitionError> {
    let m = seq.m();
    if base.len() != m {
        return Err(PartitionError::InvalidParams(format!("need {m} parameter sets")));
    }
    let big_t = base[0].big_t;
    let count = big_t.pow(m as u32);
    let mut total = 0.0;
    for idx in 0..count {
        let mut rest = idx;
        let mut params = Vec::with_capacity(m);
        for p in base {
            params.push(p.with_gamma_index(rest % big_t + 1)?);
            rest /= big_t;
        }
        total += seq.partition_further(&params, c, psi)?.psi_err.norm_sqr();
    }
    Ok(total / count as f64)
}

/// `m·Σ‖ψ_i‖²·Pr[M on ψ_i/‖ψ_i‖] − Pr[M on Σψ_i]`, which the Cauchy–Schwarz
/// bound says is nonnegative for a normalized sum.
pub fn cauchy_schwarz_slack(parts: &[StateVector], proj: &Operator, targets: &[&str]) -> Result<f64, PartitionError> {
    let first = parts.first().ok_or_else(|| PartitionError::InvalidParams("no parts".into()))?;
    let mut sum = first.scaled(num_complex::Complex64::new(0.0, 0.0));
    let mut rhs = 0.0;
    for p in parts {
        sum = sum.add(p)?;
        // ‖ψ_i‖²·Pr[M on ψ_i/‖ψ_i‖] = ‖Mψ_i‖²
        rhs += p.project(proj, targets)?.norm_sqr();
    }
    let lhs = sum.project(proj, targets)?.norm_sqr() / sum.norm_sqr();
    Ok(parts.len() as f64 * rhs - lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{EstimationMode, ProverStrategy, StrategyLayout};
    use crate::qsim::gates::{random_projector, random_state};
    use crate::qsim::RegisterLayout;
    use crate::tol::TEST_ROUND;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn claims_on_random_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for m in 1..=3 {
            let s = ProverStrategy::random(StrategyLayout::new(m, 1, 1).unwrap(), &mut rng);
            let psi = s.initial_state().unwrap();
            for i in 1..=m {
                let ctx = PartitionContext::new(&s, i).unwrap();
                let base = PartitionParams::new(m, i, 0.5, 8, 1, EstimationMode::Ideal).unwrap();
                assert!(claim1_grid_average(&ctx, &base, &psi).unwrap() <= 6.0 / 8.0 + 0.02);
                for j in 1..=8 {
                    let p = base.with_gamma_index(j).unwrap();
                    let out = ctx.run_g(&p, &psi).unwrap();
                    assert!(claim3_average(&out) <= 0.5 * psi.norm_sqr() + 1e-9);
                    if let Some(acc) = claim4_max_acceptance(&ctx, &out).unwrap() {
                        let bound = 2f64.powi(m as i32 - 1) * p.gamma + TEST_ROUND;
                        assert!(acc <= bound, "m={m} i={i} j={j}: {acc} > {bound}");
                    }
                }
            }
        }
    }

    // the per-c acceptance of ψ₀ averages to ⟨Π_out⟩ ≤ γ; a single c can
    // reach up to 2^{m−1} times that, so check the average bound as well
    #[test]
    fn averaged_test_round_is_below_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let s = ProverStrategy::random(StrategyLayout::new(3, 1, 0).unwrap(), &mut rng);
        let psi = s.initial_state().unwrap();
        let ctx = PartitionContext::new(&s, 2).unwrap();
        for j in 1..=6 {
            let p = PartitionParams::new(3, 2, 1.0, 6, j, EstimationMode::Ideal).unwrap();
            let out = ctx.run_g(&p, &psi).unwrap();
            if out.psi0.norm_sqr() < 1e-12 {
                continue;
            }
            let cs: Vec<usize> = (0..8).filter(|c| c & 0b010 == 0).collect();
            let avg: f64 =
                cs.iter().map(|&c| s.test_round_acceptance(2, c, &out.psi0).unwrap()).sum::<f64>() / cs.len() as f64;
            assert!(avg <= p.gamma + 1e-9);
        }
    }

    #[test]
    fn further_claims_small_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let s = ProverStrategy::random(StrategyLayout::new(2, 1, 1).unwrap(), &mut rng);
        let seq = SequentialPartition::new(&s).unwrap();
        let psi = s.initial_state().unwrap();
        let base: Vec<_> = (1..=2).map(|i| PartitionParams::new(2, i, 1.0, 4, 2, EstimationMode::Ideal).unwrap()).collect();
        assert!(further_claim3_average(&seq, &base, &psi).unwrap() <= 0.25 + 1e-9);
        assert!(further_claim4_average(&seq, &base, &[0, 1], &psi).unwrap() <= 6.0 * 4.0 / 4.0 + 0.05);
    }

    #[test]
    fn cauchy_schwarz_is_tight_for_one_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let l = RegisterLayout::new([("a", 2)]).unwrap();
        let psi = random_state(l, &mut rng);
        let p = random_projector(4, 2, &mut rng);
        assert!(cauchy_schwarz_slack(&[psi], &p, &["a"]).unwrap().abs() <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cauchy_schwarz_never_negative(seed in any::<u64>(), m in 1usize..=6, rank in 0usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = RegisterLayout::new([("a", 3)]).unwrap();
            let psi = random_state(l.clone(), &mut rng);
            let mut parts: Vec<StateVector> = (0..m - 1)
                .map(|_| random_state(l.clone(), &mut rng).scaled(Complex64::new(rng.gen_range(0.0..0.5), 0.0)))
                .collect();
            let mut last = psi.clone();
            for p in &parts {
                last = last.sub(p).unwrap();
            }
            parts.push(last);
            let proj = random_projector(8, rank, &mut rng);
            prop_assert!(cauchy_schwarz_slack(&parts, &proj, &["a"]).unwrap() >= -1e-9);
        }
    }
}
