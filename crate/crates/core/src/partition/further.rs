use num_complex::Complex64;
use rand::Rng;

use super::{PartitionContext, PartitionError, PartitionOutcome, PartitionParams, ProverStrategy};
use crate::qsim::StateVector;
use crate::tol::ZERO_STATE;

/// `ψ = ψ_{c₁} + ψ_{c̄₁c₂} + … + ψ_{c̄₁…c̄_{m−1}c_m} + ψ_{c̄₁…c̄_m} + ψ_err`.
#[derive(Debug, Clone)]
pub struct FurtherOutcome {
    /// `branches[i−1] = ψ_{c̄₁…c̄_{i−1}c_i}`.
    pub branches: Vec<StateVector>,
    /// `ψ_{c̄₁…c̄_m}`.
    pub remainder: StateVector,
    /// Per-step `ψ_err,i`.
    pub errs: Vec<StateVector>,
    pub psi_err: StateVector,
}

impl FurtherOutcome {
    /// Max amplitude gap between `ψ` and the sum of all parts.
    pub fn reconstruction_residual(&self, psi: &StateVector) -> Result<f64, PartitionError> {
        let mut sum = self.remainder.add(&self.psi_err)?;
        for b in &self.branches {
            sum = sum.add(b)?;
        }
        Ok(sum.max_diff(psi)?)
    }
}

#[derive(Debug, Clone)]
pub enum HOutcome {
    /// Outcome `0^t c_i 1` at step `stop_index` (1-based); `state` is the
    /// renormalised `(X, Z)` register.
    Halt { state: StateVector, stop_index: usize },
    /// A label other than `0^t b 1` at step `step`.
    Abort { step: usize },
    /// Every step read `0^t c̄_i 1`.
    Remainder { state: StateVector },
}

/// One [`PartitionContext`] per coordinate, for the sequential partition and
/// the sampling procedure `H_{γ̂,c}`.
#[derive(Debug, Clone)]
pub struct SequentialPartition {
    contexts: Vec<PartitionContext>,
}

impl SequentialPartition {
    pub fn new(strategy: &ProverStrategy) -> Result<Self, PartitionError> {
        let m = strategy.layout().m;
        let contexts = (1..=m).map(|i| PartitionContext::new(strategy, i)).collect::<Result<_, _>>()?;
        Ok(Self { contexts })
    }

    pub fn m(&self) -> usize {
        self.contexts.len()
    }

    pub fn context(&self, i: usize) -> &PartitionContext {
        &self.contexts[i - 1]
    }

    fn check(&self, params: &[PartitionParams], c: &[u8]) -> Result<(), PartitionError> {
        let m = self.m();
        if params.len() != m || c.len() != m {
            return Err(PartitionError::InvalidParams(format!("need {m} parameter sets and challenge bits")));
        }
        if c.iter().any(|&b| b > 1) {
            return Err(PartitionError::InvalidParams("challenge bits must be 0 or 1".into()));
        }
        Ok(())
    }

    /// Applies the partition for `i = 1..m` in turn, each time to the
    /// `c̄_i` branch of the previous step.
    pub fn partition_further(
        &self,
        params: &[PartitionParams],
        c: &[u8],
        psi: &StateVector,
    ) -> Result<FurtherOutcome, PartitionError> {
        self.check(params, c)?;
        let mut cur = psi.clone();
        let mut branches = Vec::with_capacity(self.m());
        let mut errs = Vec::with_capacity(self.m());
        let mut psi_err = psi.scaled(Complex64::new(0.0, 0.0));
        for (k, ctx) in self.contexts.iter().enumerate() {
            let out = ctx.run_g(&params[k], &cur)?;
            branches.push(out.branch(c[k]).clone());
            psi_err = psi_err.add(&out.psi_err)?;
            errs.push(out.psi_err.clone());
            cur = out.branch(1 - c[k]).clone();
        }
        Ok(FurtherOutcome { branches, remainder: cur, errs, psi_err })
    }

    /// Samples `H_{γ̂,c}` on `ψ/‖ψ‖`: at step `i` the `(ph_i, th_i, in_i)`
    /// measurement reads `0^t c_i 1` with probability `‖ψ_{c_i}‖²`, `0^t c̄_i 1`
    /// with probability `‖ψ_{c̄_i}‖²`, and anything else otherwise.
    pub fn run_h<R: Rng + ?Sized>(
        &self,
        params: &[PartitionParams],
        c: &[u8],
        psi: &StateVector,
        rng: &mut R,
    ) -> Result<HOutcome, PartitionError> {
        self.check(params, c)?;
        let mut cur = psi.normalized()?;
        for (k, ctx) in self.contexts.iter().enumerate() {
            let out: PartitionOutcome = ctx.run_g(&params[k], &cur)?;
            let stay = out.branch(c[k]);
            let go = out.branch(1 - c[k]);
            let (p_stay, p_go) = (stay.norm_sqr(), go.norm_sqr());
            let r: f64 = rng.gen();
            if r < p_stay {
                if p_stay <= ZERO_STATE {
                    return Err(PartitionError::ZeroState);
                }
                return Ok(HOutcome::Halt { state: stay.normalized()?, stop_index: k + 1 });
            }
            if r < p_stay + p_go {
                if p_go <= ZERO_STATE {
                    return Err(PartitionError::ZeroState);
                }
                cur = go.normalized()?;
                continue;
            }
            return Ok(HOutcome::Abort { step: k + 1 });
        }
        Ok(HOutcome::Remainder { state: cur })
    }
}
