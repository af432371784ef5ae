//! One application of the partition procedure across the threshold grid,
//! with the grid-averaged error and the per-point branch weights.

use cvqc_lab::partition::{
    claim1_grid_average, claim3_average, claim4_max_acceptance, EstimationMode, PartitionContext, PartitionParams,
    ProverStrategy, StrategyLayout,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (m, i, big_t) = (3, 2, 16);
    let strategy = ProverStrategy::random(StrategyLayout::new(m, 1, 0)?, &mut ChaCha8Rng::seed_from_u64(11));
    let psi = strategy.initial_state()?;
    let ctx = PartitionContext::new(&strategy, i)?;
    let base = PartitionParams::new(m, i, 1.0, big_t, 1, EstimationMode::Ideal)?;

    println!(" j  gamma   |psi0|^2  |psi1|^2  |err|^2   worst test-round acceptance of psi0");
    for j in 1..=big_t {
        let p = base.with_gamma_index(j)?;
        let out = ctx.run_g(&p, &psi)?;
        let acc = claim4_max_acceptance(&ctx, &out)?.map_or("-".to_string(), |a| format!("{a:.4} <= {:.4}", 4.0 * p.gamma));
        let (b0, b1, _) = out.branch_probs;
        println!("{j:2}  {:.4}  {b0:.5}   {b1:.5}   {:.2e}  {acc}", p.gamma, out.psi_err.norm_sqr());
        assert!(claim3_average(&out) <= 0.5 + 1e-9);
    }
    let avg = claim1_grid_average(&ctx, &base, &psi)?;
    println!("E_gamma |psi_err|^2 = {avg:.3e} (bound 6/T = {:.4})", 6.0 / big_t as f64);

    let kernel = PartitionParams::new(m, i, 1.0, big_t, big_t / 2, EstimationMode::Kernel)?;
    let out = ctx.run_g(&kernel, &psi)?;
    println!("kernel mode at gamma = {}: branch weights {:?}", kernel.gamma, out.branch_probs);
    Ok(())
}
