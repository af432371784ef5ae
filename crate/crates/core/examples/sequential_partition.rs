//! The sequential partition over all coordinates: a branch per challenge,
//! the remainder, and the sampled procedure that halts on the first branch.

use cvqc_lab::partition::{
    further_claim3_average, EstimationMode, HOutcome, PartitionParams, ProverStrategy, SequentialPartition,
    StrategyLayout,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let strategy = ProverStrategy::random(StrategyLayout::new(m, 1, 0)?, &mut rng);
    let seq = SequentialPartition::new(&strategy)?;
    let psi = strategy.initial_state()?;
    let params: Vec<_> =
        (1..=m).map(|i| PartitionParams::new(m, i, 1.0, 8, 4, EstimationMode::Ideal)).collect::<Result<_, _>>()?;

    let c = [1u8, 0, 1];
    let out = seq.partition_further(&params, &c, &psi)?;
    for (k, b) in out.branches.iter().enumerate() {
        println!("branch {}: |psi|^2 = {:.5}", k + 1, b.norm_sqr());
    }
    println!("remainder {:.5}, error {:.2e}", out.remainder.norm_sqr(), out.psi_err.norm_sqr());
    println!("reconstruction residual {:.1e}", out.reconstruction_residual(&psi)?);
    println!("E_c |remainder|^2 = {:.5} <= 2^-m = {}", further_claim3_average(&seq, &params, &psi)?, 0.5f64.powi(m as i32));

    let (mut halts, mut aborts, mut rest) = (0, 0, 0);
    for _ in 0..1000 {
        match seq.run_h(&params, &c, &psi, &mut rng)? {
            HOutcome::Halt { .. } => halts += 1,
            HOutcome::Abort { .. } => aborts += 1,
            HOutcome::Remainder { .. } => rest += 1,
        }
    }
    println!("sampled H over 1000 runs: halt {halts}, abort {aborts}, remainder {rest}");
    Ok(())
}
