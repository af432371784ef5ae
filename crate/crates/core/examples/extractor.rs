//! Alternating-measurement extraction on a single block with acceptance p,
//! sampled against the closed-form success probability.

use cvqc_lab::partition::{ext_success_formula, synthetic_block};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 20_000;
    println!("  p    N   sampled  formula");
    for p in [0.1, 0.5, 0.9] {
        let block = synthetic_block(p)?;
        for n in [1, 2, 5, 20] {
            let mut hits = 0;
            for _ in 0..trials {
                hits += block.run(n, &mut rng)?.is_success() as u32;
            }
            println!("{p:4.1} {n:3}   {:.4}   {:.4}", hits as f64 / trials as f64, ext_success_formula(p, n)?);
        }
    }
    Ok(())
}
