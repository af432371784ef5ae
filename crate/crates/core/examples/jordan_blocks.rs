//! Decompose two random projectors into rotation blocks and invariant lines,
//! then rebuild both projectors and `Q = R₁R₀` from the blocks.

use cvqc_lab::jordan::{decompose_matrices, eigenphase_residual, reconstruct_residuals};
use cvqc_lab::qsim::gates::random_projector_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (p0, p1) = (random_projector_matrix(7, 3, &mut rng), random_projector_matrix(7, 4, &mut rng));
    let dec = decompose_matrices(&p0, &p1)?;

    for (k, b) in dec.blocks2d.iter().enumerate() {
        println!("2-D block {k}: theta = {:.4}, p = {:.4}", b.theta, b.p);
    }
    for b in &dec.blocks1d {
        println!("1-D line in (Pi0 = {}, Pi1 = {}): phase {:.4}", b.b, b.c, b.phase());
    }
    let r = reconstruct_residuals(&dec, &p0, &p1);
    println!("residuals: P0 {:.1e}, P1 {:.1e}, Q {:.1e}", r.max_p0, r.max_p1, r.max_q);
    println!("eigenphases vs dense eigensolve: {:.1e}", eigenphase_residual(&dec, &p0, &p1));
    Ok(())
}
