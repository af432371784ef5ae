//! Bell pair on named registers, a measurement, and a JSON snapshot.

use cvqc_lab::qsim::gates::{cnot, hadamard};
use cvqc_lab::qsim::{RegisterLayout, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = RegisterLayout::new([("a", 1), ("b", 1)])?;
    let psi = StateVector::zero(layout).apply(&hadamard(), &["a"])?.apply(&cnot(), &["a", "b"])?;
    println!("P(a, b) = {:?}", psi.probabilities(&["a", "b"])?);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = psi.measure("a", &mut rng)?;
    println!("measured a = {} (p = {:.2}); b now reads {:?}", m.outcome, m.prob, m.post.probabilities(&["b"])?);

    let snap = psi.to_json();
    assert_eq!(StateVector::from_json(&snap)?.max_diff(&psi)?, 0.0);
    println!("{snap}");
    Ok(())
}
