//! Parallel repetition of the toy protocol against the test-only cheater,
//! whose acceptance should fall as 2^-m, and the honest prover at m = 20.

use cvqc_lab::protocol::{parallel_repeat, run_protocol, toy_protocol, AdversaryStrategy, Instance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = toy_protocol(6)?;
    let trials = 50_000;
    for m in 1..=8 {
        let rep = parallel_repeat(base, m)?;
        let s = run_protocol(&rep, &AdversaryStrategy::TestOnly, &Instance::no(1), trials, m as u64)?;
        println!("m={m}  rate {:.5}  2^-m {:.5}  hadamard rounds passed {}", s.accept_rate(), 0.5f64.powi(m as i32), s.per_round[1].accepted);
    }
    let s = run_protocol(&parallel_repeat(base, 20)?, &AdversaryStrategy::Honest, &Instance::yes(2), 1000, 0)?;
    println!("honest, m=20: {:.3}", s.accept_rate());
    Ok(())
}
