//! Fiat-Shamir over ten parallel copies: honest completeness, and a grinder
//! that re-commits until the derived challenge is all zeros.

use cvqc_lab::protocol::{
    fiat_shamir, grinding_success, parallel_repeat, run_protocol, toy_protocol, AdversaryStrategy, Instance, OracleTable,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 10;
    let fs = fiat_shamir(parallel_repeat(toy_protocol(6)?, m)?, OracleTable::new(42, m)?)?;
    let honest = run_protocol(&fs, &AdversaryStrategy::Honest, &Instance::yes(1), 500, 1)?;
    println!("honest: {:.3}", honest.accept_rate());

    for q in [1, 16, 128, 1024] {
        let adv = AdversaryStrategy::FsGrinder { query_budget: q, inner: Box::new(AdversaryStrategy::TestOnly) };
        let s = run_protocol(&fs, &adv, &Instance::no(2), 4000, q as u64)?;
        println!(
            "q={q:5}  rate {:.4}  1-(1-2^-m)^q {:.4}  mean queries {:.1}",
            s.accept_rate(),
            grinding_success(m, q),
            s.queries as f64 / s.trials as f64
        );
    }
    Ok(())
}
