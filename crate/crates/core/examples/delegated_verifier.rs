//! The delegated verifier on the insecure stub backends: one session per
//! prover behaviour, then verifier and prover cost as the time bound grows.

use cvqc_lab::effverify::{cost_report, fit_power_law, run_four_round, run_two_round_fs, BackendSuite, DelegatedInner, EffProver};
use cvqc_lab::protocol::Instance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = BackendSuite::stub();
    let inner = DelegatedInner::new(8, 4, 1 << 10, 9)?;
    let x = Instance::yes(3);
    for prover in [EffProver::Honest, EffProver::CorruptResponse, EffProver::MismatchedProof] {
        let (v4, _) = run_four_round(&suite, &inner, &x, prover, 1)?;
        let (v2, _) = run_two_round_fs(&suite, &inner, &x, prover, 1)?;
        println!("{prover:?}: four-round {v4:?}, two-round {v2:?}");
    }

    let ts: Vec<u64> = (8..=14).step_by(2).map(|k| 1 << k).collect();
    let mut verifier = Vec::new();
    println!("\n     T  verifier_ops  prover_ops  bytes");
    for &t in &ts {
        let inner = DelegatedInner::new(8, 4, t, 9)?;
        let (_, session) = run_four_round(&suite, &inner, &x, EffProver::Honest, 1)?;
        let c = cost_report(&session)?;
        println!("{t:6}  {:12}  {:10}  {}", c.verifier_ops, c.prover_ops, c.message_bytes);
        verifier.push(c.verifier_ops as f64);
    }
    let logs: Vec<f64> = ts.iter().map(|&t| (t as f64).log2()).collect();
    let (a, b) = fit_power_law(&logs, &verifier);
    println!("verifier_ops ~ {a:.1} * (log2 T)^{b:.2}");
    Ok(())
}
