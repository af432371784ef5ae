//! Dense statevector engine with named registers.
//!
//! States are plain amplitude vectors over an ordered list of registers.
//! Operators are addressed to registers by name, so multi-register
//! bookkeeping (for example `C, X, Z, ph, th, in`) stays explicit.

pub mod gates;
mod layout;
mod operator;
mod state;

pub use layout::RegisterLayout;
pub use operator::{hermitian_residual, projector_residual, unitarity_residual, CMatrix, Operator, OperatorKind};
pub use state::{bitstring, Measurement, StateVector};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("layout needs {requested} qubits, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("register `{0}` listed twice")]
    DuplicateRegister(String),
    #[error("states live on different layouts")]
    LayoutMismatch,
    #[error("operator is not a projector")]
    NotAProjector,
    #[error("operator is not unitary")]
    NotUnitary,
    #[error("map is not a permutation of the register values")]
    NotAPermutation,
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("state has zero norm")]
    ZeroState,
    #[error("snapshot: {0}")]
    Snapshot(String),
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn one(name: &str) -> RegisterLayout {
        RegisterLayout::new([(name, 1)]).unwrap()
    }

    fn plus(name: &str) -> StateVector {
        StateVector::from_amps(one(name), vec![Complex64::new(H, 0.0); 2]).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = StateVector::basis(one("a"), 0);
        let b = StateVector::basis(one("b"), 1);
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.amps()[1], Complex64::new(1.0, 0.0));
        assert_eq!(ab.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_is_linear() {
        let ab = plus("a").tensor(&StateVector::zero(one("b"))).unwrap();
        let re: Vec<f64> = ab.amps().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![H, 0.0, H, 0.0]);
    }

    #[test]
    fn tensor_respects_cap() {
        let a = StateVector::zero(RegisterLayout::new([("a", 12)]).unwrap());
        let b = StateVector::zero(RegisterLayout::new([("b", 9)]).unwrap());
        assert!(matches!(a.tensor(&b), Err(QsimError::CapExceeded { .. })));
    }

    #[test]
    fn tensor_norms_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_state(RegisterLayout::new([("a", 2)]).unwrap(), &mut rng).scaled(Complex64::new(0.7, 0.0));
        let b = random_state(one("b"), &mut rng).scaled(Complex64::new(0.0, 1.3));
        let ab = a.tensor(&b).unwrap();
        assert!((ab.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn pauli_x_flips_register() {
        let l = RegisterLayout::new([("C", 1), ("X", 1)]).unwrap();
        let s = StateVector::zero(l).apply(&pauli_x(), &["C"]).unwrap();
        assert_eq!(s.layout().extract(s.amps().iter().position(|a| a.norm() > 0.5).unwrap(), "C").unwrap(), 1);
    }

    #[test]
    fn identity_is_bitwise_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(RegisterLayout::new([("a", 2), ("b", 1)]).unwrap(), &mut rng);
        assert_eq!(s.apply(&Operator::identity(4), &["a"]).unwrap(), s);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(RegisterLayout::new([("q0", 1), ("q1", 1)]).unwrap(), &mut rng);
        let back = s.apply(&hadamard(), &["q0"]).unwrap().apply(&hadamard(), &["q0"]).unwrap();
        assert!(back.max_diff(&s).unwrap() <= 1e-12);
    }

    #[test]
    fn apply_rejects_bad_targets() {
        let s = StateVector::zero(one("a"));
        assert!(matches!(s.apply(&hadamard(), &["nope"]), Err(QsimError::UnknownRegister(_))));
        assert!(matches!(s.apply(&cnot(), &["a"]), Err(QsimError::DimensionMismatch { .. })));
    }

    #[test]
    fn register_order_of_operator_matches_listing() {
        let l = RegisterLayout::new([("a", 1), ("b", 1)]).unwrap();
        // control listed first: b controls a
        let s = StateVector::basis_from(l, &[("b", 1)]).unwrap().apply(&cnot(), &["b", "a"]).unwrap();
        assert_eq!(s.amps()[0b11], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn projection_does_not_renormalize() {
        let p = Operator::diagonal_projector(2, |i| i == 0);
        let s = plus("a").project(&p, &["a"]).unwrap();
        assert!((s.amps()[0].re - H).abs() < 1e-15);
        assert_eq!(s.amps()[1], Complex64::new(0.0, 0.0));
        assert!((s.norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(plus("a").project(&Operator::diagonal_projector(2, |_| true), &["a"]).unwrap(), plus("a"));
        assert!(matches!(plus("a").project(&hadamard(), &["a"]), Err(QsimError::NotAProjector)));
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_projector(4, 2, &mut rng);
        let s = random_state(RegisterLayout::new([("a", 2), ("b", 1)]).unwrap(), &mut rng);
        let once = s.project(&p, &["a"]).unwrap();
        let twice = once.project(&p, &["a"]).unwrap();
        assert!(once.max_diff(&twice).unwrap() <= 1e-12);
    }

    #[test]
    fn deterministic_measurement() {
        let l = RegisterLayout::new([("r", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = StateVector::basis(l, 0b01).measure("r", &mut rng).unwrap();
        assert_eq!(m.bitstring(), "01");
        assert_eq!(m.prob, 1.0);
    }

    #[test]
    fn measurement_frequency_follows_born_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = plus("a");
        let ones = (0..100_000).filter(|_| s.measure("a", &mut rng).unwrap().outcome == 1).count();
        assert!((ones as f64 / 1e5 - 0.5).abs() <= 0.01);
    }

    #[test]
    fn measurement_collapses_entanglement() {
        let l = RegisterLayout::new([("a", 1), ("b", 1)]).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[0] = Complex64::new(H, 0.0);
        amps[3] = Complex64::new(H, 0.0);
        let bell = StateVector::from_amps(l.clone(), amps).unwrap();
        let post = bell.collapse("a", 0).unwrap();
        assert!(post.max_diff(&StateVector::basis(l, 0)).unwrap() < 1e-15);
    }

    #[test]
    fn zero_state_cannot_be_measured() {
        let s = StateVector::zero(one("a")).scaled(Complex64::new(0.0, 0.0));
        assert!(matches!(s.measure("a", &mut ChaCha8Rng::seed_from_u64(0)), Err(QsimError::ZeroState)));
    }

    #[test]
    fn classical_permutation_and_restriction() {
        let l = RegisterLayout::new([("a", 2), ("b", 1)]).unwrap();
        let s = StateVector::basis_from(l, &[("a", 1)]).unwrap();
        let t = s.apply_classical(&["a", "b"], |v| (v + 3) % 8).unwrap();
        assert_eq!(t.layout().extract(t.amps().iter().position(|z| z.norm() > 0.5).unwrap(), "a").unwrap(), 2);
        assert!(matches!(s.apply_classical(&["a"], |_| 0), Err(QsimError::NotAPermutation)));
        let r = t.restrict(&[("a", 2)]).unwrap();
        assert_eq!(r.layout().registers(), &[("b".to_string(), 1)]);
        assert_eq!(r.amps()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_state(RegisterLayout::new([("C", 1), ("X", 2)]).unwrap(), &mut rng);
        assert_eq!(StateVector::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn operator_kinds_are_checked() {
        let m = CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(Operator::unitary(m.clone()), Err(QsimError::NotUnitary)));
        assert!(matches!(Operator::projector(m.clone()), Err(QsimError::NotAProjector)));
        assert!(Operator::general(m).is_ok());
        assert!(Operator::general(CMatrix::zeros(3, 3)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unitaries_preserve_norm(seed in any::<u64>(), scale in 0.1f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = RegisterLayout::new([("a", 2), ("b", 2)]).unwrap();
            let s = random_state(l, &mut rng).scaled(Complex64::new(scale, 0.0));
            let u = haar_unitary(16, &mut rng);
            let out = s.apply(&u, &["b", "a"]).unwrap();
            prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() <= 1e-9);
        }

        #[test]
        fn projections_never_increase_norm(seed in any::<u64>(), rank in 0usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = RegisterLayout::new([("a", 2), ("b", 1)]).unwrap();
            let s = random_state(l, &mut rng);
            let p = random_projector(4, rank, &mut rng);
            prop_assert!(s.project(&p, &["a"]).unwrap().norm_sqr() <= s.norm_sqr() + 1e-12);
        }

        #[test]
        fn born_probabilities_sum_to_one(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = RegisterLayout::new([("a", 2), ("b", 2)]).unwrap();
            let s = random_state(l, &mut rng).scaled(Complex64::new(0.3, 0.4));
            let total: f64 = s.probabilities(&["b"]).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }
}
