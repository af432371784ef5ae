use num_complex::Complex64;
use rand::Rng;

use super::{PartitionError, PartitionParams};
use crate::qsim::gates::{haar_matrix, haar_unitary, hadamard};
use crate::qsim::{CMatrix, Operator, RegisterLayout, StateVector};
use crate::tol::ATOL;

/// Register shape of an `m`-coordinate prover: one challenge qubit `C_i`
/// and an `x_bits`-wide answer register `X_i` per coordinate, plus a
/// private register `Z` of `z_bits` qubits (absent when zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyLayout {
    pub m: usize,
    pub x_bits: usize,
    pub z_bits: usize,
}

impl StrategyLayout {
    pub fn new(m: usize, x_bits: usize, z_bits: usize) -> Result<Self, PartitionError> {
        if m == 0 || x_bits == 0 {
            return Err(PartitionError::InvalidParams("need m ≥ 1 and x_bits ≥ 1".into()));
        }
        let l = Self { m, x_bits, z_bits };
        l.cxz_layout()?;
        Ok(l)
    }

    pub fn c_names(&self) -> Vec<String> {
        (1..=self.m).map(|i| format!("C{i}")).collect()
    }

    pub fn x_names(&self) -> Vec<String> {
        (1..=self.m).map(|i| format!("X{i}")).collect()
    }

    /// `X1..Xm` then `Z`.
    pub fn xz_names(&self) -> Vec<String> {
        let mut v = self.x_names();
        if self.z_bits > 0 {
            v.push("Z".into());
        }
        v
    }

    /// `C1..Cm, X1..Xm, Z`.
    pub fn cxz_names(&self) -> Vec<String> {
        let mut v = self.c_names();
        v.extend(self.xz_names());
        v
    }

    pub fn xz_layout(&self) -> Result<RegisterLayout, PartitionError> {
        let mut regs: Vec<(String, usize)> = self.x_names().into_iter().map(|n| (n, self.x_bits)).collect();
        if self.z_bits > 0 {
            regs.push(("Z".into(), self.z_bits));
        }
        Ok(RegisterLayout::new(regs)?)
    }

    pub fn cxz_layout(&self) -> Result<RegisterLayout, PartitionError> {
        let c = RegisterLayout::new(self.c_names().into_iter().map(|n| (n, 1)))?;
        Ok(c.concat(&self.xz_layout()?)?)
    }

    pub fn xz_qubits(&self) -> usize {
        self.m * self.x_bits + self.z_bits
    }

    pub fn dim_xz(&self) -> usize {
        1 << self.xz_qubits()
    }

    pub fn dim_c(&self) -> usize {
        1 << self.m
    }

    pub fn dim(&self) -> usize {
        self.dim_c() * self.dim_xz()
    }

    /// Value of `X_i` (1-based) inside an `(X, Z)` basis index.
    pub fn x_value(&self, xz: usize, i: usize) -> usize {
        let shift = (self.m - i) * self.x_bits + self.z_bits;
        (xz >> shift) & ((1 << self.x_bits) - 1)
    }
}

/// A cheating prover `(U₀, U)` with the verifier's acceptance sets.
///
/// `u0` prepares the post-commitment state `U₀|0⟩` over `(X, Z)`; the
/// commitment and key registers are folded away. `u` acts on `(C, X, Z)`
/// and must be block diagonal in `C` (the challenge is classical, so any
/// prover can be put in this form by copying `c` first).
#[derive(Debug, Clone)]
pub struct ProverStrategy {
    layout: StrategyLayout,
    u0: Option<Operator>,
    u: Operator,
    accept: Vec<Vec<bool>>,
}

impl ProverStrategy {
    pub fn new(
        layout: StrategyLayout,
        u0: Option<Operator>,
        u: Operator,
        accept: Vec<Vec<bool>>,
    ) -> Result<Self, PartitionError> {
        if u.dim() != layout.dim() {
            return Err(PartitionError::DimensionMismatch { expected: layout.dim(), found: u.dim() });
        }
        if let Some(u0) = &u0 {
            if u0.dim() != layout.dim_xz() {
                return Err(PartitionError::DimensionMismatch { expected: layout.dim_xz(), found: u0.dim() });
            }
            if crate::qsim::unitarity_residual(u0.matrix()) > ATOL {
                return Err(PartitionError::NotUnitary);
            }
        }
        if crate::qsim::unitarity_residual(u.matrix()) > ATOL {
            return Err(PartitionError::NotUnitary);
        }
        let d = layout.dim_xz();
        let m = u.matrix();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if r / d != c / d && m[(r, c)].norm() > ATOL {
                    return Err(PartitionError::NotClassicallyControlled);
                }
            }
        }
        if accept.len() != layout.m || accept.iter().any(|a| a.len() != 1 << layout.x_bits) {
            return Err(PartitionError::InvalidParams("one acceptance mask of size 2^x_bits per coordinate".into()));
        }
        Ok(Self { layout, u0, u, accept })
    }

    /// `U = Σ_c |c⟩⟨c| ⊗ U_c` from the `2^m` blocks over `(X, Z)`.
    pub fn controlled(
        layout: StrategyLayout,
        u0: Option<Operator>,
        blocks: &[CMatrix],
        accept: Vec<Vec<bool>>,
    ) -> Result<Self, PartitionError> {
        if blocks.len() != layout.dim_c() {
            return Err(PartitionError::DimensionMismatch { expected: layout.dim_c(), found: blocks.len() });
        }
        let d = layout.dim_xz();
        let mut u = CMatrix::zeros(layout.dim(), layout.dim());
        for (c, b) in blocks.iter().enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(PartitionError::DimensionMismatch { expected: d, found: b.nrows() });
            }
            u.view_mut((c * d, c * d), (d, d)).copy_from(b);
        }
        let u = Operator::unitary(u).map_err(|_| PartitionError::NotUnitary)?;
        Self::new(layout, u0, u, accept)
    }

    /// Haar-random `U₀` and blocks `U_c`; each acceptance set is a uniformly
    /// random nonempty proper subset of the answers.
    pub fn random<R: Rng + ?Sized>(layout: StrategyLayout, rng: &mut R) -> Self {
        let d = layout.dim_xz();
        let u0 = haar_unitary(d, rng);
        let blocks: Vec<CMatrix> = (0..layout.dim_c()).map(|_| haar_matrix(d, rng)).collect();
        let accept = (0..layout.m).map(|_| random_accept_set(layout.x_bits, rng)).collect();
        Self::controlled(layout, Some(u0), &blocks, accept).expect("random strategy is well formed")
    }

    pub fn layout(&self) -> StrategyLayout {
        self.layout
    }

    pub fn u(&self) -> &Operator {
        &self.u
    }

    pub fn u0(&self) -> Option<&Operator> {
        self.u0.as_ref()
    }

    /// Block `U_c` over `(X, Z)`.
    pub fn block(&self, c: usize) -> CMatrix {
        let d = self.layout.dim_xz();
        self.u.matrix().view((c * d, c * d), (d, d)).into_owned()
    }

    pub fn accepts(&self, i: usize, a: usize) -> bool {
        self.accept[i - 1][a]
    }

    pub fn accept_mask(&self, i: usize) -> &[bool] {
        &self.accept[i - 1]
    }

    /// `U₀|0⟩` over `(X, Z)`, or `|0⟩` when no `U₀` is set.
    pub fn initial_state(&self) -> Result<StateVector, PartitionError> {
        let layout = self.layout.xz_layout()?;
        let zero = StateVector::zero(layout);
        Ok(match &self.u0 {
            Some(u0) => {
                let names = self.layout.xz_names();
                let targets: Vec<&str> = names.iter().map(String::as_str).collect();
                zero.apply(u0, &targets)?
            }
            None => zero,
        })
    }

    /// `H` on every challenge qubit except `C_i`, identity on `(X, Z)`.
    pub fn hadamards_except(&self, i: usize) -> Operator {
        let h = hadamard();
        let id2 = Operator::identity(2);
        let mut op = Operator::identity(1);
        for k in 1..=self.layout.m {
            op = op.kron(if k == i { &id2 } else { &h });
        }
        op.kron(&Operator::identity(self.layout.dim_xz()))
    }

    /// `W_i = U·H_{C−i}`; `Π_{i,out} = W_i†(A_i ⊗ I)W_i`.
    pub fn frame(&self, i: usize) -> Operator {
        self.u.compose(&self.hadamards_except(i)).expect("same dimension")
    }

    /// Basis indices of `(C, X, Z)` whose `X_i` value is accepted.
    pub fn accepted_indices(&self, i: usize) -> Vec<usize> {
        let d = self.layout.dim_xz();
        (0..self.layout.dim()).filter(|s| self.accepts(i, self.layout.x_value(s % d, i))).collect()
    }

    /// Orthonormal bases of the ranges of `Π_in` and `Π_{i,out}`, in closed
    /// form: the `C = 0` sector, and `W_i†` applied to accepted basis states.
    pub fn projector_ranges(&self, i: usize) -> (CMatrix, CMatrix) {
        let (n, d) = (self.layout.dim(), self.layout.dim_xz());
        let mut v0 = CMatrix::zeros(n, d);
        for k in 0..d {
            v0[(k, k)] = Complex64::new(1.0, 0.0);
        }
        let w_dag = self.frame(i).adjoint().into_matrix();
        let v1 = w_dag.select_columns(self.accepted_indices(i).iter());
        (v0, v1)
    }

    /// Probability that measuring `X_i` of `U|c⟩|ψ⟩` lands in `Acc_i`, with
    /// `ψ` renormalized.
    pub fn test_round_acceptance(&self, i: usize, c: usize, psi: &StateVector) -> Result<f64, PartitionError> {
        let psi = psi.normalized()?;
        let out = &self.block(c) * nalgebra::DVector::from_column_slice(psi.amps());
        let d = self.layout.dim_xz();
        Ok((0..d).filter(|&s| self.accepts(i, self.layout.x_value(s, i))).map(|s| out[s].norm_sqr()).sum())
    }
}

fn random_accept_set<R: Rng + ?Sized>(x_bits: usize, rng: &mut R) -> Vec<bool> {
    let n = 1 << x_bits;
    loop {
        let mask: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let k = mask.iter().filter(|&&b| b).count();
        if k > 0 && k < n {
            return mask;
        }
    }
}

/// `Π_in = |0^m⟩⟨0^m|_C ⊗ I` and `Π_{i,out} = (U·H_{C−i})†(A_i ⊗ I)(U·H_{C−i})`
/// over `(C, X, Z)`, with `A_i` the projector onto accepted `X_i` values.
pub fn build_projectors(
    strategy: &ProverStrategy,
    params: &PartitionParams,
) -> Result<(Operator, Operator), PartitionError> {
    let l = strategy.layout();
    if params.m != l.m {
        return Err(PartitionError::DimensionMismatch { expected: l.m, found: params.m });
    }
    let i = params.i;
    let d = l.dim_xz();
    let pi_in = Operator::diagonal_projector(l.dim(), |s| s < d);
    let accept = Operator::diagonal_projector(l.dim(), |s| strategy.accepts(i, l.x_value(s % d, i)));
    let w = strategy.frame(i);
    let m = w.adjoint().matrix() * accept.matrix() * w.matrix();
    let pi_out = Operator::projector(m)?;
    Ok((pi_in, pi_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::EstimationMode;
    use crate::qsim::projector_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(m: usize, i: usize) -> PartitionParams {
        PartitionParams::new(m, i, 1.0, 4, 1, EstimationMode::Ideal).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.camax()
    }

    #[test]
    fn layout_names_and_values() {
        let l = StrategyLayout::new(2, 2, 1).unwrap();
        assert_eq!(l.cxz_names(), ["C1", "C2", "X1", "X2", "Z"]);
        assert_eq!(l.dim(), 128);
        // X1 = 10, X2 = 01, Z = 1
        #[allow(clippy::unusual_byte_groupings)]
        let xz = 0b10_01_1;
        assert_eq!(l.x_value(xz, 1), 0b10);
        assert_eq!(l.x_value(xz, 2), 0b01);
        assert!(StrategyLayout::new(0, 1, 0).is_err());
        assert!(StrategyLayout::new(4, 4, 3).is_err());
    }

    #[test]
    fn single_coordinate_identity_strategy() {
        let l = StrategyLayout::new(1, 1, 1).unwrap();
        let u = Operator::identity(l.dim());
        let s = ProverStrategy::new(l, None, u, vec![vec![true, false]]).unwrap();
        let (pi_in, pi_out) = build_projectors(&s, &params(1, 1)).unwrap();
        // I_C ⊗ |0⟩⟨0|_X ⊗ I_Z
        let expected = Operator::diagonal_projector(8, |s| (s >> 1) & 1 == 0);
        assert!(max_abs(&(pi_out.matrix() - expected.matrix())) <= 1e-12);
        let expected_in = Operator::diagonal_projector(8, |s| s >> 2 == 0);
        assert_eq!(pi_in.matrix(), expected_in.matrix());
    }

    #[test]
    fn accepting_everything_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = StrategyLayout::new(2, 1, 1).unwrap();
        let r = ProverStrategy::random(l, &mut rng);
        let s = ProverStrategy::new(l, None, r.u().clone(), vec![vec![true, true]; 2]).unwrap();
        let (_, pi_out) = build_projectors(&s, &params(2, 2)).unwrap();
        assert!(max_abs(&(pi_out.matrix() - CMatrix::identity(32, 32))) <= 1e-12);
    }

    #[test]
    fn random_projectors_are_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=3 {
            let s = ProverStrategy::random(StrategyLayout::new(m, 1, 1).unwrap(), &mut rng);
            for i in 1..=m {
                let (pi_in, pi_out) = build_projectors(&s, &params(m, i)).unwrap();
                assert!(projector_residual(pi_out.matrix()) <= 1e-9);
                assert!(projector_residual(pi_in.matrix()) <= 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_ranges_match_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = ProverStrategy::random(StrategyLayout::new(2, 1, 1).unwrap(), &mut rng);
        let (pi_in, pi_out) = build_projectors(&s, &params(2, 1)).unwrap();
        let (v0, v1) = s.projector_ranges(1);
        assert!(max_abs(&(&v0 * v0.adjoint() - pi_in.matrix())) <= 1e-12);
        assert!(max_abs(&(&v1 * v1.adjoint() - pi_out.matrix())) <= 1e-12);
    }

    #[test]
    fn non_controlled_unitary_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = StrategyLayout::new(2, 1, 0).unwrap();
        let u = haar_unitary(l.dim(), &mut rng);
        assert_eq!(
            ProverStrategy::new(l, None, u, vec![vec![true, false]; 2]).unwrap_err(),
            PartitionError::NotClassicallyControlled
        );
    }

    // ⟨0^m ψ|Π_{i,out}|0^m ψ⟩ is the test-round acceptance averaged over c₋ᵢ
    #[test]
    fn out_projector_averages_over_other_challenges() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let l = StrategyLayout::new(3, 1, 1).unwrap();
        let s = ProverStrategy::random(l, &mut rng);
        let psi = s.initial_state().unwrap();
        for i in 1..=3 {
            let (_, pi_out) = build_projectors(&s, &params(3, i)).unwrap();
            let full = StateVector::zero(RegisterLayout::new(s.layout().c_names().into_iter().map(|n| (n, 1))).unwrap())
                .tensor(&psi)
                .unwrap();
            let names = l.cxz_names();
            let targets: Vec<&str> = names.iter().map(String::as_str).collect();
            let lhs = full.project(&pi_out, &targets).unwrap().norm_sqr();
            let bit = 1 << (l.m - i);
            let cs: Vec<usize> = (0..l.dim_c()).filter(|c| c & bit == 0).collect();
            let rhs: f64 = cs.iter().map(|&c| s.test_round_acceptance(i, c, &psi).unwrap()).sum::<f64>() / cs.len() as f64;
            assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
        }
    }
}
