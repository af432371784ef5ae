//! Common gates and random instances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, Operator, OperatorKind, RegisterLayout, StateVector};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_x() -> Operator {
    Operator::new(DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]), OperatorKind::Unitary)
        .expect("pauli x")
}

pub fn pauli_z() -> Operator {
    Operator::new(DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]), OperatorKind::Unitary)
        .expect("pauli z")
}

pub fn hadamard() -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Operator::new(DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]), OperatorKind::Unitary).expect("hadamard")
}

/// `H^{⊗n}`; for `n = 0` the 1×1 identity.
pub fn hadamard_n(n: usize) -> Operator {
    (0..n).fold(Operator::identity(1), |acc, _| acc.kron(&hadamard()))
}

/// Rotation `exp(-i φ Y / 2)`.
pub fn ry(phi: f64) -> Operator {
    let (s, co) = (phi / 2.0).sin_cos();
    Operator::new(DMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)]), OperatorKind::Unitary).expect("ry")
}

/// CNOT with the control on the more significant qubit.
pub fn cnot() -> Operator {
    let mut m = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, col)] = c(1.0);
    }
    Operator::new(m, OperatorKind::Unitary).expect("cnot")
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`.
pub fn controlled(u: &Operator) -> Operator {
    let d = u.dim();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u.matrix());
    Operator::new(m, OperatorKind::Unitary).expect("controlled unitary")
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal divided out. Any dimension.
pub fn haar_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    Operator::unitary(haar_matrix(dim, rng)).expect("QR factor is unitary")
}

/// Orthonormal columns spanning a Haar-random `rank`-dimensional subspace.
pub fn random_subspace<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    haar_matrix(dim, rng).columns(0, rank).into_owned()
}

/// Projector matrix onto a Haar-random subspace; any dimension.
pub fn random_projector_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let v = random_subspace(dim, rank, rng);
    &v * v.adjoint()
}

/// Projector onto a Haar-random subspace of the given rank.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Operator {
    Operator::projector_onto(&random_subspace(dim, rank, rng)).expect("projector onto orthonormal columns")
}

/// Uniformly random unit vector over `layout`.
pub fn random_state<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> StateVector {
    let v = gaussian_matrix(layout.dim(), 1, rng);
    let n = v.norm();
    let amps = v.iter().map(|a| a / n).collect();
    StateVector::from_amps(layout, amps).expect("dimension matches layout")
}
