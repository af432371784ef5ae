//! Two-projector decomposition into invariant 2-D rotation blocks and 1-D lines.
//!
//! Given projectors `Π₀, Π₁` on `C^n`, the space splits into planes
//! `span{α, α⊥}` where `Π₀` keeps `α`, `Π₁` keeps `β = cos(θ/2)α − sin(θ/2)α⊥`,
//! and `Q = R₁R₀` rotates by `±θ`, plus lines on which both projectors act
//! as 0 or 1.
//!
//! The blocks come from the principal angles between the two ranges
//! (eigenvectors of `MM†` with `M = V₀†V₁`); eigenphases of `Q` are
//! cross-checked against a general eigensolve of the product matrix itself.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::hermitian_eigen;
use crate::qsim::{projector_residual, CMatrix, Operator, OperatorKind, QsimError};
use crate::tol::{ATOL, DEGENERATE, EIGPHASE};

pub type CVector = DVector<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JordanError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator is not a projector")]
    NotAProjector,
    #[error("orthonormalization residual {0:e} too large")]
    DegenerateNumerics(f64),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock2D {
    pub theta: f64,
    pub p: f64,
    pub alpha: CVector,
    pub alpha_perp: CVector,
    pub beta: CVector,
    pub beta_perp: CVector,
}

impl JordanBlock2D {
    /// `(α + iα⊥)/√2`, eigenvalue `e^{iθ}` of `R₁R₀`.
    pub fn phi_plus(&self) -> CVector {
        (&self.alpha + &self.alpha_perp * Complex64::i()) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    /// `(α − iα⊥)/√2`, eigenvalue `e^{−iθ}`.
    pub fn phi_minus(&self) -> CVector {
        (&self.alpha - &self.alpha_perp * Complex64::i()) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock1D {
    pub vector: CVector,
    pub b: u8,
    pub c: u8,
}

impl JordanBlock1D {
    /// Eigenphase of `R₁R₀` on this line: 0 when `b = c`, π otherwise.
    pub fn phase(&self) -> f64 {
        if self.b == self.c {
            0.0
        } else {
            std::f64::consts::PI
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanDecomposition {
    pub blocks2d: Vec<JordanBlock2D>,
    pub blocks1d: Vec<JordanBlock1D>,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub max_p0: f64,
    pub max_p1: f64,
    pub max_q: f64,
    pub gram: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.max_p0.max(self.max_p1).max(self.max_q).max(self.gram)
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `2P − I`.
pub fn reflect(p: &Operator) -> Result<Operator, JordanError> {
    if p.kind() != OperatorKind::Projector {
        return Err(JordanError::NotAProjector);
    }
    let n = p.dim();
    Ok(Operator::unitary(p.matrix() * cplx(2.0) - CMatrix::identity(n, n))?)
}

/// Orthonormal eigenvectors of a Hermitian matrix with eigenvalue above 1/2.
fn eig_range(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let (values, vectors) = hermitian_eigen(h);
    let keep: Vec<usize> = (0..n).filter(|&j| values[j] > 0.5).collect();
    let mut out = CMatrix::zeros(n, keep.len());
    for (k, &j) in keep.iter().enumerate() {
        out.set_column(k, &vectors.column(j));
    }
    out
}

/// Orthonormal basis of the range of a projector matrix.
pub fn range_basis(p: &CMatrix) -> CMatrix {
    eig_range(&((p + p.adjoint()) * cplx(0.5)))
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `a` in `C^n`.
pub fn complement(a: &CMatrix, n: usize) -> CMatrix {
    if a.ncols() == 0 {
        return CMatrix::identity(n, n);
    }
    if a.ncols() >= n {
        return CMatrix::zeros(n, 0);
    }
    eig_range(&(CMatrix::identity(n, n) - a * a.adjoint()))
}

/// Decomposition of `(Π₀, Π₁)`.
pub fn jordan_decompose(p0: &Operator, p1: &Operator) -> Result<JordanDecomposition, JordanError> {
    if p0.kind() != OperatorKind::Projector || p1.kind() != OperatorKind::Projector {
        return Err(JordanError::NotAProjector);
    }
    decompose_matrices(p0.matrix(), p1.matrix())
}

/// Same as [`jordan_decompose`] on plain matrices of any dimension.
pub fn decompose_matrices(p0: &CMatrix, p1: &CMatrix) -> Result<JordanDecomposition, JordanError> {
    for p in [p0, p1] {
        if p.nrows() != p.ncols() {
            return Err(JordanError::DimensionMismatch(p.nrows(), p.ncols()));
        }
    }
    if p0.nrows() != p1.nrows() {
        return Err(JordanError::DimensionMismatch(p0.nrows(), p1.nrows()));
    }
    if projector_residual(p0) > ATOL || projector_residual(p1) > ATOL {
        return Err(JordanError::NotAProjector);
    }
    decompose_with_ranges(&range_basis(p0), &range_basis(p1))
}

/// Decomposition from orthonormal bases `v0`, `v1` of the two ranges. Useful
/// when the ranges are known in closed form and the projectors are large.
pub fn decompose_with_ranges(v0: &CMatrix, v1: &CMatrix) -> Result<JordanDecomposition, JordanError> {
    let n = v0.nrows();
    if v1.nrows() != n {
        return Err(JordanError::DimensionMismatch(n, v1.nrows()));
    }
    let (r0, r1) = (v0.ncols(), v1.ncols());
    let mut blocks2d = Vec::new();
    let mut ones = Vec::new();
    let mut tens = Vec::new();
    let mut oh_ones = Vec::new();
    // principal vectors: eigenvectors of MM† with M = V₀†V₁, so that
    // σ_k = ‖V₁†α_k‖ and the partners w_k = V₁†α_k/σ_k are orthonormal
    let mut used1 = Vec::new();
    if r0 > 0 && r1 > 0 {
        let m = v0.adjoint() * v1;
        let mm = &m * m.adjoint();
        let (_, principal) = hermitian_eigen(&mm);
        for k in 0..r0 {
            let alpha: CVector = (v0 * principal.column(k)).normalize();
            let coords: CVector = v1.adjoint() * &alpha;
            let sigma = coords.norm();
            let inside: CVector = v1 * &coords;
            let s = (&alpha - &inside).norm();
            let theta = 2.0 * s.atan2(sigma);
            if theta > std::f64::consts::PI - EIGPHASE {
                tens.push(alpha);
                continue;
            }
            used1.push(&coords / cplx(sigma));
            if theta < EIGPHASE {
                ones.push(alpha);
                continue;
            }
            let beta = inside / cplx(sigma);
            let alpha_perp = (&alpha * cplx(sigma) - &beta).normalize();
            let beta_perp = (&alpha - &beta * cplx(sigma)).normalize();
            blocks2d.push(JordanBlock2D { theta, p: (theta / 2.0).cos().powi(2), alpha, alpha_perp, beta, beta_perp });
        }
    } else {
        for k in 0..r0 {
            tens.push(v0.column(k).into_owned());
        }
    }
    let used1 = if used1.is_empty() { CMatrix::zeros(r1, 0) } else { CMatrix::from_columns(&used1) };
    let left1 = complement(&used1, r1);
    for k in 0..left1.ncols() {
        oh_ones.push(v1 * left1.column(k));
    }
    blocks2d.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let mut blocks1d: Vec<JordanBlock1D> = Vec::new();
    blocks1d.extend(ones.into_iter().map(|v| JordanBlock1D { vector: v, b: 1, c: 1 }));
    blocks1d.extend(tens.into_iter().map(|v| JordanBlock1D { vector: v, b: 1, c: 0 }));
    blocks1d.extend(oh_ones.into_iter().map(|v| JordanBlock1D { vector: v, b: 0, c: 1 }));

    let mut dec = JordanDecomposition { blocks2d, blocks1d, dim: n };
    let partial = dec.basis_columns();
    let rest = complement(&partial, n);
    for k in 0..rest.ncols() {
        dec.blocks1d.push(JordanBlock1D { vector: rest.column(k).into_owned(), b: 0, c: 0 });
    }
    let gram = dec.gram_residual();
    if gram > DEGENERATE || 2 * dec.blocks2d.len() + dec.blocks1d.len() != n {
        return Err(JordanError::DegenerateNumerics(gram));
    }
    Ok(dec)
}

impl JordanDecomposition {
    /// Columns `α₁, α₁⊥, α₂, α₂⊥, …` followed by the 1-D vectors.
    pub fn basis_columns(&self) -> CMatrix {
        let k = 2 * self.blocks2d.len() + self.blocks1d.len();
        let mut m = CMatrix::zeros(self.dim, k);
        let mut col = 0;
        for b in &self.blocks2d {
            m.set_column(col, &b.alpha);
            m.set_column(col + 1, &b.alpha_perp);
            col += 2;
        }
        for b in &self.blocks1d {
            m.set_column(col, &b.vector);
            col += 1;
        }
        m
    }

    /// Max-norm deviation of the Gram matrix of all block vectors from `I`.
    pub fn gram_residual(&self) -> f64 {
        let b = self.basis_columns();
        let k = b.ncols();
        max_abs(&(b.adjoint() * &b - CMatrix::identity(k, k)))
    }

    /// Eigenbasis of `R₁R₀` as columns (`φ₊, φ₋` per 2-D block, then the
    /// 1-D vectors) with matching phases in `(−π, π]`.
    pub fn eigenbasis(&self) -> (CMatrix, Vec<f64>) {
        let mut e = CMatrix::zeros(self.dim, self.dim);
        let mut phases = Vec::with_capacity(self.dim);
        let mut col = 0;
        for b in &self.blocks2d {
            e.set_column(col, &b.phi_plus());
            e.set_column(col + 1, &b.phi_minus());
            phases.extend([b.theta, -b.theta]);
            col += 2;
        }
        for b in &self.blocks1d {
            e.set_column(col, &b.vector);
            phases.push(b.phase());
            col += 1;
        }
        (e, phases)
    }

    /// Phases the dense eigensolver should find: `±θ` per 2-D block, 0 or π per line.
    pub fn expected_phases(&self) -> Vec<f64> {
        self.eigenbasis().1
    }

    pub fn rebuild_p0(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks2d {
            m += outer(&b.alpha);
        }
        for b in self.blocks1d.iter().filter(|b| b.b == 1) {
            m += outer(&b.vector);
        }
        m
    }

    pub fn rebuild_p1(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks2d {
            m += outer(&b.beta);
        }
        for b in self.blocks1d.iter().filter(|b| b.c == 1) {
            m += outer(&b.vector);
        }
        m
    }

    /// `Σ e^{iφ}|v⟩⟨v|` over the eigenbasis.
    pub fn rebuild_q(&self) -> CMatrix {
        let (e, phases) = self.eigenbasis();
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&ph| Complex64::from_polar(1.0, ph)),
        ));
        &e * d * e.adjoint()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&JordanDump::from(self)).expect("dump serializes")
    }
}

/// `2P − I` on a plain matrix.
pub fn reflect_matrix(p: &CMatrix) -> CMatrix {
    let n = p.nrows();
    p * cplx(2.0) - CMatrix::identity(n, n)
}

/// `Q = R₁R₀`.
pub fn q_matrix(p0: &CMatrix, p1: &CMatrix) -> CMatrix {
    reflect_matrix(p1) * reflect_matrix(p0)
}

/// Max-norm residuals of rebuilding `Π₀`, `Π₁` and `Q = R₁R₀` from the block
/// data, plus the Gram deviation.
pub fn reconstruct_check(dec: &JordanDecomposition, p0: &Operator, p1: &Operator) -> Residuals {
    reconstruct_residuals(dec, p0.matrix(), p1.matrix())
}

pub fn reconstruct_residuals(dec: &JordanDecomposition, p0: &CMatrix, p1: &CMatrix) -> Residuals {
    Residuals {
        max_p0: max_abs(&(dec.rebuild_p0() - p0)),
        max_p1: max_abs(&(dec.rebuild_p1() - p1)),
        max_q: max_abs(&(dec.rebuild_q() - q_matrix(p0, p1))),
        gram: dec.gram_residual(),
    }
}

/// Eigenphases of a square matrix from a general dense eigensolve
/// (LAPACK `zgeev`), in `(−π, π]`.
pub fn dense_eigenphases(m: &CMatrix) -> Vec<f64> {
    crate::linalg::eigenvalues(m).iter().map(|z| z.arg()).collect()
}

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    Complex64::from_polar(1.0, a - b).arg().abs()
}

/// Largest distance in a greedy one-to-one matching of the decomposition's
/// phases with the dense eigenphases of `R₁R₀`.
pub fn eigenphase_crosscheck(dec: &JordanDecomposition, p0: &Operator, p1: &Operator) -> f64 {
    eigenphase_residual(dec, p0.matrix(), p1.matrix())
}

pub fn eigenphase_residual(dec: &JordanDecomposition, p0: &CMatrix, p1: &CMatrix) -> f64 {
    match_phases(&dec.expected_phases(), &dense_eigenphases(&q_matrix(p0, p1)))
}

pub fn match_phases(expected: &[f64], found: &[f64]) -> f64 {
    if expected.len() != found.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; found.len()];
    let mut worst: f64 = 0.0;
    for &e in expected {
        let (j, d) = found
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &f)| (j, circular_distance(e, f)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[derive(Serialize)]
struct Block2DDump {
    theta: f64,
    p: f64,
    alpha: Vec<[f64; 2]>,
    alpha_perp: Vec<[f64; 2]>,
    beta: Vec<[f64; 2]>,
    beta_perp: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Block1DDump {
    b: u8,
    c: u8,
    vector: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct JordanDump {
    dim: usize,
    blocks2d: Vec<Block2DDump>,
    blocks1d: Vec<Block1DDump>,
}

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl From<&JordanDecomposition> for JordanDump {
    fn from(d: &JordanDecomposition) -> Self {
        JordanDump {
            dim: d.dim,
            blocks2d: d
                .blocks2d
                .iter()
                .map(|b| Block2DDump {
                    theta: b.theta,
                    p: b.p,
                    alpha: pairs(&b.alpha),
                    alpha_perp: pairs(&b.alpha_perp),
                    beta: pairs(&b.beta),
                    beta_perp: pairs(&b.beta_perp),
                })
                .collect(),
            blocks1d: d.blocks1d.iter().map(|b| Block1DDump { b: b.b, c: b.c, vector: pairs(&b.vector) }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gates::{random_projector, random_projector_matrix};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn proj(entries: &[f64]) -> Operator {
        let n = (entries.len() as f64).sqrt() as usize;
        Operator::projector(CMatrix::from_row_slice(n, n, &entries.iter().map(|&x| cplx(x)).collect::<Vec<_>>()))
            .unwrap()
    }

    fn ket0() -> Operator {
        proj(&[1.0, 0.0, 0.0, 0.0])
    }

    fn ket_plus() -> Operator {
        proj(&[0.5, 0.5, 0.5, 0.5])
    }

    #[test]
    fn reflect_trivial_cases() {
        let neg = reflect(&Operator::zero_projector(2)).unwrap();
        assert_eq!(neg.matrix(), &(CMatrix::identity(2, 2) * cplx(-1.0)));
        let id = reflect(&Operator::diagonal_projector(2, |_| true)).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(2, 2));
        let z = reflect(&ket0()).unwrap();
        assert_eq!(z.matrix(), crate::qsim::gates::pauli_z().matrix());
        assert!(matches!(reflect(&Operator::identity(2)), Err(JordanError::NotAProjector)));
    }

    #[test]
    fn zero_and_plus_give_quarter_turn() {
        let dec = jordan_decompose(&ket0(), &ket_plus()).unwrap();
        assert_eq!(dec.blocks2d.len(), 1);
        assert!(dec.blocks1d.is_empty());
        let b = &dec.blocks2d[0];
        assert!((b.theta - PI / 2.0).abs() < 1e-12);
        assert!((b.p - 0.5).abs() < 1e-12);
        // α = |0⟩ up to phase; rotate so α is real and compare Q entries
        let ph = b.alpha[0] / b.alpha[0].norm();
        let q = dec.rebuild_q();
        let expected = CMatrix::from_row_slice(2, 2, &[cplx(0.0), cplx(-1.0), cplx(1.0), cplx(0.0)]);
        assert!(max_abs(&(&q - &expected)) <= 1e-10, "{q}");
        let r = reconstruct_check(&dec, &ket0(), &ket_plus());
        assert!(r.max() <= 1e-10);
        assert!((ph.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_projectors_have_only_lines() {
        let dec = jordan_decompose(&ket0(), &ket0()).unwrap();
        assert!(dec.blocks2d.is_empty());
        let mut kinds: Vec<(u8, u8)> = dec.blocks1d.iter().map(|b| (b.b, b.c)).collect();
        kinds.sort();
        assert_eq!(kinds, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn orthogonal_projectors_give_ten_and_oh_one() {
        let p1 = proj(&[0.0, 0.0, 0.0, 1.0]);
        let dec = jordan_decompose(&ket0(), &p1).unwrap();
        let mut kinds: Vec<(u8, u8)> = dec.blocks1d.iter().map(|b| (b.b, b.c)).collect();
        kinds.sort();
        assert_eq!(kinds, vec![(0, 1), (1, 0)]);
        assert!(reconstruct_check(&dec, &ket0(), &p1).max() <= 1e-12);
    }

    #[test]
    fn degenerate_ranks_are_handled() {
        let full = Operator::diagonal_projector(4, |_| true);
        let zero = Operator::zero_projector(4);
        for (a, b) in [(&full, &zero), (&zero, &zero), (&full, &full), (&zero, &full)] {
            let dec = jordan_decompose(a, b).unwrap();
            assert_eq!(dec.blocks1d.len(), 4);
            assert!(reconstruct_check(&dec, a, b).max() <= 1e-12);
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        assert!(matches!(
            jordan_decompose(&ket0(), &Operator::zero_projector(4)),
            Err(JordanError::DimensionMismatch(2, 4))
        ));
        assert!(matches!(jordan_decompose(&ket0(), &Operator::identity(2)), Err(JordanError::NotAProjector)));
    }

    #[test]
    fn corrupted_block_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p0 = random_projector_matrix(6, 2, &mut rng);
        let p1 = random_projector_matrix(6, 2, &mut rng);
        let mut dec = decompose_matrices(&p0, &p1).unwrap();
        assert!(reconstruct_residuals(&dec, &p0, &p1).max() <= 1e-8);
        let b = &mut dec.blocks2d[0];
        b.alpha = (&b.alpha * cplx(0.9) + &b.alpha_perp * cplx(0.436)).normalize();
        assert!(reconstruct_residuals(&dec, &p0, &p1).max() > 1e-3);
    }

    #[test]
    fn block_relations_hold_on_random_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p0 = random_projector(8, 2, &mut rng);
        let p1 = random_projector(8, 3, &mut rng);
        let dec = jordan_decompose(&p0, &p1).unwrap();
        assert_eq!(dec.blocks2d.len(), 2);
        let q = q_matrix(p0.matrix(), p1.matrix());
        let (m0, m1) = (p0.matrix(), p1.matrix());
        for b in &dec.blocks2d {
            let ip = b.alpha.dotc(&b.beta);
            assert!(ip.re > 0.0 && ip.im.abs() <= 1e-9);
            assert!((b.p - ip.norm_sqr()).abs() <= 1e-9);
            // Π₀ keeps α and kills α⊥; Π₁ keeps β and kills β⊥
            assert!((m0 * &b.alpha - &b.alpha).norm() <= 1e-8);
            assert!((m0 * &b.alpha_perp).norm() <= 1e-8);
            assert!((m1 * &b.beta - &b.beta).norm() <= 1e-8);
            assert!((m1 * &b.beta_perp).norm() <= 1e-8);
            let plus = b.phi_plus();
            let minus = b.phi_minus();
            assert!((&q * &plus - &plus * Complex64::from_polar(1.0, b.theta)).norm() <= 1e-8);
            assert!((&q * &minus - &minus * Complex64::from_polar(1.0, -b.theta)).norm() <= 1e-8);
            let overlap = b.alpha.dotc(&(m1 * &b.alpha)).re;
            assert!((b.theta - 2.0 * overlap.sqrt().acos()).abs() <= 1e-8);
        }
        for w in dec.blocks2d.windows(2) {
            assert!(w[0].theta <= w[1].theta);
        }
        for b in &dec.blocks1d {
            assert!((m0 * &b.vector - &b.vector * cplx(b.b as f64)).norm() <= 1e-8);
            assert!((m1 * &b.vector - &b.vector * cplx(b.c as f64)).norm() <= 1e-8);
        }
    }

    #[test]
    fn intersecting_ranges_give_eleven_lines() {
        // rank 5 + rank 5 in dim 8 forces a 2-dim intersection
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p0 = random_projector(8, 5, &mut rng);
        let p1 = random_projector(8, 5, &mut rng);
        let dec = jordan_decompose(&p0, &p1).unwrap();
        assert_eq!(dec.blocks1d.iter().filter(|b| (b.b, b.c) == (1, 1)).count(), 2);
        assert_eq!(dec.blocks2d.len(), 3);
        assert!(reconstruct_check(&dec, &p0, &p1).max() <= 1e-8);
        assert!(eigenphase_crosscheck(&dec, &p0, &p1) <= 1e-7);
    }

    #[test]
    fn dump_lists_blocks() {
        let dec = jordan_decompose(&ket0(), &ket_plus()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&dec.to_json()).unwrap();
        assert_eq!(v["dim"], 2);
        assert!((v["blocks2d"][0]["p"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        let a = v["blocks2d"][0]["alpha"].as_array().unwrap();
        assert!((a[0][0].as_f64().unwrap().hypot(a[0][1].as_f64().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn match_phases_is_circular() {
        assert!(match_phases(&[PI, 0.0], &[-PI + 1e-9, 1e-9]) < 1e-8);
        assert!(match_phases(&[0.1], &[0.1, 0.2]).is_infinite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn random_pairs_decompose_completely(seed in any::<u64>(), dim in 2usize..=12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r0 = rng.gen_range(0..=dim);
            let r1 = rng.gen_range(0..=dim);
            let p0 = random_projector_matrix(dim, r0, &mut rng);
            let p1 = random_projector_matrix(dim, r1, &mut rng);
            let dec = decompose_matrices(&p0, &p1).unwrap();
            prop_assert_eq!(2 * dec.blocks2d.len() + dec.blocks1d.len(), dim);
            let r = reconstruct_residuals(&dec, &p0, &p1);
            prop_assert!(r.gram <= 1e-8, "{:?}", r);
            prop_assert!(r.max() <= 1e-8, "{:?}", r);
            prop_assert!(eigenphase_residual(&dec, &p0, &p1) <= 1e-7);
        }
    }
}
