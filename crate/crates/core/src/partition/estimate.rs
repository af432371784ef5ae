use std::f64::consts::PI;

use num_complex::Complex64;

use super::{EstimationMode, PartitionError};
use crate::linalg::unitary_eigen;
use crate::qsim::{unitarity_residual, CMatrix, Operator, StateVector};
use crate::tol::{ATOL, RESIDUAL};

/// Name of the phase register.
pub const PH: &str = "ph";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Estimator {
    pub t: usize,
    pub mode: EstimationMode,
}

/// Signed phase of label `l` on a `t`-bit register, in `(−π, π]`.
pub fn label_phase(l: usize, t: usize) -> f64 {
    let n = 1usize << t;
    if 2 * l <= n {
        2.0 * PI * l as f64 / n as f64
    } else {
        -2.0 * PI * (n - l) as f64 / n as f64
    }
}

/// `round(θ·2^t/2π) mod 2^t`.
pub fn ideal_label(theta: f64, t: usize) -> usize {
    let n = 1i64 << t;
    ((theta * n as f64 / (2.0 * PI)).round() as i64).rem_euclid(n) as usize
}

/// `2^{-t} Σ_{k<2^t} e^{ik(θ − θ_l)}`, the amplitude of label `l` after
/// estimating an eigenvector of phase `θ`.
pub fn kernel_amplitude(theta: f64, l: usize, t: usize) -> Complex64 {
    let n = (1u64 << t) as f64;
    let x = theta - 2.0 * PI * l as f64 / n;
    let half = (x / 2.0).sin();
    if half.abs() < 1e-13 {
        // x on a multiple of 2π: every term is e^{ikx} = ±1 with the same sign
        let k_phase = Complex64::from_polar(1.0, (n - 1.0) * x / 2.0);
        return k_phase * ((n * x / 2.0).cos() / (x / 2.0).cos()).signum();
    }
    Complex64::from_polar(1.0, (n - 1.0) * x / 2.0) * ((n * x / 2.0).sin() / (n * half))
}

pub fn kernel_weight(theta: f64, l: usize, t: usize) -> f64 {
    kernel_amplitude(theta, l, t).norm_sqr()
}

/// `U_th`'s bit for label `l`: `cos²(θ_l/2) ≥ threshold`.
pub fn th_bit(l: usize, t: usize, threshold: f64) -> bool {
    (label_phase(l, t) / 2.0).cos().powi(2) >= threshold
}

/// Weights `(w₀, w₁)` that `U_est† U_th U_est` leaves on `ph = 0` with
/// `th = b` for an eigenvector of phase `θ`.
pub(crate) fn branch_weights(theta: f64, est: &Estimator, threshold: f64) -> [f64; 2] {
    match est.mode {
        EstimationMode::Ideal => {
            if th_bit(ideal_label(theta, est.t), est.t, threshold) {
                [0.0, 1.0]
            } else {
                [1.0, 0.0]
            }
        }
        EstimationMode::Kernel => {
            let mut w = [0.0, 0.0];
            for l in 0..1usize << est.t {
                w[th_bit(l, est.t, threshold) as usize] += kernel_weight(theta, l, est.t);
            }
            w
        }
    }
}

/// Eigendecomposition of a unitary: phases in `(−π, π]` and orthonormal
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub phases: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn of(q: &Operator) -> Result<Self, PartitionError> {
        if unitarity_residual(q.matrix()) > ATOL {
            return Err(PartitionError::NotUnitary);
        }
        let (phases, vectors, off) = unitary_eigen(q.matrix());
        if off > RESIDUAL {
            return Err(PartitionError::NotUnitary);
        }
        Ok(Self { phases, vectors })
    }

    /// Runs `U_est` (or its inverse) with the eigenvectors living on
    /// `targets` and the labels on `ph`. `U_est` acts on each eigenvector's
    /// `ph` register by a unitary `W_θ` with `W_θ|0⟩ = Σ_l α_l(θ)|l⟩`: a
    /// shift by the rounded label in ideal mode, `F†·diag(e^{ijθ})·H^{⊗t}`
    /// in kernel mode.
    pub fn apply_estimation(
        &self,
        targets: &[&str],
        state: &StateVector,
        est: &Estimator,
        inverse: bool,
    ) -> Result<StateVector, PartitionError> {
        let layout = state.layout();
        if !layout.contains(PH) {
            return Err(PartitionError::MissingRegister(PH.into()));
        }
        let width = layout.width(PH)?;
        if width != est.t {
            return Err(PartitionError::DimensionMismatch { expected: est.t, found: width });
        }
        let (t_offs, t_mask) = layout.offsets(targets)?;
        if t_offs.len() != self.vectors.nrows() {
            return Err(PartitionError::DimensionMismatch { expected: t_offs.len(), found: self.vectors.nrows() });
        }
        let (p_offs, p_mask) = layout.offsets(&[PH])?;
        let n_ph = p_offs.len();
        let n_eig = self.phases.len();
        let dft = DftTable::new(est.t);
        let amps = state.amps();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        let mask = t_mask | p_mask;
        let v = &self.vectors;
        let mut coeff = vec![Complex64::new(0.0, 0.0); n_ph];
        for base in (0..amps.len()).filter(|i| i & mask == 0) {
            for k in 0..n_eig {
                // coefficient of eigenvector k for each ph value
                for (l, po) in p_offs.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, to) in t_offs.iter().enumerate() {
                        acc += v[(x, k)].conj() * amps[base | to | po];
                    }
                    coeff[l] = acc;
                }
                let moved = transform_ph(&coeff, self.phases[k], est, &dft, inverse);
                for (l, po) in p_offs.iter().enumerate() {
                    if moved[l] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for (x, to) in t_offs.iter().enumerate() {
                        out[base | to | po] += v[(x, k)] * moved[l];
                    }
                }
            }
        }
        Ok(StateVector::from_amps(layout.clone(), out)?)
    }
}

struct DftTable {
    twiddle: Vec<Complex64>,
}

impl DftTable {
    fn new(t: usize) -> Self {
        let n = 1usize << t;
        Self { twiddle: (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect() }
    }

    /// `(1/√N) Σ_j e^{±2πijl/N} y_j`.
    fn dft(&self, y: &[Complex64], sign: i64) -> Vec<Complex64> {
        let n = y.len();
        let scale = 1.0 / (n as f64).sqrt();
        (0..n)
            .map(|l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, yj) in y.iter().enumerate() {
                    let idx = ((sign * (j * l) as i64).rem_euclid(n as i64)) as usize;
                    acc += self.twiddle[idx] * yj;
                }
                acc * scale
            })
            .collect()
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for k in start..start + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|z| *z *= s);
}

fn transform_ph(y: &[Complex64], theta: f64, est: &Estimator, dft: &DftTable, inverse: bool) -> Vec<Complex64> {
    let n = y.len();
    match est.mode {
        EstimationMode::Ideal => {
            let r = ideal_label(theta, est.t);
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (l, yl) in y.iter().enumerate() {
                let to = if inverse { (l + n - r) % n } else { (l + r) % n };
                out[to] = *yl;
            }
            out
        }
        EstimationMode::Kernel => {
            if !inverse {
                let mut v = y.to_vec();
                walsh_hadamard(&mut v);
                for (j, z) in v.iter_mut().enumerate() {
                    *z *= Complex64::from_polar(1.0, j as f64 * theta);
                }
                dft.dft(&v, -1)
            } else {
                let mut v = dft.dft(y, 1);
                for (j, z) in v.iter_mut().enumerate() {
                    *z *= Complex64::from_polar(1.0, -(j as f64) * theta);
                }
                walsh_hadamard(&mut v);
                v
            }
        }
    }
}

/// Spectral phase estimation of `q` acting on `targets`, writing labels
/// into the `ph` register (width `est.t`).
pub fn phase_estimate(
    q: &Operator,
    targets: &[&str],
    state: &StateVector,
    est: &Estimator,
) -> Result<StateVector, PartitionError> {
    Spectrum::of(q)?.apply_estimation(targets, state, est, false)
}

pub fn phase_estimate_inverse(
    q: &Operator,
    targets: &[&str],
    state: &StateVector,
    est: &Estimator,
) -> Result<StateVector, PartitionError> {
    Spectrum::of(q)?.apply_estimation(targets, state, est, true)
}
