use serde::{Deserialize, Serialize};

use super::estimate::Estimator;
use super::PartitionError;

/// Failure exponent used by kernel-mode estimation unless overridden.
/// The kernel needs `t ≈ τ + n_fail + 3` phase qubits, so the textbook
/// choice of 20 is out of reach for a materialised `ph` register.
pub const DEFAULT_N_FAIL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMode {
    /// Each eigenphase is written into `ph` rounded to `t` bits, amplitude 1.
    Ideal,
    /// Textbook phase-estimation amplitudes over all `2^t` labels.
    Kernel,
}

/// Parameters of one `G_{i,γ}` application.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub m: usize,
    /// Coordinate, 1-based.
    pub i: usize,
    pub gamma0: f64,
    #[serde(rename = "T")]
    pub big_t: usize,
    /// Grid index: `γ = γ₀·j/T`.
    pub j: usize,
    pub gamma: f64,
    pub delta: f64,
    pub tau: usize,
    pub t: usize,
    pub mode: EstimationMode,
    pub n_fail: usize,
}

/// `[γ₀/T, 2γ₀/T, …, γ₀]`.
pub fn gamma_grid(gamma0: f64, big_t: usize) -> Vec<f64> {
    (1..=big_t).map(|j| gamma0 * j as f64 / big_t as f64).collect()
}

fn precision_bits(delta: f64) -> usize {
    (8.0 / delta).log2().ceil() as usize
}

fn phase_bits(tau: usize, mode: EstimationMode, n_fail: usize) -> usize {
    match mode {
        EstimationMode::Ideal => tau,
        EstimationMode::Kernel => tau + n_fail + 3,
    }
}

impl PartitionParams {
    pub fn new(
        m: usize,
        i: usize,
        gamma0: f64,
        big_t: usize,
        j: usize,
        mode: EstimationMode,
    ) -> Result<Self, PartitionError> {
        let bad = |msg: String| Err(PartitionError::InvalidParams(msg));
        if m == 0 || i == 0 || i > m {
            return bad(format!("coordinate {i} out of 1..={m}"));
        }
        if !(gamma0 > 0.0 && gamma0 <= 1.0) {
            return bad(format!("gamma0 = {gamma0} not in (0, 1]"));
        }
        if big_t == 0 || j == 0 || j > big_t {
            return bad(format!("grid index {j} out of 1..={big_t}"));
        }
        if gamma0 / (big_t as f64) < 2f64.powi(-40) {
            return bad("gamma0 / T below 2^-40".into());
        }
        let delta = gamma0 / (3.0 * big_t as f64);
        let tau = precision_bits(delta);
        let n_fail = DEFAULT_N_FAIL;
        Ok(Self {
            m,
            i,
            gamma0,
            big_t,
            j,
            gamma: gamma0 * j as f64 / big_t as f64,
            delta,
            tau,
            t: phase_bits(tau, mode, n_fail),
            mode,
            n_fail,
        })
    }

    /// Same instance at another grid point.
    pub fn with_gamma_index(&self, j: usize) -> Result<Self, PartitionError> {
        let mut p = Self::new(self.m, self.i, self.gamma0, self.big_t, j, self.mode)?;
        p.n_fail = self.n_fail;
        p.t = self.t;
        Ok(p)
    }

    pub fn with_coordinate(&self, i: usize) -> Result<Self, PartitionError> {
        let mut p = Self::new(self.m, i, self.gamma0, self.big_t, self.j, self.mode)?;
        p.n_fail = self.n_fail;
        p.t = self.t;
        Ok(p)
    }

    /// Kernel mode only: resizes `ph` so the tail outside `θ̄ ± 2^{-τ}`
    /// stays below `2^{-n_fail}`.
    pub fn with_n_fail(mut self, n_fail: usize) -> Self {
        self.n_fail = n_fail;
        self.t = phase_bits(self.tau, self.mode, n_fail);
        self
    }

    pub fn with_t(mut self, t: usize) -> Result<Self, PartitionError> {
        if t < self.tau {
            return Err(PartitionError::InvalidParams(format!("t = {t} below tau = {}", self.tau)));
        }
        self.t = t;
        Ok(self)
    }

    /// `γ − δ`, the `U_th` cut on `cos²(θ/2)`.
    pub fn threshold(&self) -> f64 {
        self.gamma - self.delta
    }

    pub fn gamma_grid(&self) -> Vec<f64> {
        gamma_grid(self.gamma0, self.big_t)
    }

    pub fn estimator(&self) -> Estimator {
        Estimator { t: self.t, mode: self.mode }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_and_delta() {
        let p = PartitionParams::new(2, 1, 0.5, 16, 4, EstimationMode::Ideal).unwrap();
        assert_eq!(p.gamma, 0.5 * 4.0 / 16.0);
        assert_eq!(p.delta, 0.5 / 48.0);
        assert_eq!(p.gamma_grid().len(), 16);
        assert_eq!(*p.gamma_grid().last().unwrap(), 0.5);
        assert_eq!(p.t, p.tau);
        // 8/δ = 768
        assert_eq!(p.tau, 10);
    }

    #[test]
    fn rejects_bad_inputs() {
        use EstimationMode::Ideal;
        assert!(PartitionParams::new(2, 3, 0.5, 4, 1, Ideal).is_err());
        assert!(PartitionParams::new(2, 0, 0.5, 4, 1, Ideal).is_err());
        assert!(PartitionParams::new(2, 1, 0.0, 4, 1, Ideal).is_err());
        assert!(PartitionParams::new(2, 1, 1.5, 4, 1, Ideal).is_err());
        assert!(PartitionParams::new(2, 1, 0.5, 4, 5, Ideal).is_err());
        assert!(PartitionParams::new(2, 1, 1e-9, 1 << 20, 1, Ideal).is_err());
        let p = PartitionParams::new(2, 1, 0.5, 4, 1, Ideal).unwrap();
        assert!(p.with_t(p.tau - 1).is_err());
    }

    #[test]
    fn kernel_mode_pads_the_phase_register() {
        let p = PartitionParams::new(1, 1, 1.0, 4, 2, EstimationMode::Kernel).unwrap();
        assert_eq!(p.t, p.tau + DEFAULT_N_FAIL + 3);
        assert_eq!(p.with_n_fail(1).t, p.tau + 4);
    }

    proptest! {
        // |θ' − θ| ≤ 2^{-τ} moves cos²(θ/2) by at most δ/2
        #[test]
        fn precision_bits_resolve_the_threshold(
            gamma0 in 0.01f64..=1.0,
            big_t in 1usize..64,
            theta in -3.2f64..3.2,
            frac in -1.0f64..=1.0,
        ) {
            let p = PartitionParams::new(1, 1, gamma0, big_t, 1, EstimationMode::Ideal).unwrap();
            let moved = theta + frac * 2f64.powi(-(p.tau as i32));
            let gap = ((moved / 2.0).cos().powi(2) - (theta / 2.0).cos().powi(2)).abs();
            prop_assert!(gap <= p.delta / 2.0);
        }
    }
}
