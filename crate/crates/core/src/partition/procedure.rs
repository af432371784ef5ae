use nalgebra::DVector;
use num_complex::Complex64;

use super::estimate::{branch_weights, th_bit, Spectrum, PH};
use super::strategy::build_projectors;
use super::{PartitionError, PartitionParams, ProverStrategy};
use crate::jordan::{decompose_with_ranges, reflect, CVector, JordanDecomposition};
use crate::qsim::{CMatrix, Operator, RegisterLayout, StateVector};
use crate::tol::ZERO_BRANCH;

const TH: &str = "th";
const IN: &str = "in";

/// `G_{i,γ}` applied to `|0^m⟩_C|ψ⟩|0^t00⟩`: the branches `ψ₀`, `ψ₁` read off
/// `(ph, th, in) = (0^t, b, 1)` with their phases removed, and
/// `ψ_err = ψ − ψ₀ − ψ₁`.
#[derive(Debug, Clone)]
pub struct PartitionOutcome {
    pub psi0: StateVector,
    pub psi1: StateVector,
    pub psi_err: StateVector,
    pub z0: Complex64,
    pub z1: Complex64,
    /// `(‖ψ₀‖², ‖ψ₁‖², ‖ψ‖² − ‖ψ₀‖² − ‖ψ₁‖²)`; the last entry is the weight
    /// left on every other `(ph, th, in)` label.
    pub branch_probs: (f64, f64, f64),
    /// `‖Π_{in,mid}ψ‖²`, the weight with `p_j ∈ (γ − 2δ, γ)`.
    pub mid_weight: f64,
}

impl PartitionOutcome {
    pub fn branch(&self, b: u8) -> &StateVector {
        if b == 0 {
            &self.psi0
        } else {
            &self.psi1
        }
    }

    pub fn phase(&self, b: u8) -> Complex64 {
        if b == 0 {
            self.z0
        } else {
            self.z1
        }
    }
}

/// Per-coordinate data shared by every `γ`: the projectors, their Jordan
/// decomposition and the eigenbasis of `Q` restricted to `C = 0`.
#[derive(Debug, Clone)]
pub struct PartitionContext {
    strategy: ProverStrategy,
    i: usize,
    pi_in: Operator,
    pi_out: Operator,
    dec: JordanDecomposition,
    /// Rows of the eigenbasis with `C = 0`.
    e0: CMatrix,
    /// Eigenphases of `Q = R_in·R_out` for the columns of `e0`.
    phases: Vec<f64>,
}

fn restrict_c0(v: &CVector, d: usize) -> CVector {
    v.rows(0, d).into_owned()
}

fn to_state(layout: &RegisterLayout, v: &CVector) -> Result<StateVector, PartitionError> {
    Ok(StateVector::from_amps(layout.clone(), v.iter().copied().collect())?)
}

impl PartitionContext {
    pub fn new(strategy: &ProverStrategy, i: usize) -> Result<Self, PartitionError> {
        let l = strategy.layout();
        if i == 0 || i > l.m {
            return Err(PartitionError::InvalidParams(format!("coordinate {i} out of 1..={}", l.m)));
        }
        let params = PartitionParams::new(l.m, i, 1.0, 1, 1, super::EstimationMode::Ideal)?;
        let (pi_in, pi_out) = build_projectors(strategy, &params)?;
        let (v0, v1) = strategy.projector_ranges(i);
        let dec = decompose_with_ranges(&v0, &v1)?;
        let (e, jordan_phases) = dec.eigenbasis();
        let e0 = e.rows(0, l.dim_xz()).into_owned();
        // the decomposition diagonalises R_out·R_in; the procedure's Q is its adjoint
        let phases = jordan_phases.iter().map(|p| if *p == std::f64::consts::PI { *p } else { -p }).collect();
        Ok(Self { strategy: strategy.clone(), i, pi_in, pi_out, dec, e0, phases })
    }

    pub fn strategy(&self) -> &ProverStrategy {
        &self.strategy
    }

    pub fn coordinate(&self) -> usize {
        self.i
    }

    pub fn projectors(&self) -> (&Operator, &Operator) {
        (&self.pi_in, &self.pi_out)
    }

    /// Jordan decomposition with `Π₀ = Π_in`, `Π₁ = Π_{i,out}`.
    pub fn decomposition(&self) -> &JordanDecomposition {
        &self.dec
    }

    /// `Q = (2Π_in − I)(2Π_{i,out} − I)`.
    pub fn q(&self) -> Result<Operator, PartitionError> {
        Ok(reflect(&self.pi_in)?.compose(&reflect(&self.pi_out)?)?)
    }

    fn check(&self, params: &PartitionParams, psi: &StateVector) -> Result<RegisterLayout, PartitionError> {
        let l = self.strategy.layout();
        if params.m != l.m || params.i != self.i {
            return Err(PartitionError::InvalidParams(format!(
                "context is for coordinate {} of {}, params for {} of {}",
                self.i, l.m, params.i, params.m
            )));
        }
        let layout = l.xz_layout()?;
        if psi.layout() != &layout {
            return Err(PartitionError::Qsim(crate::qsim::QsimError::LayoutMismatch));
        }
        Ok(layout)
    }

    /// `(α̂_j, p_j)` for the 2-D blocks, then the `(10)` and `(11)` lines, all
    /// restricted to `C = 0`.
    fn in_sector(&self) -> (Vec<(CVector, f64)>, Vec<CVector>, Vec<CVector>) {
        let d = self.strategy.layout().dim_xz();
        let blocks = self.dec.blocks2d.iter().map(|b| (restrict_c0(&b.alpha, d), b.p)).collect();
        let lines = |c: u8| {
            self.dec.blocks1d.iter().filter(|b| b.b == 1 && b.c == c).map(|b| restrict_c0(&b.vector, d)).collect()
        };
        (blocks, lines(0), lines(1))
    }

    /// `Π_{in,≤γ−2δ}ψ`, `Π_{in,≥γ}ψ`, `Π_{in,mid}ψ` over `(X, Z)`.
    pub fn reference_parts(&self, params: &PartitionParams, psi: &StateVector) -> Result<[CVector; 3], PartitionError> {
        self.check(params, psi)?;
        let v = DVector::from_column_slice(psi.amps());
        let d = v.len();
        let (blocks, tens, elevens) = self.in_sector();
        let mut parts = [CVector::zeros(d), CVector::zeros(d), CVector::zeros(d)];
        let low = params.gamma - 2.0 * params.delta;
        for (a, p) in &blocks {
            let k = if *p <= low {
                0
            } else if *p >= params.gamma {
                1
            } else {
                2
            };
            parts[k] += a * a.dotc(&v);
        }
        for a in &tens {
            parts[0] += a * a.dotc(&v);
        }
        for a in &elevens {
            parts[1] += a * a.dotc(&v);
        }
        Ok(parts)
    }

    /// Unphased branches `(ph, th, in) = (0^t, b, 1)` computed in the eigenbasis:
    /// `E₀ diag(w_b) E₀† ψ`.
    fn raw_branches_fast(&self, params: &PartitionParams, psi: &StateVector) -> [CVector; 2] {
        let v = DVector::from_column_slice(psi.amps());
        let coeff = self.e0.adjoint() * &v;
        let est = params.estimator();
        let thr = params.threshold();
        let mut scaled = [coeff.clone(), coeff];
        for (k, ph) in self.phases.iter().enumerate() {
            let w = branch_weights(*ph, &est, thr);
            scaled[0][k] *= w[0];
            scaled[1][k] *= w[1];
        }
        [&self.e0 * &scaled[0], &self.e0 * &scaled[1]]
    }

    fn finish(
        &self,
        params: &PartitionParams,
        psi: &StateVector,
        layout: &RegisterLayout,
        raw: [CVector; 2],
    ) -> Result<PartitionOutcome, PartitionError> {
        let parts = self.reference_parts(params, psi)?;
        let mut z = [Complex64::new(1.0, 0.0); 2];
        for b in 0..2 {
            let overlap = parts[b].dotc(&raw[b]);
            if overlap.norm() >= ZERO_BRANCH {
                z[b] = overlap / overlap.norm();
            }
        }
        let psi0 = to_state(layout, &(&raw[0] * z[0].conj()))?;
        let psi1 = to_state(layout, &(&raw[1] * z[1].conj()))?;
        let psi_err = psi.sub(&psi0)?.sub(&psi1)?;
        let (n0, n1) = (psi0.norm_sqr(), psi1.norm_sqr());
        Ok(PartitionOutcome {
            branch_probs: (n0, n1, psi.norm_sqr() - n0 - n1),
            mid_weight: parts[2].norm_squared(),
            psi0,
            psi1,
            psi_err,
            z0: z[0],
            z1: z[1],
        })
    }

    /// `G_{i,γ}` via the Jordan eigenbasis, without materialising `ph`.
    pub fn run_g(&self, params: &PartitionParams, psi: &StateVector) -> Result<PartitionOutcome, PartitionError> {
        let layout = self.check(params, psi)?;
        let raw = self.raw_branches_fast(params, psi);
        self.finish(params, psi, &layout, raw)
    }

    /// Full register set `C1..Cm, X1..Xm, Z, ph, th, in`.
    pub fn full_layout(&self, params: &PartitionParams) -> Result<RegisterLayout, PartitionError> {
        let l = self.strategy.layout();
        let anc = RegisterLayout::new([(PH, params.t), (TH, 1), (IN, 1)])?;
        Ok(l.cxz_layout()?.concat(&anc)?)
    }

    /// `G_{i,γ}|0^m⟩_C|ψ⟩|0^t⟩|0⟩|0⟩` run step by step on the full register
    /// set, with `Q`'s eigenbasis taken from a Schur factorisation.
    pub fn g_output(&self, params: &PartitionParams, psi: &StateVector) -> Result<StateVector, PartitionError> {
        self.check(params, psi)?;
        let l = self.strategy.layout();
        let c0 = StateVector::zero(RegisterLayout::new(l.c_names().into_iter().map(|n| (n, 1)))?);
        let anc = StateVector::zero(RegisterLayout::new([(PH, params.t), (TH, 1), (IN, 1)])?);
        let state = c0.tensor(psi)?.tensor(&anc)?;
        let names = l.cxz_names();
        let cxz: Vec<&str> = names.iter().map(String::as_str).collect();
        let spectrum = Spectrum::of(&self.q()?)?;
        let est = params.estimator();
        let thr = params.threshold();
        let t = params.t;

        let state = spectrum.apply_estimation(&cxz, &state, &est, false)?;
        let state = state.apply_classical(&[PH, TH], |v| v ^ th_bit(v >> 1, t, thr) as usize)?;
        let state = spectrum.apply_estimation(&cxz, &state, &est, true)?;
        let c_names = l.c_names();
        let mut c_in: Vec<&str> = c_names.iter().map(String::as_str).collect();
        c_in.push(IN);
        let state = state.apply_classical(&c_in, |v| v ^ ((v >> 1) == 0) as usize)?;
        Ok(state)
    }

    /// `G_{i,γ}` on the materialised registers, branches read off the output.
    pub fn run_g_materialized(
        &self,
        params: &PartitionParams,
        psi: &StateVector,
    ) -> Result<PartitionOutcome, PartitionError> {
        let layout = self.check(params, psi)?;
        let out = self.g_output(params, psi)?;
        let raw = [0usize, 1].map(|b| {
            let fixed = self.branch_label(params, b);
            let fixed: Vec<(&str, usize)> = fixed.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            out.restrict(&fixed).map(|s| DVector::from_column_slice(s.amps()))
        });
        let [r0, r1] = raw;
        self.finish(params, psi, &layout, [r0?, r1?])
    }

    /// Register values `C = 0^m, ph = 0^t, th = b, in = 1`.
    fn branch_label(&self, _params: &PartitionParams, b: usize) -> Vec<(String, usize)> {
        let mut v: Vec<(String, usize)> = self.strategy.layout().c_names().into_iter().map(|n| (n, 0)).collect();
        v.extend([(PH.to_string(), 0), (TH.to_string(), b), (IN.to_string(), 1)]);
        v
    }

    /// Claim-2 residual: the weight of `Gψ − z₀|0^m⟩|ψ₀⟩|0^t01⟩ − z₁|0^m⟩|ψ₁⟩|0^t11⟩`
    /// on the labels `0^t01`, `0^t11`, with the branches from the fast path.
    pub fn exclusivity_residual(&self, params: &PartitionParams, psi: &StateVector) -> Result<f64, PartitionError> {
        let fast = self.run_g(params, psi)?;
        let out = self.g_output(params, psi)?;
        let full = out.layout().clone();
        let l = self.strategy.layout();
        let d = l.dim_xz();
        let shift_xz = params.t + 2;
        let mut amps = out.into_amps();
        for b in 0..2usize {
            let branch = fast.branch(b as u8);
            let z = fast.phase(b as u8);
            // C = 0, ph = 0, th = b, in = 1
            for (xz, a) in branch.amps().iter().enumerate().take(d) {
                amps[(xz << shift_xz) | (b << 1) | 1] -= z * a;
            }
        }
        let residual = StateVector::from_amps(full, amps)?;
        let mut total = 0.0;
        for b in 0..2 {
            let fixed = self.branch_label(params, b);
            let fixed: Vec<(&str, usize)> = fixed.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            total += residual.restrict(&fixed)?.norm_sqr();
        }
        Ok(total.sqrt())
    }

    /// Probability that `Ext_i` with `n` rounds succeeds on
    /// `|0^m⟩|ψ⟩/‖ψ‖`, summed block by block from the closed form.
    pub fn ext_success_exact(&self, psi: &StateVector, n: usize) -> Result<f64, PartitionError> {
        let psi = psi.normalized()?;
        let v = DVector::from_column_slice(psi.amps());
        let (blocks, _, elevens) = self.in_sector();
        let mut total = 0.0;
        for (a, p) in &blocks {
            total += a.dotc(&v).norm_sqr() * super::ext_success_formula(p.clamp(0.0, 1.0), n)?;
        }
        for a in &elevens {
            total += a.dotc(&v).norm_sqr();
        }
        Ok(total)
    }

    /// `Ext_i` on `|0^m⟩|ψ⟩/‖ψ‖`.
    pub fn extract<R: rand::Rng + ?Sized>(
        &self,
        psi: &StateVector,
        n_rounds: usize,
        rng: &mut R,
    ) -> Result<super::ExtractOutcome, PartitionError> {
        let l = self.strategy.layout();
        let c0 = StateVector::zero(RegisterLayout::new(l.c_names().into_iter().map(|n| (n, 1)))?);
        let state = c0.tensor(&psi.normalized()?)?;
        let names = l.cxz_names();
        let targets: Vec<&str> = names.iter().map(String::as_str).collect();
        let x = format!("X{}", self.i);
        super::extract_with(&self.pi_in, &self.pi_out, &self.strategy.frame(self.i), &targets, &x, &state, n_rounds, rng)
    }
}

/// One-shot `G_{i,γ}` (builds the per-coordinate context each call).
pub fn run_g(
    strategy: &ProverStrategy,
    params: &PartitionParams,
    psi: &StateVector,
) -> Result<PartitionOutcome, PartitionError> {
    PartitionContext::new(strategy, params.i)?.run_g(params, psi)
}
