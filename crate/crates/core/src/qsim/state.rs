use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Operator, OperatorKind, QsimError, RegisterLayout};
use crate::tol::ZERO_STATE;

/// Dense amplitude vector over a [`RegisterLayout`]. States may be
/// sub-normalized; nothing renormalizes implicitly except [`StateVector::measure`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

/// Result of a computational-basis measurement of one register.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    pub width: usize,
    pub post: StateVector,
    pub prob: f64,
}

impl Measurement {
    pub fn bitstring(&self) -> String {
        bitstring(self.outcome, self.width)
    }
}

pub fn bitstring(value: usize, width: usize) -> String {
    (0..width).rev().map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    layout: RegisterLayout,
    amps: Vec<[f64; 2]>,
}

impl StateVector {
    /// The all-zero basis state `|0…0⟩`.
    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    /// Basis state given per-register values (unlisted registers are 0).
    pub fn basis_from(layout: RegisterLayout, values: &[(&str, usize)]) -> Result<Self, QsimError> {
        let mut index = 0usize;
        for (name, v) in values {
            let w = layout.width(name)?;
            if *v >> w != 0 {
                return Err(QsimError::InvalidOperator(format!("value {v} does not fit register {name}")));
            }
            index |= v << layout.shift(name)?;
        }
        Ok(Self::basis(layout, index))
    }

    pub fn from_amps(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self, QsimError> {
        if amps.len() != layout.dim() {
            return Err(QsimError::DimensionMismatch { expected: layout.dim(), found: amps.len() });
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over identical layouts.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::LayoutMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        Self { layout: self.layout.clone(), amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::LayoutMismatch);
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { layout: self.layout.clone(), amps })
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn normalized(&self) -> Result<StateVector, QsimError> {
        let n = self.norm_sqr();
        if n <= ZERO_STATE {
            return Err(QsimError::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_diff(&self, other: &StateVector) -> Result<f64, QsimError> {
        if self.layout != other.layout {
            return Err(QsimError::LayoutMismatch);
        }
        Ok(self.amps.iter().zip(&other.amps).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// Kronecker product with `other` placed on the less significant registers.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(layout.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { layout, amps })
    }

    /// Applies `op` to the listed registers (first listed = most significant
    /// factor of `op`), identity elsewhere.
    pub fn apply(&self, op: &Operator, targets: &[&str]) -> Result<StateVector, QsimError> {
        let (offsets, mask) = self.layout.offsets(targets)?;
        if op.dim() != offsets.len() {
            return Err(QsimError::DimensionMismatch { expected: offsets.len(), found: op.dim() });
        }
        let m = op.matrix();
        let d = offsets.len();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            for (v, off) in offsets.iter().enumerate() {
                buf[v] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, b) in buf.iter().enumerate() {
                    acc += m[(r, c)] * b;
                }
                out[base | off] = acc;
            }
        }
        Ok(Self { layout: self.layout.clone(), amps: out })
    }

    /// `P|ψ⟩` without renormalization.
    pub fn project(&self, p: &Operator, targets: &[&str]) -> Result<StateVector, QsimError> {
        if p.kind() != OperatorKind::Projector {
            return Err(QsimError::NotAProjector);
        }
        self.apply(p, targets)
    }

    /// Applies the basis permutation `v ↦ f(v)` on the combined value of the
    /// listed registers. `f` must be a bijection on that range.
    pub fn apply_classical(&self, targets: &[&str], f: impl Fn(usize) -> usize) -> Result<StateVector, QsimError> {
        let (offsets, mask) = self.layout.offsets(targets)?;
        let d = offsets.len();
        let mut seen = vec![false; d];
        let image: Vec<usize> = (0..d).map(&f).collect();
        for &w in &image {
            if w >= d || seen[w] {
                return Err(QsimError::NotAPermutation);
            }
            seen[w] = true;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            for v in 0..d {
                out[base | offsets[image[v]]] = self.amps[base | offsets[v]];
            }
        }
        Ok(Self { layout: self.layout.clone(), amps: out })
    }

    /// Born probabilities of every value of the listed registers, relative
    /// to `norm²(self)`.
    pub fn probabilities(&self, targets: &[&str]) -> Result<Vec<f64>, QsimError> {
        let total = self.norm_sqr();
        if total <= ZERO_STATE {
            return Err(QsimError::ZeroState);
        }
        let (offsets, mask) = self.layout.offsets(targets)?;
        let mut probs = vec![0.0; offsets.len()];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            for (v, off) in offsets.iter().enumerate() {
                probs[v] += self.amps[base | off].norm_sqr();
            }
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(probs)
    }

    /// Computational-basis measurement of one register; the post-measurement
    /// state is renormalized.
    pub fn measure<R: Rng + ?Sized>(&self, register: &str, rng: &mut R) -> Result<Measurement, QsimError> {
        let probs = self.probabilities(&[register])?;
        let width = self.layout.width(register)?;
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc && *p > 0.0 {
                outcome = v;
                break;
            }
        }
        let post = self.collapse(register, outcome)?;
        Ok(Measurement { outcome, width, post, prob: probs[outcome] })
    }

    /// Projects `register` onto `value` and renormalizes.
    pub fn collapse(&self, register: &str, value: usize) -> Result<StateVector, QsimError> {
        let width = self.layout.width(register)?;
        let shift = self.layout.shift(register)?;
        let m = (1usize << width) - 1;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if (i >> shift) & m == value { *a } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self { layout: self.layout.clone(), amps }.normalized()
    }

    /// Binary projective measurement `{P, I − P}` on the listed registers.
    /// Returns whether `P` fired, the renormalized post state, and the
    /// probability of the observed branch.
    pub fn measure_projector<R: Rng + ?Sized>(
        &self,
        p: &Operator,
        targets: &[&str],
        rng: &mut R,
    ) -> Result<(bool, StateVector, f64), QsimError> {
        let total = self.norm_sqr();
        if total <= ZERO_STATE {
            return Err(QsimError::ZeroState);
        }
        let hit = self.project(p, targets)?;
        let p_hit = (hit.norm_sqr() / total).clamp(0.0, 1.0);
        if rng.gen::<f64>() < p_hit {
            Ok((true, hit.normalized()?, p_hit))
        } else {
            let miss = self.sub(&hit)?;
            Ok((false, miss.normalized()?, 1.0 - p_hit))
        }
    }

    /// Amplitudes with the listed registers fixed to the given values, as a
    /// (generally sub-normalized) state over the remaining registers.
    pub fn restrict(&self, fixed: &[(&str, usize)]) -> Result<StateVector, QsimError> {
        let names: Vec<&str> = fixed.iter().map(|(n, _)| *n).collect();
        let (offsets, mask) = self.layout.offsets(&names)?;
        let mut value = 0usize;
        for (n, v) in fixed {
            let w = self.layout.width(n)?;
            value = (value << w) | v;
        }
        let rest: Vec<(String, usize)> =
            self.layout.registers().iter().filter(|(n, _)| !names.contains(&n.as_str())).cloned().collect();
        let layout = RegisterLayout::with_cap(rest, self.layout.cap())?;
        let off = offsets[value];
        let amps = (0..self.amps.len()).filter(|i| i & mask == 0).map(|base| self.amps[base | off]).collect();
        Ok(Self { layout, amps })
    }

    pub fn to_json(&self) -> String {
        let snap = Snapshot { layout: self.layout.clone(), amps: self.amps.iter().map(|a| [a.re, a.im]).collect() };
        serde_json::to_string(&snap).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<StateVector, QsimError> {
        let snap: Snapshot = serde_json::from_str(text).map_err(|e| QsimError::Snapshot(e.to_string()))?;
        let amps = snap.amps.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        Self::from_amps(snap.layout, amps)
    }
}
