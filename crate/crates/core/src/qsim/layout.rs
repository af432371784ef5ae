use serde::{Deserialize, Serialize};

use super::QsimError;
use crate::tol::DEFAULT_QUBIT_CAP;

/// Ordered named registers. The first register holds the most significant
/// bits of a basis index; inside a register the first qubit is most
/// significant as well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<(String, usize)>,
    cap: usize,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self, QsimError> {
        Self::with_cap(registers, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap<S: Into<String>>(
        registers: impl IntoIterator<Item = (S, usize)>,
        cap: usize,
    ) -> Result<Self, QsimError> {
        let registers: Vec<(String, usize)> = registers.into_iter().map(|(n, q)| (n.into(), q)).collect();
        for (idx, (name, _)) in registers.iter().enumerate() {
            if registers[..idx].iter().any(|(other, _)| other == name) {
                return Err(QsimError::DuplicateRegister(name.clone()));
            }
        }
        let total: usize = registers.iter().map(|(_, q)| q).sum();
        if total > cap {
            return Err(QsimError::CapExceeded { requested: total, cap });
        }
        Ok(Self { registers, cap })
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.registers
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn total_qubits(&self) -> usize {
        self.registers.iter().map(|(_, q)| q).sum()
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|(n, _)| n == name)
    }

    pub fn width(&self, name: &str) -> Result<usize, QsimError> {
        self.registers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, q)| *q)
            .ok_or_else(|| QsimError::UnknownRegister(name.to_string()))
    }

    /// Bit shift of the register's least significant qubit inside a basis index.
    pub fn shift(&self, name: &str) -> Result<usize, QsimError> {
        let pos = self
            .registers
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| QsimError::UnknownRegister(name.to_string()))?;
        Ok(self.registers[pos + 1..].iter().map(|(_, q)| q).sum())
    }

    /// Value held by `name` in basis index `index`.
    pub fn extract(&self, index: usize, name: &str) -> Result<usize, QsimError> {
        let width = self.width(name)?;
        let shift = self.shift(name)?;
        Ok((index >> shift) & ((1usize << width) - 1))
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &RegisterLayout) -> Result<RegisterLayout, QsimError> {
        let regs = self.registers.iter().chain(other.registers.iter()).cloned();
        RegisterLayout::with_cap(regs, self.cap.max(other.cap))
    }

    /// Positions of a list of registers, read as one combined value with the
    /// first listed register most significant. Returns per-value index offsets
    /// and the mask of all covered bits.
    pub(crate) fn offsets(&self, targets: &[&str]) -> Result<(Vec<usize>, usize), QsimError> {
        let mut fields = Vec::with_capacity(targets.len());
        for (idx, t) in targets.iter().enumerate() {
            if targets[..idx].contains(t) {
                return Err(QsimError::DuplicateRegister((*t).to_string()));
            }
            fields.push((self.width(t)?, self.shift(t)?));
        }
        let total: usize = fields.iter().map(|(w, _)| w).sum();
        let mut mask = 0usize;
        for &(w, s) in &fields {
            mask |= ((1usize << w) - 1) << s;
        }
        let offsets = (0..1usize << total)
            .map(|v| {
                let mut rest = total;
                let mut off = 0usize;
                for &(w, s) in &fields {
                    rest -= w;
                    off |= ((v >> rest) & ((1usize << w) - 1)) << s;
                }
                off
            })
            .collect();
        Ok((offsets, mask))
    }
}
