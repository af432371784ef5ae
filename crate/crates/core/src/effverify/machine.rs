use serde::{Deserialize, Serialize};

use super::EffError;
use crate::protocol::mix64;

pub const REGISTERS: usize = 8;

/// Instructions of the step-bounded register machine. Every instruction,
/// `Halt` included, costs one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instr {
    Const(u8, u64),
    Input(u8, u8),
    Xor(u8, u8, u8),
    Add(u8, u8, u8),
    Mod(u8, u8, u8),
    Mix(u8),
    Dec(u8),
    /// Jump to the absolute instruction index when the register is nonzero.
    Jnz(u8, u16),
    /// Append the low `width` bytes of a register, big-endian.
    Out(u8, u8),
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub instrs: Vec<Instr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: Vec<u8>,
    pub steps: u64,
}

impl Program {
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("programs serialize")
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, EffError> {
        serde_json::from_slice(b).map_err(|e| EffError::BackendFailure(format!("program: {e}")))
    }

    /// Runs on `input` for at most `budget` steps.
    pub fn run(&self, input: &[u64], budget: u64) -> Result<Execution, EffError> {
        let mut r = [0u64; REGISTERS];
        let mut output = Vec::new();
        let mut pc = 0usize;
        let mut steps = 0u64;
        let reg = |i: u8| -> Result<usize, EffError> {
            let i = i as usize;
            if i < REGISTERS {
                Ok(i)
            } else {
                Err(EffError::BackendFailure(format!("register r{i} out of range")))
            }
        };
        loop {
            if steps == budget {
                return Err(EffError::BackendFailure(format!("step budget {budget} exhausted")));
            }
            let ins = *self.instrs.get(pc).ok_or_else(|| EffError::BackendFailure(format!("pc {pc} out of range")))?;
            steps += 1;
            pc += 1;
            match ins {
                Instr::Const(d, v) => r[reg(d)?] = v,
                Instr::Input(d, k) => {
                    r[reg(d)?] = *input
                        .get(k as usize)
                        .ok_or_else(|| EffError::BackendFailure(format!("input word {k} missing")))?
                }
                Instr::Xor(d, a, b) => r[reg(d)?] = r[reg(a)?] ^ r[reg(b)?],
                Instr::Add(d, a, b) => r[reg(d)?] = r[reg(a)?].wrapping_add(r[reg(b)?]),
                Instr::Mod(d, a, b) => {
                    let m = r[reg(b)?];
                    if m == 0 {
                        return Err(EffError::BackendFailure("modulus zero".into()));
                    }
                    r[reg(d)?] = r[reg(a)?] % m;
                }
                Instr::Mix(d) => r[reg(d)?] = mix64(r[reg(d)?]),
                Instr::Dec(d) => r[reg(d)?] = r[reg(d)?].wrapping_sub(1),
                Instr::Jnz(d, t) => {
                    if r[reg(d)?] != 0 {
                        pc = t as usize;
                    }
                }
                Instr::Out(d, w) => {
                    if !(1..=8).contains(&w) {
                        return Err(EffError::BackendFailure(format!("output width {w}")));
                    }
                    output.extend_from_slice(&r[reg(d)?].to_be_bytes()[8 - w as usize..]);
                }
                Instr::Halt => return Ok(Execution { output, steps }),
            }
        }
    }
}
