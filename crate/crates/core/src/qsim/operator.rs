use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QsimError;
use crate::tol::ATOL;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Unitary,
    Projector,
    Hermitian,
    General,
}

/// Dense square operator of power-of-two dimension with a checked kind tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: CMatrix,
    kind: OperatorKind,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-norm of `U†U − I`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// Max of `‖P² − P‖` and `‖P − P†‖`.
pub fn projector_residual(m: &CMatrix) -> f64 {
    max_abs(&(m * m - m)).max(max_abs(&(m - m.adjoint())))
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

impl Operator {
    pub fn new(entries: CMatrix, kind: OperatorKind) -> Result<Self, QsimError> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(QsimError::DimensionMismatch { expected: n, found: entries.ncols() });
        }
        if !n.is_power_of_two() {
            return Err(QsimError::InvalidOperator(format!("dimension {n} is not a power of two")));
        }
        match kind {
            OperatorKind::Unitary if unitarity_residual(&entries) > ATOL => return Err(QsimError::NotUnitary),
            OperatorKind::Projector if projector_residual(&entries) > ATOL => return Err(QsimError::NotAProjector),
            OperatorKind::Hermitian if hermitian_residual(&entries) > ATOL => {
                return Err(QsimError::InvalidOperator("not hermitian".into()))
            }
            _ => {}
        }
        Ok(Self { entries, kind })
    }

    pub fn unitary(entries: CMatrix) -> Result<Self, QsimError> {
        Self::new(entries, OperatorKind::Unitary)
    }

    pub fn projector(entries: CMatrix) -> Result<Self, QsimError> {
        Self::new(entries, OperatorKind::Projector)
    }

    pub fn hermitian(entries: CMatrix) -> Result<Self, QsimError> {
        Self::new(entries, OperatorKind::Hermitian)
    }

    pub fn general(entries: CMatrix) -> Result<Self, QsimError> {
        Self::new(entries, OperatorKind::General)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim, dim), kind: OperatorKind::Unitary }
    }

    pub fn zero_projector(dim: usize) -> Self {
        Self { entries: CMatrix::zeros(dim, dim), kind: OperatorKind::Projector }
    }

    /// Projector onto the span of orthonormal columns.
    pub fn projector_onto(columns: &CMatrix) -> Result<Self, QsimError> {
        Self::projector(columns * columns.adjoint())
    }

    /// Diagonal projector selecting the basis states for which `keep` is true.
    pub fn diagonal_projector(dim: usize, keep: impl Fn(usize) -> bool) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            if keep(i) {
                m[(i, i)] = Complex64::new(1.0, 0.0);
            }
        }
        Self { entries: m, kind: OperatorKind::Projector }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), kind: self.kind }
    }

    /// Product `self · rhs`; the kind is kept only when both are unitary.
    pub fn compose(&self, rhs: &Operator) -> Result<Self, QsimError> {
        if self.dim() != rhs.dim() {
            return Err(QsimError::DimensionMismatch { expected: self.dim(), found: rhs.dim() });
        }
        let kind = if self.kind == OperatorKind::Unitary && rhs.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(Self { entries: &self.entries * &rhs.entries, kind })
    }

    /// Kronecker product, `self` acting on the more significant factor.
    pub fn kron(&self, rhs: &Operator) -> Self {
        let kind = if self.kind == rhs.kind { self.kind } else { OperatorKind::General };
        Self { entries: self.entries.kronecker(&rhs.entries), kind }
    }
}
