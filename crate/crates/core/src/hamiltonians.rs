//! Problem, beginning, and interpolated Hamiltonians.
//!
//! Everything is stored densely. The path between the beginning Hamiltonian
//! `H_B` and the problem Hamiltonian `H_P` is always the straight line
//! `H(s) = (1 - s) H_B + s H_P`, so `dH/ds = H_P - H_B` is constant.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grover::{grover_cost, GroverInstance};
use crate::linalg::{c, hermitian_residual, CMatrix, CVector};

/// Default limit on the number of system qubits for full-space operators.
pub const DEFAULT_MAX_QUBITS: usize = 14;

const HERMITIAN_TOL: f64 = 1e-12;

/// A non-negative cost `h(z)` over `n`-bit strings `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostFunction {
    n: usize,
    values: Vec<f64>,
}

impl CostFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cost function needs n >= 1".into()));
        }
        if n >= usize::BITS as usize || values.len() != 1usize << n {
            return Err(Error::InvalidInput(format!(
                "cost table for n = {n} must have 2^n entries, got {}",
                values.len()
            )));
        }
        if let Some((z, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "cost value h({z}) = {v} must be finite and non-negative"
            )));
        }
        Ok(Self { n, values })
    }

    /// Parses `{"n": .., "values": [..]}` or `{"grover": {"n": .., "w": ..}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CostDocument = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("cost document: {e}")))?;
        doc.into_cost()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices attaining the minimum cost.
    pub fn minimizers(&self) -> Vec<usize> {
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        (0..self.values.len())
            .filter(|&z| self.values[z] == min)
            .collect()
    }
}

impl Index<usize> for CostFunction {
    type Output = f64;

    fn index(&self, z: usize) -> &f64 {
        &self.values[z]
    }
}

/// On-disk description of a cost function.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum CostDocument {
    Grover { grover: GroverInstance },
    Table { n: usize, values: Vec<f64> },
}

impl CostDocument {
    pub fn into_cost(self) -> Result<CostFunction> {
        match self {
            CostDocument::Table { n, values } => CostFunction::new(n, values),
            CostDocument::Grover { grover } => {
                grover.validate()?;
                Ok(grover_cost(&grover))
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            CostDocument::Table { n, .. } => *n,
            CostDocument::Grover { grover } => grover.n,
        }
    }
}

/// Dense Hermitian matrix with an optional "known diagonal" tag.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    diagonal: bool,
}

impl HermitianOperator {
    /// Wraps a square matrix after checking Hermiticity to 1e-12.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidInput("operator dimension must be positive".into()));
        }
        let residual = hermitian_residual(&matrix);
        if !(residual <= HERMITIAN_TOL) {
            return Err(Error::numerical(format!(
                "operator is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(Self {
            matrix,
            diagonal: false,
        })
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let d = CVector::from_iterator(values.len(), values.iter().map(|&v| c(v)));
        Self {
            matrix: CMatrix::from_diagonal(&d),
            diagonal: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_diagonal(&vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermitian_residual(&self.matrix)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// a·self + b·other, keeping the diagonal tag when both are diagonal.
    fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            matrix: &self.matrix * c(a) + &other.matrix * c(b),
            diagonal: self.diagonal && other.diagonal,
        })
    }
}

fn check_qubits(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("qubit count must be >= 1".into()));
    }
    if n > cap {
        return Err(Error::Size {
            what: "qubits",
            value: n,
            cap,
        });
    }
    Ok(())
}

/// `H_P |z> = h(z) |z>`.
pub fn build_problem_hamiltonian(cost: &CostFunction) -> Result<HermitianOperator> {
    build_problem_hamiltonian_with_cap(cost, DEFAULT_MAX_QUBITS)
}

pub fn build_problem_hamiltonian_with_cap(
    cost: &CostFunction,
    max_qubits: usize,
) -> Result<HermitianOperator> {
    check_qubits(cost.n(), max_qubits)?;
    Ok(HermitianOperator::from_diagonal(cost.values()))
}

/// `Σ_j (1 - σ_x^(j)) / 2` on `n` qubits.
///
/// Ground energy 0 with the uniform superposition as ground state.
pub fn build_transverse_beginning(n: usize) -> Result<HermitianOperator> {
    build_transverse_beginning_with_cap(n, DEFAULT_MAX_QUBITS)
}

pub fn build_transverse_beginning_with_cap(n: usize, max_qubits: usize) -> Result<HermitianOperator> {
    check_qubits(n, max_qubits)?;
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for z in 0..dim {
        m[(z, z)] = c(n as f64 / 2.0);
        for bit in 0..n {
            m[(z ^ (1 << bit), z)] -= c(0.5);
        }
    }
    Ok(HermitianOperator {
        matrix: m,
        diagonal: false,
    })
}

/// `(1 - s) hb + s hp`.
pub fn interpolate(hb: &HermitianOperator, hp: &HermitianOperator, s: f64) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            expected: "0 <= s <= 1",
        });
    }
    hb.combine(1.0 - s, hp, s)
}

/// `dH/ds = hp - hb` for the linear path.
pub fn interpolation_derivative(hb: &HermitianOperator, hp: &HermitianOperator) -> Result<HermitianOperator> {
    hp.combine(1.0, hb, -1.0)
}
