//! Dense ground truth: exact evolution, partial traces and entropies.
//!
//! Entropies are in nats; [`LogBase`] converts for reporting.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::Statevector;
use crate::CMatrix;

/// Largest register handled by dense diagonalization.
pub const MAX_DENSE_QUBITS: usize = 12;

const EIGEN_CLIP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to `1e-10`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim < 2 || !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be 2^n × 2^n, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint()).iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if herm > 1e-10 {
            return Err(Error::InvalidArgument(format!("not Hermitian ({herm:.2e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("trace {tr} ≠ 1")));
        }
        let rho = Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        };
        let min = rho.raw_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_CLIP {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Eigenvalues with small negatives clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.raw_eigenvalues().into_iter().map(|l| l.max(0.0)).collect()
    }
}

/// Unit used when reporting entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    /// Converts an entropy in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

/// Precomputed eigendecomposition for repeated `e^{−iHt}` evaluations.
pub struct ExactPropagator {
    n_qubits: usize,
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl ExactPropagator {
    pub fn new(h: &PauliSum) -> Result<Self> {
        if h.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::DimensionTooLarge(h.n_qubits));
        }
        let eig = SymmetricEigen::new(h.to_matrix()?);
        Ok(Self {
            n_qubits: h.n_qubits,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn evolve(&self, state: &Statevector, t: f64) -> Result<Statevector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: state.n_qubits(),
            });
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        Statevector::from_amplitudes(out.iter().copied().collect())
    }
}

/// `e^{−iHt}|ψ⟩` by dense diagonalization.
pub fn exact_evolve(h: &PauliSum, state: &Statevector, t: f64) -> Result<Statevector> {
    ExactPropagator::new(h)?.evolve(state, t)
}

/// `ρ_keep = Tr_{rest} |ψ⟩⟨ψ|`; reduced index bit `j` is qubit `keep[j]`.
pub fn reduced_density_matrix(state: &Statevector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    validate_subsystem(keep, n)?;
    if keep.len() > MAX_DENSE_QUBITS {
        return Err(Error::DimensionTooLarge(keep.len()));
    }
    let env: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let (dk, de) = (1usize << keep.len(), 1usize << env.len());
    let mut a = CMatrix::zeros(dk, de);
    for (b, amp) in state.amplitudes().iter().enumerate() {
        let k = gather_bits(b, keep);
        let e = gather_bits(b, &env);
        a[(k, e)] = *amp;
    }
    let matrix = &a * a.adjoint();
    Ok(DensityMatrix {
        n_qubits: keep.len(),
        matrix,
    })
}

/// Checks that `keep` is a nonempty, duplicate-free proper subset of `0..n`.
pub fn validate_subsystem(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidSubsystem("subsystem is empty".into()));
    }
    for (i, &q) in keep.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
        }
        if keep[..i].contains(&q) {
            return Err(Error::InvalidSubsystem(format!("qubit {q} listed twice")));
        }
    }
    if keep.len() == n {
        return Err(Error::InvalidSubsystem(
            "subsystem must be a proper subset of the register".into(),
        ));
    }
    Ok(())
}

fn gather_bits(b: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((b >> q) & 1) << j))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.iter().map(|c| c.norm_sqr()).sum()
}

/// `S⁽ⁿ⁾ = log(Tr ρⁿ) / (1 − n)` in nats.
pub fn renyi_entropy(rho: &DensityMatrix, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Rényi order must be ≥ 2, got {n}")));
    }
    let tr = if n == 2 {
        purity(rho)
    } else {
        rho.eigenvalues().iter().map(|l| l.powi(n as i32)).sum()
    };
    Ok(tr.ln() / (1.0 - n as f64))
}

/// `−Σ λ log λ` in nats with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| l * l.ln())
        .sum::<f64>()
}
