//! Structured 2n×2n matrices: the skew structure matrix `L`, the Hamiltonian
//! and symplectic predicates, the periodic pencil `(E_k, F)` with its period
//! products, and the ordered real Schur decomposition used to extract
//! invariant subspaces.

mod pencil;
mod schur;

pub use pencil::{build_pencil, ProductDiagnostics, SymplecticPencil};
pub use schur::{
    ordered_real_schur, OrderedSchur, SchurBlock, SpectrumOrdering, DEFAULT_UNIT_CIRCLE_TOL,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// The matrix `L = [0, I; -I, 0]` of size 2n×2n.
///
/// `Lᵀ = L⁻¹ = -L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureMatrix {
    n: usize,
}

impl StructureMatrix {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut l = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            l[(i, n + i)] = 1.0;
            l[(n + i, i)] = -1.0;
        }
        l
    }

    /// `L⁻¹`, which is `-L`.
    pub fn inverse(&self) -> DMatrix<f64> {
        -self.dense()
    }

    /// `L⁻¹ Mᵀ L`, the symplectic adjoint of `m`.
    pub fn adjoint(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let l = self.dense();
        -(&l * m.transpose() * &l)
    }
}

fn half_dimension(m: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols || rows % 2 != 0 {
        return Err(Error::OddDimension { rows, cols });
    }
    Ok(rows / 2)
}

/// `M` is Hamiltonian when `L⁻¹ Mᵀ L = -M`; checked as
/// `‖L⁻¹MᵀL + M‖ ≤ tol · max(1, ‖M‖)`.
pub fn is_hamiltonian(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let n = half_dimension(m)?;
    let residual = (StructureMatrix::new(n).adjoint(m) + m).norm();
    Ok(residual <= tol * m.norm().max(1.0))
}

/// `‖L⁻¹MᵀL·M - I‖` in the Frobenius norm.
pub fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let n = half_dimension(m)?;
    let product = StructureMatrix::new(n).adjoint(m) * m;
    Ok((product - DMatrix::identity(2 * n, 2 * n)).norm())
}

/// `M` is symplectic when `L⁻¹ Mᵀ L = M⁻¹`; checked in the inverse-free form
/// `‖L⁻¹MᵀL·M - I‖ ≤ tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    half_dimension(m)?;
    if linalg::checked_inverse(m).is_none() {
        return Err(Error::SingularInput);
    }
    Ok(symplectic_residual(m)? <= tol)
}

/// Largest `|log|λ_i| + log|λ_{2n+1-i}||` over the spectrum sorted by
/// modulus. Zero for an exactly symplectic matrix, whose eigenvalues pair as
/// `(λ, 1/λ)`.
pub fn reciprocal_spectrum_defect(m: &DMatrix<f64>) -> Result<f64> {
    half_dimension(m)?;
    let mut logs: Vec<f64> = linalg::eigenvalues(m)
        .iter()
        .map(|z| z.norm().ln())
        .collect();
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::SingularInput);
    }
    logs.sort_by(f64::total_cmp);
    Ok(logs
        .iter()
        .zip(logs.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max))
}
