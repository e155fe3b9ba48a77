//! Half-system reduced density matrices and their von Neumann entropy.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::Statevector;

/// `ρ_A = Tr_B |ψ⟩⟨ψ|` with `A` the first `N/2` qubits (the high bits of the
/// basis index).
pub fn partial_trace_half(state: &Statevector) -> Result<DMatrix<Complex64>> {
    let n = state.n_qubits();
    if n % 2 != 0 {
        return Err(Error::invalid(format!("cannot cut {n} qubits into equal halves")));
    }
    let d = 1usize << (n / 2);
    let m = DMatrix::from_row_slice(d, d, state.amplitudes());
    Ok(&m * m.adjoint())
}

/// `-Σ λ log₂ λ` over the eigenvalues of `rho`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DMatrix<Complex64>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::invalid("density matrix must be square"));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-6 || trace.im.abs() > 1e-6 {
        return Err(Error::invalid(format!("density matrix trace {trace} is not 1")));
    }
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Entropy of the half-system cut.
pub fn half_cut_entropy(state: &Statevector) -> Result<f64> {
    von_neumann_entropy(&partial_trace_half(state)?)
}

/// Binary entropy `H₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}
