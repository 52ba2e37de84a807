//! Exact diagonalization of Pauli-sum Hamiltonians, used for fidelity targets
//! and as the independent oracle in tests.

use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::hermitian_eigen;
use crate::pauli::{check_dense_cap, PauliSum};
use crate::state::{overlap, StateVector};

/// Eigenvalues closer than this are treated as one eigenspace.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<StateVector>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[StateVector] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, level: usize) -> Result<&StateVector> {
        self.eigenvectors.get(level).ok_or(Error::OutOfRange {
            index: level,
            limit: self.len(),
        })
    }

    /// Indices of every level degenerate with `level`, as a contiguous range.
    pub fn degenerate_block(&self, level: usize) -> Result<std::ops::Range<usize>> {
        let target = *self.eigenvalues.get(level).ok_or(Error::OutOfRange {
            index: level,
            limit: self.len(),
        })?;
        let mut lo = level;
        while lo > 0 && (self.eigenvalues[lo - 1] - target).abs() < DEGENERACY_THRESHOLD {
            lo -= 1;
        }
        let mut hi = level + 1;
        while hi < self.len() && (self.eigenvalues[hi] - target).abs() < DEGENERACY_THRESHOLD {
            hi += 1;
        }
        Ok(lo..hi)
    }

    /// Groups ascending eigenvalues into degenerate blocks.
    pub fn degeneracy_groups(&self) -> Vec<std::ops::Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.len() {
            if i == self.len()
                || (self.eigenvalues[i] - self.eigenvalues[i - 1]).abs() >= DEGENERACY_THRESHOLD
            {
                groups.push(start..i);
                start = i;
            }
        }
        groups
    }
}

/// Full Hermitian eigendecomposition with ascending eigenvalues.
pub fn diagonalize(h: &PauliSum) -> Result<Spectrum> {
    check_dense_cap(h.n_qubits())?;
    let n = h.n_qubits();
    let eig = hermitian_eigen(&h.to_dense()?)?;
    let eigenvectors = (0..eig.vectors.ncols())
        .map(|k| {
            let col: Vec<Complex64> = eig.vectors.column(k).iter().copied().collect();
            StateVector::from_amplitudes(n, col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum {
        eigenvalues: eig.values,
        eigenvectors,
    })
}

/// Squared overlap of `state` with eigenvector `level`, or with the whole
/// eigenspace when `level` is degenerate.
pub fn fidelity(state: &StateVector, spectrum: &Spectrum, level: usize) -> Result<f64> {
    let block = spectrum.degenerate_block(level)?;
    ensure_dim(spectrum.eigenvectors[0].dim(), state.dim())?;
    let mut total = 0.0;
    for k in block {
        total += overlap(&spectrum.eigenvectors[k], state)?.norm_sqr();
    }
    Ok(total)
}
