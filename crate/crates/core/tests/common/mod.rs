//! Dense reference implementations used as independent oracles.
//!
//! Nothing here calls the library's dense realization, eigensolver or
//! propagators: Pauli matrices are built by Kronecker products of the 2x2
//! matrices and exponentials use a scaled Taylor series.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qfeedback_core::{Pauli, PauliSum, StateVector};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(p: Pauli) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match p {
        Pauli::I => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => CMat::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Pauli::Z => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Dense matrix of a Pauli sum via Kronecker products, qubit 0 as the
/// leftmost (most significant) factor.
pub fn kron_dense(sum: &PauliSum) -> CMat {
    let dim = 1usize << sum.n_qubits();
    let mut total = CMat::zeros(dim, dim);
    for (coef, s) in sum.terms() {
        let mut m = CMat::from_element(1, 1, c(1.0, 0.0));
        for f in s.factors() {
            m = m.kronecker(&pauli_2x2(f));
        }
        total += m * c(*coef, 0.0);
    }
    total
}

pub fn commutator_i_dense(a: &CMat, b: &CMat) -> CMat {
    (a * b - b * a) * c(0.0, 1.0)
}

/// `exp(-i t H)` by scaling and squaring a truncated Taylor series.
pub fn expm_minus_i(h: &CMat, t: f64) -> CMat {
    let n = h.nrows();
    let a = h * c(0.0, -t);
    let norm: f64 = a.iter().map(|v| v.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as u32) + 4;
    let scaled = &a / c(2f64.powi(squarings as i32), 0.0);
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / c(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn vec_of(state: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(state.amplitudes())
}

pub fn quadratic_form(v: &DVector<Complex64>, m: &CMat) -> Complex64 {
    v.dotc(&(m * v))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}
