//! Normalized statevectors over `2^n` computational basis states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};
use crate::pauli::{check_dense_cap, PauliString, PauliSum};

/// Tolerance for accepting a user-supplied amplitude vector as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Norm drift beyond this during evolution is reported as an engine bug.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`, which must have length `2^n_qubits` and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        check_dense_cap(n_qubits)?;
        ensure_dim(1 << n_qubits, amplitudes.len())?;
        let state = StateVector {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Normalization { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Fails with [`Error::Normalization`] when the norm has drifted past [`NORM_DRIFT_LIMIT`].
    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
            Err(Error::Normalization { norm })
        } else {
            Ok(())
        }
    }
}

/// Product state from a label over `{0, 1, +, -}`, qubit 0 leftmost.
pub fn prepare_product_state(label: &str) -> Result<StateVector> {
    let chars: Vec<char> = label.chars().map(normalize_sign).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty state label".into()));
    }
    let mut singles = Vec::with_capacity(chars.len());
    for c in &chars {
        let amp = match c {
            '0' => [Complex64::new(1.0, 0.0), ZERO],
            '1' => [ZERO, Complex64::new(1.0, 0.0)],
            '+' => [Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
            '-' => [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ],
            other => {
                return Err(Error::Parse(format!(
                    "invalid state label character {other:?} in {label:?}"
                )))
            }
        };
        singles.push(amp);
    }
    let n = singles.len();
    check_dense_cap(n)?;
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for single in &singles {
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| [a * single[0], a * single[1]])
            .collect();
    }
    StateVector::from_amplitudes(n, amplitudes)
}

// Accept the typographic minus so labels copied from documents parse.
fn normalize_sign(c: char) -> char {
    if c == '−' {
        '-'
    } else {
        c
    }
}

/// Computational basis state for a bitstring, qubit 0 leftmost.
pub fn prepare_basis_state(n_qubits: usize, label: &str) -> Result<StateVector> {
    ensure_dim(n_qubits, label.chars().count())?;
    if let Some(bad) = label.chars().find(|c| !matches!(c, '0' | '1')) {
        return Err(Error::Parse(format!(
            "invalid bit {bad:?} in basis label {label:?}"
        )));
    }
    prepare_product_state(label)
}

/// Tensor product of `|+>` / `|->` states.
pub fn prepare_pm_state(n_qubits: usize, signs: &str) -> Result<StateVector> {
    ensure_dim(n_qubits, signs.chars().count())?;
    if let Some(bad) = signs
        .chars()
        .map(normalize_sign)
        .find(|c| !matches!(c, '+' | '-'))
    {
        return Err(Error::Parse(format!(
            "invalid sign {bad:?} in label {signs:?}"
        )));
    }
    prepare_product_state(signs)
}

/// `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `<state|P|state>` for a single Pauli string; always real.
pub fn pauli_expectation(state: &StateVector, string: &PauliString) -> Result<f64> {
    ensure_dim(state.n_qubits, string.n_qubits())?;
    let amps = &state.amplitudes;
    let mut acc = ZERO;
    for (i, a) in amps.iter().enumerate() {
        let (j, phase) = string.act_on_basis(i);
        acc += amps[j].conj() * phase.apply(*a);
    }
    Ok(acc.re)
}

/// `<state|O|state>` accumulated term by term.
pub fn expectation(state: &StateVector, observable: &PauliSum) -> Result<f64> {
    ensure_dim(state.n_qubits, observable.n_qubits())?;
    let mut total = 0.0;
    for (c, s) in observable.terms() {
        total += c * pauli_expectation(state, s)?;
    }
    Ok(total)
}

/// Pairwise `|<a|b>|` maximum over distinct members.
pub fn max_pairwise_overlap(states: &[StateVector]) -> Result<(f64, usize, usize)> {
    let mut worst = (0.0, 0, 0);
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let o = overlap(&states[i], &states[j])?.norm();
            if o > worst.0 {
                worst = (o, i, j);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn basis_states() {
        let s = prepare_basis_state(3, "000").unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
        let s = prepare_basis_state(3, "100").unwrap();
        assert_eq!(s.amplitudes()[4], Complex64::new(1.0, 0.0));
        let s = prepare_basis_state(1, "1").unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, Complex64::new(1.0, 0.0)]);
        assert!(prepare_basis_state(2, "0x").is_err());
        assert!(prepare_basis_state(2, "000").is_err());
        assert!(prepare_basis_state(2, "+0").is_err());
    }

    #[test]
    fn pm_states() {
        let s = prepare_pm_state(1, "+").unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        let s = prepare_pm_state(2, "+−").unwrap();
        let expected = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!(close(*a, Complex64::new(e, 0.0)));
        }
        let a = prepare_pm_state(3, "-++").unwrap();
        let b = prepare_pm_state(3, "--+").unwrap();
        assert!(overlap(&a, &b).unwrap().norm() < 1e-15);
        assert!(prepare_pm_state(2, "+0").is_err());
        assert!(prepare_pm_state(2, "+").is_err());
    }

    #[test]
    fn expectations() {
        let zero = prepare_basis_state(1, "0").unwrap();
        let plus = prepare_pm_state(1, "+").unwrap();
        let z: PauliSum = "1 Z".parse().unwrap();
        assert_eq!(expectation(&zero, &z).unwrap(), 1.0);
        assert!(expectation(&plus, &z).unwrap().abs() < 1e-15);
        let y: PauliSum = "1 Y".parse().unwrap();
        assert!(expectation(&plus, &y).unwrap().abs() < 1e-15);
        assert!(expectation(&zero, &"1 ZZ".parse().unwrap()).is_err());
    }

    #[test]
    fn overlaps() {
        let zero = prepare_basis_state(1, "0").unwrap();
        let one = prepare_basis_state(1, "1").unwrap();
        let plus = prepare_pm_state(1, "+").unwrap();
        assert!(close(overlap(&plus, &plus).unwrap(), Complex64::new(1.0, 0.0)));
        assert_eq!(overlap(&zero, &one).unwrap(), ZERO);
        assert!(close(
            overlap(&zero, &plus).unwrap(),
            Complex64::new(FRAC_1_SQRT_2, 0.0)
        ));
        assert!(overlap(&zero, &prepare_basis_state(2, "00").unwrap()).is_err());
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            StateVector::from_amplitudes(1, bad),
            Err(Error::Normalization { .. })
        ));
        assert!(StateVector::from_amplitudes(1, vec![Complex64::new(1.0, 0.0)]).is_err());
    }
}
