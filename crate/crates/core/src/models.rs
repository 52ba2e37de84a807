//! Problem builders: the three-qubit LiH Hamiltonian, the local control
//! Hamiltonians used with it, and seeded random problems for tests.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{check_dense_cap, commutator_i, Pauli, PauliString, PauliSum};
use crate::spectrum::diagonalize;

/// Name of the built-in LiH preset (STO-6G, Bravyi-Kitaev, R = 2.5).
pub const LIH_PRESET: &str = "lih-sto6g-R2.5";

/// The same coefficients placed on the terms in the order the Hamiltonian is
/// usually typeset, which pairs unequal XX/YY coefficients.
pub const LIH_PRESET_AS_TYPESET: &str = "lih-sto6g-R2.5-as-typeset";

const LIH_R25: [f64; 13] = [
    -7.0582, 0.0094, -0.2857, -0.347, 0.0152, 0.0152, 0.0102, 0.0102, 0.1957, 0.2202, 0.0208,
    0.0208, 0.2563,
];

/// How the 13 tabulated coefficients `g_0..g_12` are assigned to Pauli strings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiHTermOrder {
    /// `I, Z0, Z1, Z2, X1X0, Y1Y0, X2X0, Y2Y0, Z1Z0, Z2Z0, X2X1, Y2Y1, Z2Z1`.
    ///
    /// The coefficient table lists each hopping pair's XX and YY entries next
    /// to each other with equal values, as required for a real
    /// number-conserving Hamiltonian.
    #[default]
    Tabulated,
    /// `I, Z0, Z1, Z2, Z1Z0, Z2Z0, Z2Z1, X1X0, Y1Y0, X2X0, Y2Y0, X2X1, Y2Y1`.
    Typeset,
}

impl LiHTermOrder {
    /// Pauli strings for `g_0..g_12`, qubit 0 leftmost.
    pub fn labels(self) -> [&'static str; 13] {
        match self {
            LiHTermOrder::Tabulated => [
                "III", "ZII", "IZI", "IIZ", "XXI", "YYI", "XIX", "YIY", "ZZI", "ZIZ", "IXX",
                "IYY", "IZZ",
            ],
            LiHTermOrder::Typeset => [
                "III", "ZII", "IZI", "IIZ", "ZZI", "ZIZ", "IZZ", "XXI", "YYI", "XIX", "YIY",
                "IXX", "IYY",
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiHCoefficients {
    pub g: [f64; 13],
    /// Bond distance in Angstrom; metadata only.
    pub bond_distance: f64,
    pub order: LiHTermOrder,
}

impl Default for LiHCoefficients {
    fn default() -> Self {
        LiHCoefficients {
            g: LIH_R25,
            bond_distance: 2.5,
            order: LiHTermOrder::Tabulated,
        }
    }
}

impl LiHCoefficients {
    pub fn from_slice(g: &[f64], bond_distance: f64, order: LiHTermOrder) -> Result<Self> {
        let g: [f64; 13] = g.try_into().map_err(|_| Error::Dimension {
            expected: 13,
            found: g.len(),
        })?;
        Ok(LiHCoefficients {
            g,
            bond_distance,
            order,
        })
    }
}

pub fn build_lih_hamiltonian(c: &LiHCoefficients) -> Result<PauliSum> {
    let terms = c
        .order
        .labels()
        .iter()
        .zip(c.g)
        .map(|(label, g)| Ok((g, label.parse::<PauliString>()?)))
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(3, terms)
}

/// `Z_j + X_j` for every qubit `j`.
pub fn local_zx_controls(n_qubits: usize) -> Result<Vec<PauliSum>> {
    (0..n_qubits)
        .map(|q| {
            PauliSum::new(
                n_qubits,
                [
                    (1.0, PauliString::single(n_qubits, q, Pauli::Z)?),
                    (1.0, PauliString::single(n_qubits, q, Pauli::X)?),
                ],
            )
        })
        .collect()
}

/// The three controls used with the LiH model.
pub fn build_paper_controls() -> Vec<PauliSum> {
    local_zx_controls(3).expect("three qubits is within limits")
}

/// Built-in Hamiltonians by name.
pub fn preset_model(name: &str) -> Option<PauliSum> {
    let order = match name {
        LIH_PRESET => LiHTermOrder::Tabulated,
        LIH_PRESET_AS_TYPESET => LiHTermOrder::Typeset,
        _ => return None,
    };
    let coeffs = LiHCoefficients {
        order,
        ..LiHCoefficients::default()
    };
    Some(build_lih_hamiltonian(&coeffs).expect("preset is well formed"))
}

pub fn preset_names() -> &'static [&'static str] {
    &[LIH_PRESET, LIH_PRESET_AS_TYPESET]
}

const GENERATION_ATTEMPTS: usize = 200;
const MIN_SPECTRAL_GAP: f64 = 1e-6;

/// A seeded random drift with a non-degenerate spectrum and one control that
/// does not commute with it.
pub fn random_problem(
    n_qubits: usize,
    n_terms: usize,
    seed: u64,
) -> Result<(PauliSum, Vec<PauliSum>)> {
    check_dense_cap(n_qubits)?;
    if n_qubits == 0 || n_terms == 0 {
        return Err(Error::Generation("need at least one qubit and one term".into()));
    }
    let available = (1usize << (2 * n_qubits)) - 1;
    if n_terms > available {
        return Err(Error::Generation(format!(
            "{n_terms} distinct non-identity strings requested on {n_qubits} qubits (max {available})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut drift = None;
    for _ in 0..GENERATION_ATTEMPTS {
        let candidate = random_sum(&mut rng, n_qubits, n_terms, 0.1..1.0)?;
        let spectrum = diagonalize(&candidate)?;
        let gap = spectrum
            .eigenvalues()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if gap >= MIN_SPECTRAL_GAP {
            drift = Some(candidate);
            break;
        }
    }
    let drift = drift.ok_or_else(|| {
        Error::Generation(format!(
            "no non-degenerate drift with {n_terms} terms on {n_qubits} qubits after {GENERATION_ATTEMPTS} attempts"
        ))
    })?;

    for _ in 0..GENERATION_ATTEMPTS {
        let control = random_sum(&mut rng, n_qubits, n_qubits.min(available), 0.5..1.5)?;
        if !commutator_i(&control, &drift)?.is_empty() {
            return Ok((drift, vec![control]));
        }
    }
    Err(Error::Generation(
        "no control failing to commute with the drift was found".into(),
    ))
}

fn random_sum(
    rng: &mut ChaCha8Rng,
    n_qubits: usize,
    n_terms: usize,
    magnitude: std::ops::Range<f64>,
) -> Result<PauliSum> {
    const FACTORS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut strings: Vec<PauliString> = Vec::with_capacity(n_terms);
    while strings.len() < n_terms {
        let factors: Vec<Pauli> = (0..n_qubits)
            .map(|_| *FACTORS.choose(rng).expect("non-empty"))
            .collect();
        let s = PauliString::from_factors(&factors)?;
        if !s.is_identity() && !strings.contains(&s) {
            strings.push(s);
        }
    }
    let terms = strings.into_iter().map(|s| {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        (sign * rng.random_range(magnitude.clone()), s)
    });
    PauliSum::new(n_qubits, terms.collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{expectation, prepare_pm_state};

    #[test]
    fn lih_has_thirteen_terms_and_expected_trace() {
        for order in [LiHTermOrder::Tabulated, LiHTermOrder::Typeset] {
            let h = build_lih_hamiltonian(&LiHCoefficients {
                order,
                ..Default::default()
            })
            .unwrap();
            assert_eq!(h.len(), 13);
            let trace: f64 = h.to_dense().unwrap().trace().re;
            assert!((trace - 8.0 * -7.0582).abs() < 1e-12);
        }
    }

    #[test]
    fn tabulated_order_pairs_equal_hopping_coefficients() {
        let h = preset_model(LIH_PRESET).unwrap();
        for (xx, yy) in [("XXI", "YYI"), ("XIX", "YIY"), ("IXX", "IYY")] {
            let a = h.coefficient(&xx.parse().unwrap());
            let b = h.coefficient(&yy.parse().unwrap());
            assert_eq!(a, b, "{xx}/{yy}");
        }
        assert_eq!(h.coefficient(&"IZZ".parse().unwrap()), 0.2563);
        let typeset = preset_model(LIH_PRESET_AS_TYPESET).unwrap();
        assert_eq!(typeset.coefficient(&"IYY".parse().unwrap()), 0.2563);
        assert!(preset_model("h2").is_none());
    }

    #[test]
    fn degenerate_coefficient_sets() {
        let zero = LiHCoefficients::from_slice(&[0.0; 13], 1.0, LiHTermOrder::Tabulated).unwrap();
        assert!(build_lih_hamiltonian(&zero).unwrap().is_empty());
        let mut g = [0.0; 13];
        g[0] = 1.0;
        let id = LiHCoefficients::from_slice(&g, 1.0, LiHTermOrder::Tabulated).unwrap();
        let h = build_lih_hamiltonian(&id).unwrap();
        for label in ["+-+", "---", "+++"] {
            let s = prepare_pm_state(3, label).unwrap();
            assert!((expectation(&s, &h).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(LiHCoefficients::from_slice(&[0.0; 12], 1.0, LiHTermOrder::Tabulated).is_err());
    }

    #[test]
    fn local_zx_controls() {
        let controls = build_paper_controls();
        assert_eq!(controls.len(), 3);
        assert_eq!(controls[0], "1 ZII; 1 XII".parse().unwrap());
        for c in &controls {
            assert_eq!(c.len(), 2);
            assert!(c.terms().iter().all(|(w, _)| *w == 1.0));
        }
        for j in 0..3 {
            for k in 0..3 {
                if j != k {
                    assert!(commutator_i(&controls[j], &controls[k]).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn random_problems_are_deterministic_and_noncommuting() {
        let a = random_problem(3, 6, 11).unwrap();
        let b = random_problem(3, 6, 11).unwrap();
        assert_eq!(a, b);
        for seed in 0..20 {
            let (drift, controls) = random_problem(2, 4, seed).unwrap();
            assert!(!commutator_i(&controls[0], &drift).unwrap().is_empty());
        }
        let (drift, _) = random_problem(1, 1, 3).unwrap();
        assert_eq!(drift.len(), 1);
        assert!(random_problem(1, 4, 0).is_err());
        assert!(random_problem(13, 2, 0).is_err());
    }
}
