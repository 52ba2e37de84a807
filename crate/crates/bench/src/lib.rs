//! Fixtures shared by the benchmarks under `benches/`.

use qfeedback_core::{
    build_paper_controls, prepare_pm_state, preset_model, random_problem, Ensemble,
    FeedbackConfig, FeedbackMode, PauliSum, StateVector, LIH_PRESET,
};

/// The LiH drift, its three local controls and the four-register ensemble.
pub struct LihProblem {
    pub drift: PauliSum,
    pub controls: Vec<PauliSum>,
    pub ensemble: Ensemble,
    pub config: FeedbackConfig,
}

pub fn lih_problem() -> LihProblem {
    let registers = ["-++", "--+", "+-+", "++-"]
        .iter()
        .map(|l| prepare_pm_state(3, l).expect("valid label"))
        .collect();
    LihProblem {
        drift: preset_model(LIH_PRESET).expect("preset exists"),
        controls: build_paper_controls(),
        ensemble: Ensemble::new(registers).expect("orthogonal registers"),
        config: FeedbackConfig::weighted(
            FeedbackMode::WeightedFull,
            0.05,
            vec![8.0, 6.0, 4.0, 2.0],
            3,
        ),
    }
}

/// A seeded drift with `4 n` terms and its random control on `n` qubits.
pub fn random_model(n_qubits: usize, seed: u64) -> (PauliSum, PauliSum) {
    let (drift, controls) = random_problem(n_qubits, 4 * n_qubits, seed).expect("generation succeeds");
    (drift, controls.into_iter().next().expect("one control"))
}

/// `|+…+⟩` on `n` qubits.
pub fn plus_state(n_qubits: usize) -> StateVector {
    prepare_pm_state(n_qubits, &"+".repeat(n_qubits)).expect("valid label")
}
