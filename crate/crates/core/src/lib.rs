//! Statevector simulation of feedback-based quantum algorithms.
//!
//! The crate builds Pauli-sum Hamiltonians, evolves exact statevectors through
//! layered circuits `U_c(α_k) U_d`, and chooses each layer's control parameters
//! from measured expectations of `i[H_c, H_d]` so that a Lyapunov function
//! never increases. A single register prepares the ground state; several
//! orthogonal registers sharing one circuit, weighted by strictly decreasing
//! weights, prepare the lowest `p + 1` eigenstates at once.
//!
//! ```
//! use qfeedback_core::{
//!     build_paper_controls, preset_model, prepare_pm_state, run_wfqae, Ensemble,
//!     FeedbackConfig, FeedbackMode, LIH_PRESET,
//! };
//!
//! let drift = preset_model(LIH_PRESET).unwrap();
//! let registers = ["-++", "--+", "+-+", "++-"]
//!     .iter()
//!     .map(|l| prepare_pm_state(3, l))
//!     .collect::<Result<Vec<_>, _>>()
//!     .unwrap();
//! let cfg = FeedbackConfig::weighted(
//!     FeedbackMode::WeightedFull,
//!     0.05,
//!     vec![8.0, 6.0, 4.0, 2.0],
//!     3,
//! );
//! let ensemble = Ensemble::new(registers).unwrap();
//! let (_circuit, trace) =
//!     run_wfqae(&drift, &build_paper_controls(), &ensemble, &cfg, 20).unwrap();
//! assert!(trace.last().fidelities.iter().all(|&f| f > 0.75));
//! ```

pub mod algorithms;
pub mod error;
pub mod evolution;
pub mod feedback;
pub mod io;
pub mod linalg;
pub mod models;
pub mod numfmt;
pub mod pauli;
pub mod spectrum;
pub mod state;

pub use algorithms::{
    replay, run_falqon, run_wfqae, CircuitDescription, Ensemble, LayerRecord, RunTrace, Snapshot,
    ORTHOGONALITY_TOLERANCE,
};
pub use error::{Error, Result};
pub use evolution::{apply_generator, ControlStage, LayerKind, LayerUnitary};
pub use feedback::{
    falqon_controller, lyapunov_value, predict_layer_cost, weighted_controller,
    weighted_controllers, CommutatorObservables, FeedbackConfig, FeedbackMode, Response,
};
pub use io::{trace_csv_header, write_trace_csv};
pub use models::{
    build_lih_hamiltonian, build_paper_controls, local_zx_controls, preset_model, preset_names,
    random_problem, LiHCoefficients, LiHTermOrder, LIH_PRESET, LIH_PRESET_AS_TYPESET,
};
pub use pauli::{
    commutator_i, scale_and_add, Pauli, PauliString, PauliSum, Phase, DENSE_QUBIT_CAP,
};
pub use spectrum::{diagonalize, fidelity, Spectrum, DEGENERACY_THRESHOLD};
pub use state::{
    expectation, overlap, pauli_expectation, prepare_basis_state, prepare_pm_state,
    prepare_product_state, StateVector,
};
