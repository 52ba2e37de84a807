//! Layer-by-layer feedback drivers.
//!
//! Both drivers build the same circuit shape: layer `k` applies the drift
//! propagator and then the control propagator with parameters `α_k`, after
//! which every register measures the commutator observables and the feedback
//! law produces `α_{k+1}`. The weighted driver applies one shared parameter
//! sequence to all registers.

use serde::Serialize;

use crate::error::{ensure_dim, Error, Result};
use crate::evolution::{ControlStage, LayerUnitary};
use crate::feedback::{
    falqon_controller, lyapunov_value, predict_layer_cost, weighted_controllers,
    CommutatorObservables, FeedbackConfig, FeedbackMode,
};
use crate::pauli::PauliSum;
use crate::spectrum::{diagonalize, fidelity, Spectrum};
use crate::state::{expectation, max_pairwise_overlap, StateVector};

/// Pairwise register overlap allowed at construction and after each layer.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// `p + 1` mutually orthogonal registers driven by one circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    registers: Vec<StateVector>,
}

impl Ensemble {
    pub fn new(registers: Vec<StateVector>) -> Result<Self> {
        let Some(first) = registers.first() else {
            return Err(Error::Config("an ensemble needs at least one register".into()));
        };
        let n = first.n_qubits();
        for r in &registers {
            ensure_dim(n, r.n_qubits())?;
        }
        let ensemble = Ensemble { registers };
        ensemble.check_orthogonal()?;
        Ok(ensemble)
    }

    pub fn registers(&self) -> &[StateVector] {
        &self.registers
    }

    pub fn into_registers(self) -> Vec<StateVector> {
        self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.registers[0].n_qubits()
    }

    pub fn max_overlap(&self) -> f64 {
        max_pairwise_overlap(&self.registers)
            .expect("registers share a dimension")
            .0
    }

    fn check_orthogonal(&self) -> Result<f64> {
        let (overlap, a, b) = max_pairwise_overlap(&self.registers)?;
        if overlap >= ORTHOGONALITY_TOLERANCE {
            return Err(Error::Orthogonality { a, b, overlap });
        }
        Ok(overlap)
    }
}

/// The algorithm's output: a layered circuit and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDescription {
    pub dt: f64,
    pub drift: PauliSum,
    pub controls: Vec<PauliSum>,
    /// `layers[k-1][j]` is `α_k^(j)`.
    pub layers: Vec<Vec<f64>>,
}

impl CircuitDescription {
    pub fn n_qubits(&self) -> usize {
        self.drift.n_qubits()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.controls.is_empty() {
            return Err(Error::Config("circuit has no control Hamiltonians".into()));
        }
        for c in &self.controls {
            ensure_dim(self.drift.n_qubits(), c.n_qubits())?;
        }
        for layer in &self.layers {
            ensure_dim(self.controls.len(), layer.len())?;
            if layer.iter().any(|a| !a.is_finite()) {
                return Err(Error::Config("non-finite layer parameter".into()));
            }
        }
        Ok(())
    }
}

/// Energies, fidelities and Lyapunov value of the registers at one point in time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub energies: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub lyapunov: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerRecord {
    /// One-based layer index `k`.
    pub layer: usize,
    /// `α_k^(j)`, applied in this layer; shared by every register.
    pub alphas: Vec<f64>,
    #[serde(flatten)]
    pub state: Snapshot,
    /// `b_values[q][j] = <φ_k^(q)| i[H_{c,j}, H_d] |φ_k^(q)>`.
    pub b_values: Vec<Vec<f64>>,
    /// Expectation estimations spent on this layer's feedback.
    pub estimations: usize,
    pub cumulative_estimations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunTrace {
    pub mode: FeedbackMode,
    pub weights: Vec<f64>,
    pub n_controls: usize,
    /// Distinct Pauli strings measured per register per layer.
    pub n_pauli_strings: usize,
    /// Register `q` is scored against eigenlevel `q`.
    pub exact_energies: Vec<f64>,
    pub initial: Snapshot,
    pub layers: Vec<LayerRecord>,
    /// `α_{l+1}`: computed after the last layer but never applied.
    pub next_alphas: Vec<f64>,
    /// Largest pairwise register overlap seen after any layer.
    pub max_overlap: f64,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn n_registers(&self) -> usize {
        self.weights.len()
    }

    pub fn last(&self) -> &Snapshot {
        self.layers.last().map_or(&self.initial, |l| &l.state)
    }

    /// `V_0, V_1, …, V_l`.
    pub fn lyapunov_series(&self) -> Vec<f64> {
        std::iter::once(self.initial.lyapunov)
            .chain(self.layers.iter().map(|l| l.state.lyapunov))
            .collect()
    }

    /// Largest single-step increase of `V`; non-positive for a descending run.
    pub fn max_lyapunov_increase(&self) -> f64 {
        self.lyapunov_series()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

enum Law<'a> {
    Single(&'a FeedbackConfig),
    Weighted(&'a FeedbackConfig),
}

struct Driver {
    drift: LayerUnitary,
    control: ControlStage,
    observables: CommutatorObservables,
    spectrum: Spectrum,
}

impl Driver {
    fn new(drift: &PauliSum, controls: &[PauliSum], dt: f64) -> Result<Self> {
        for c in controls {
            ensure_dim(drift.n_qubits(), c.n_qubits())?;
        }
        Ok(Driver {
            drift: LayerUnitary::drift(drift.clone(), dt)?,
            control: ControlStage::new(controls.to_vec(), dt)?,
            observables: CommutatorObservables::new(drift, controls)?,
            spectrum: diagonalize(drift)?,
        })
    }

    fn snapshot(&self, registers: &[StateVector], weights: &[f64]) -> Result<Snapshot> {
        let energies = registers
            .iter()
            .map(|s| expectation(s, self.drift.generator()))
            .collect::<Result<Vec<_>>>()?;
        let fidelities = registers
            .iter()
            .enumerate()
            .map(|(q, s)| fidelity(s, &self.spectrum, q))
            .collect::<Result<Vec<_>>>()?;
        let lyapunov = lyapunov_value(&energies, weights)?;
        Ok(Snapshot {
            energies,
            fidelities,
            lyapunov,
        })
    }

    fn run(
        &self,
        registers: Vec<StateVector>,
        cfg: &FeedbackConfig,
        law: Law<'_>,
        depth: usize,
    ) -> Result<(CircuitDescription, RunTrace)> {
        if depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        ensure_dim(self.control.controls().len(), cfg.n_controls())?;
        ensure_dim(cfg.n_registers(), registers.len())?;
        if registers.len() > self.spectrum.len() {
            return Err(Error::OutOfRange {
                index: registers.len(),
                limit: self.spectrum.len(),
            });
        }
        let mut ensemble = Ensemble::new(registers)?.into_registers();
        let p = ensemble.len() - 1;
        let per_layer = predict_layer_cost(p, self.observables.n_strings());

        let initial = self.snapshot(&ensemble, &cfg.weights)?;
        let mut alphas = cfg.alpha_init.clone();
        let mut layers = Vec::with_capacity(depth);
        let mut max_overlap: f64 = 0.0;
        for k in 1..=depth {
            for state in ensemble.iter_mut() {
                self.drift.apply(state, 1.0)?;
                self.control.apply(state, &alphas)?;
                state.check_normalized()?;
            }
            let (overlap, a, b) = max_pairwise_overlap(&ensemble)?;
            if overlap >= ORTHOGONALITY_TOLERANCE {
                return Err(Error::Orthogonality { a, b, overlap });
            }
            max_overlap = max_overlap.max(overlap);

            let b_values = ensemble
                .iter()
                .map(|s| self.observables.measure(s))
                .collect::<Result<Vec<_>>>()?;
            let next = match law {
                Law::Single(cfg) => cfg
                    .gains
                    .iter()
                    .zip(&b_values[0])
                    .map(|(gain, b)| gain * falqon_controller(*b))
                    .collect(),
                Law::Weighted(cfg) => {
                    let by_control: Vec<Vec<f64>> = (0..cfg.n_controls())
                        .map(|j| b_values.iter().map(|bq| bq[j]).collect())
                        .collect();
                    weighted_controllers(&by_control, cfg)?
                }
            };
            layers.push(LayerRecord {
                layer: k,
                alphas: std::mem::replace(&mut alphas, next),
                state: self.snapshot(&ensemble, &cfg.weights)?,
                b_values,
                estimations: per_layer,
                cumulative_estimations: per_layer * k,
            });
        }

        let circuit = CircuitDescription {
            dt: cfg.dt,
            drift: self.drift.generator().clone(),
            controls: self.control.controls().to_vec(),
            layers: layers.iter().map(|l| l.alphas.clone()).collect(),
        };
        let trace = RunTrace {
            mode: cfg.mode,
            weights: cfg.weights.clone(),
            n_controls: cfg.n_controls(),
            n_pauli_strings: self.observables.n_strings(),
            exact_energies: self.spectrum.eigenvalues()[..=p].to_vec(),
            initial,
            layers,
            next_alphas: alphas,
            max_overlap,
        };
        Ok((circuit, trace))
    }
}

/// Single-register feedback run targeting the ground state of `drift`.
pub fn run_falqon(
    drift: &PauliSum,
    controls: &[PauliSum],
    initial: &StateVector,
    cfg: &FeedbackConfig,
    depth: usize,
) -> Result<(CircuitDescription, RunTrace)> {
    cfg.validate()?;
    if cfg.mode != FeedbackMode::Falqon {
        return Err(Error::Config(format!(
            "run_falqon needs mode falqon, got {}",
            cfg.mode.as_str()
        )));
    }
    let driver = Driver::new(drift, controls, cfg.dt)?;
    driver.run(vec![initial.clone()], cfg, Law::Single(cfg), depth)
}

/// Weighted multi-register run targeting the lowest `p + 1` levels (or level
/// `p` alone in [`FeedbackMode::WeightedPthOnly`]).
pub fn run_wfqae(
    drift: &PauliSum,
    controls: &[PauliSum],
    initials: &Ensemble,
    cfg: &FeedbackConfig,
    depth: usize,
) -> Result<(CircuitDescription, RunTrace)> {
    cfg.validate()?;
    if cfg.mode == FeedbackMode::Falqon {
        return Err(Error::Config(
            "run_wfqae needs mode weighted_full or weighted_pth_only".into(),
        ));
    }
    let driver = Driver::new(drift, controls, cfg.dt)?;
    driver.run(initials.registers().to_vec(), cfg, Law::Weighted(cfg), depth)
}

/// Applies a recorded circuit to `initial` without feedback.
pub fn replay(circuit: &CircuitDescription, initial: &StateVector) -> Result<StateVector> {
    circuit.validate()?;
    ensure_dim(circuit.n_qubits(), initial.n_qubits())?;
    let drift = LayerUnitary::drift(circuit.drift.clone(), circuit.dt)?;
    let control = ControlStage::new(circuit.controls.clone(), circuit.dt)?;
    let mut state = initial.clone();
    for alphas in &circuit.layers {
        drift.apply(&mut state, 1.0)?;
        control.apply(&mut state, alphas)?;
        state.check_normalized()?;
    }
    Ok(state)
}
