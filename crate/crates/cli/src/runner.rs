//! Executes an experiment and writes its artifacts.
//!
//! A run directory holds `trace.csv`, `circuit.txt`, `report.json`,
//! `summary.txt` and, on request, `states.csv` with the final register
//! amplitudes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qfeedback_core::numfmt::{round12, sig12};
use qfeedback_core::{
    diagonalize, replay, run_falqon, run_wfqae, write_trace_csv, CircuitDescription, Ensemble,
    FeedbackMode, RunTrace, Spectrum, StateVector,
};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};

/// Largest tolerated single-layer increase of the Lyapunov function.
pub const DESCENT_TOLERANCE: f64 = 1e-9;

/// Lowest levels listed in summaries beyond the targeted ones.
const SUMMARY_LEVELS: usize = 8;

pub struct RunOutcome {
    pub circuit: CircuitDescription,
    pub trace: RunTrace,
    pub spectrum: Spectrum,
}

pub fn execute(exp: &Experiment) -> CliResult<RunOutcome> {
    let (circuit, trace) = match exp.feedback.mode {
        FeedbackMode::Falqon => run_falqon(
            &exp.drift,
            &exp.controls,
            &exp.registers[0],
            &exp.feedback,
            exp.depth,
        ),
        _ => {
            let ensemble = Ensemble::new(exp.registers.clone()).map_err(CliError::from_runtime)?;
            run_wfqae(&exp.drift, &exp.controls, &ensemble, &exp.feedback, exp.depth)
        }
    }
    .map_err(CliError::from_runtime)?;
    let spectrum = diagonalize(&exp.drift).map_err(CliError::from_runtime)?;
    Ok(RunOutcome { circuit, trace, spectrum })
}

/// Fails when `V` rose by more than [`DESCENT_TOLERANCE`] in any layer.
pub fn check_descent(trace: &RunTrace) -> CliResult<()> {
    let rise = trace.max_lyapunov_increase();
    if rise > DESCENT_TOLERANCE {
        let layer = trace
            .lyapunov_series()
            .windows(2)
            .position(|w| w[1] - w[0] == rise)
            .map_or(0, |i| i + 1);
        return Err(CliError::invariant(format!(
            "Lyapunov function rose by {} in layer {layer} (tolerance {DESCENT_TOLERANCE:e})",
            sig12(rise)
        )));
    }
    Ok(())
}

/// Final register states, recomputed by replaying the circuit.
pub fn final_states(exp: &Experiment, circuit: &CircuitDescription) -> CliResult<Vec<StateVector>> {
    exp.registers
        .iter()
        .map(|s| replay(circuit, s).map_err(CliError::from_runtime))
        .collect()
}

#[derive(Serialize)]
struct RegisterReport {
    register: usize,
    target_level: usize,
    exact_energy: f64,
    initial_energy: f64,
    final_energy: f64,
    initial_fidelity: f64,
    final_fidelity: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a ExperimentConfig,
    n_qubits: usize,
    n_controls: usize,
    depth: usize,
    eigenvalues: Vec<f64>,
    gaps: Vec<f64>,
    degenerate_groups: Vec<Vec<usize>>,
    registers: Vec<RegisterReport>,
    lyapunov_initial: f64,
    lyapunov_final: f64,
    max_lyapunov_increase: f64,
    max_overlap: f64,
    pauli_strings_per_register: usize,
    estimations_per_layer: usize,
    total_estimations: usize,
    next_alphas: Vec<f64>,
}

fn round_all(v: impl IntoIterator<Item = f64>) -> Vec<f64> {
    v.into_iter().map(round12).collect()
}

fn report<'a>(config: &'a ExperimentConfig, outcome: &RunOutcome) -> Report<'a> {
    let trace = &outcome.trace;
    let ev = outcome.spectrum.eigenvalues();
    let last = trace.last();
    let registers = (0..trace.n_registers())
        .map(|q| RegisterReport {
            register: q,
            target_level: q,
            exact_energy: round12(trace.exact_energies[q]),
            initial_energy: round12(trace.initial.energies[q]),
            final_energy: round12(last.energies[q]),
            initial_fidelity: round12(trace.initial.fidelities[q]),
            final_fidelity: round12(last.fidelities[q]),
        })
        .collect();
    let per_layer = trace.layers.first().map_or(0, |l| l.estimations);
    Report {
        config,
        n_qubits: outcome.circuit.n_qubits(),
        n_controls: trace.n_controls,
        depth: trace.len(),
        eigenvalues: round_all(ev.iter().copied()),
        gaps: round_all(ev.windows(2).map(|w| w[1] - w[0])),
        degenerate_groups: outcome
            .spectrum
            .degeneracy_groups()
            .into_iter()
            .filter(|g| g.len() > 1)
            .map(|g| g.collect())
            .collect(),
        registers,
        lyapunov_initial: round12(trace.initial.lyapunov),
        lyapunov_final: round12(last.lyapunov),
        max_lyapunov_increase: round12(trace.max_lyapunov_increase()),
        max_overlap: round12(trace.max_overlap),
        pauli_strings_per_register: trace.n_pauli_strings,
        estimations_per_layer: per_layer,
        total_estimations: trace.layers.last().map_or(0, |l| l.cumulative_estimations),
        next_alphas: round_all(trace.next_alphas.iter().copied()),
    }
}

/// Human-readable run summary: final fidelities, exact eigenvalues and gaps.
pub fn summary(outcome: &RunOutcome) -> String {
    let trace = &outcome.trace;
    let ev = outcome.spectrum.eigenvalues();
    let r = trace.n_registers();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} run: {} qubits, {} controls, {} registers, {} layers",
        trace.mode.as_str(),
        outcome.circuit.n_qubits(),
        trace.n_controls,
        r,
        trace.len()
    );
    let _ = writeln!(s, "\nexact spectrum (* targeted)");
    let _ = writeln!(s, "  {:>5}  {:>20}  {:>20}", "level", "eigenvalue", "gap to next");
    let shown = ev.len().min(r.max(SUMMARY_LEVELS));
    for (k, e) in ev.iter().enumerate().take(shown) {
        let gap = ev.get(k + 1).map_or(String::from("-"), |n| sig12(n - e));
        let mark = if k < r { '*' } else { ' ' };
        let _ = writeln!(s, "{mark} {k:>5}  {:>20}  {gap:>20}", sig12(*e));
    }
    if shown < ev.len() {
        let _ = writeln!(s, "  ({} higher levels omitted)", ev.len() - shown);
    }
    let last = trace.last();
    let _ = writeln!(s, "\nregisters after layer {}", trace.len());
    let _ = writeln!(
        s,
        "  {:>8}  {:>20}  {:>20}  {:>16}  {:>16}",
        "register", "energy", "|E - lambda|", "fidelity", "initial fid."
    );
    for q in 0..r {
        let _ = writeln!(
            s,
            "  {q:>8}  {:>20}  {:>20}  {:>16}  {:>16}",
            sig12(last.energies[q]),
            sig12((last.energies[q] - trace.exact_energies[q]).abs()),
            sig12(last.fidelities[q]),
            sig12(trace.initial.fidelities[q])
        );
    }
    let _ = writeln!(
        s,
        "\nLyapunov V: {} -> {} (largest step increase {})",
        sig12(trace.initial.lyapunov),
        sig12(last.lyapunov),
        sig12(trace.max_lyapunov_increase())
    );
    let _ = writeln!(s, "max pairwise register overlap: {}", sig12(trace.max_overlap));
    let per_layer = trace.layers.first().map_or(0, |l| l.estimations);
    let total = trace.layers.last().map_or(0, |l| l.cumulative_estimations);
    let _ = writeln!(
        s,
        "estimations: {per_layer} per layer ({} registers x {} Pauli strings), {total} total",
        r, trace.n_pauli_strings
    );
    s
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `trace.csv`, `circuit.txt`, `report.json`, `summary.txt` and, when
/// `states` is given, `states.csv`.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    outcome: &RunOutcome,
    states: Option<&[StateVector]>,
) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;

    let mut csv = Vec::new();
    write_trace_csv(&outcome.trace, &mut csv).map_err(CliError::from_runtime)?;
    write_file(&dir.join("trace.csv"), &csv)?;
    write_file(&dir.join("circuit.txt"), outcome.circuit.to_string().as_bytes())?;

    let json = serde_json::to_string_pretty(&report(config, outcome))
        .map_err(|e| CliError::io(e.to_string()))?;
    write_file(&dir.join("report.json"), format!("{json}\n").as_bytes())?;
    write_file(&dir.join("summary.txt"), summary(outcome).as_bytes())?;

    if let Some(states) = states {
        write_file(&dir.join("states.csv"), &states_csv(states)?)?;
    }
    Ok(())
}

/// One row per register and basis state: `register,basis,re,im`.
fn states_csv(states: &[StateVector]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::io(e.to_string());
    w.write_record(["register", "basis", "re", "im"]).map_err(err)?;
    for (q, s) in states.iter().enumerate() {
        let n = s.n_qubits();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let basis = format!("{i:0n$b}");
            w.write_record([q.to_string(), basis, sig12(a.re), sig12(a.im)])
                .map_err(err)?;
        }
    }
    w.into_inner().map_err(|e| CliError::io(e.to_string()))
}
