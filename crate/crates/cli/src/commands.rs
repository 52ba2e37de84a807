//! The `run`, `spectrum` and `replay` verbs.

use std::io::Write;
use std::path::{Path, PathBuf};

use qfeedback_core::numfmt::sig12;
use qfeedback_core::{expectation, fidelity, replay, CircuitDescription};

use crate::config::{bundled_config, load_config};
use crate::error::{CliError, CliResult};
use crate::resolve::{resolve_model, resolve_state, spectrum_of};
use crate::runner::{check_descent, execute, final_states, summary, write_outputs, DESCENT_TOLERANCE};

/// Output directory used when neither `--out` nor the config names one.
pub const DEFAULT_OUTPUT_DIR: &str = "qfeedback-out";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Config file path or bundled config name.
    pub config: String,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub verbose: u8,
    pub print_config: bool,
    pub dump_states: bool,
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(format!("cannot write output: {e}")))
}

pub fn cmd_run(opts: &RunOptions, out: &mut dyn Write) -> CliResult<()> {
    let path = Path::new(&opts.config);
    let (text, base_dir) = if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        (text, path.parent().unwrap_or(Path::new(".")).to_path_buf())
    } else if let Some(text) = bundled_config(&opts.config) {
        (text.to_string(), PathBuf::from("."))
    } else {
        return Err(CliError::input(format!(
            "{:?} is neither a config file nor a bundled config",
            opts.config
        )));
    };
    let loaded = load_config(&text, &opts.config, &base_dir)?;

    if opts.print_config {
        return write_out(out, &loaded.config.to_toml());
    }

    let outcome = execute(&loaded.experiment)?;
    if opts.verbose > 0 {
        for layer in &outcome.trace.layers {
            let energies: Vec<String> = layer.state.energies.iter().map(|&e| sig12(e)).collect();
            eprintln!(
                "layer {:>4}  V {}  energies [{}]",
                layer.layer,
                sig12(layer.state.lyapunov),
                energies.join(", ")
            );
        }
    }

    let dir = opts
        .out
        .clone()
        .or_else(|| loaded.config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let states = if opts.dump_states {
        Some(final_states(&loaded.experiment, &outcome.circuit)?)
    } else {
        None
    };
    write_outputs(&dir, &loaded.config, &outcome, states.as_deref())?;

    write_out(out, &summary(&outcome))?;
    write_out(out, &format!("outputs written to {}\n", dir.display()))?;

    if opts.strict {
        check_descent(&outcome.trace)?;
    } else if outcome.trace.max_lyapunov_increase() > DESCENT_TOLERANCE {
        eprintln!(
            "warning: Lyapunov function rose by {} in some layer; dt may be too large",
            sig12(outcome.trace.max_lyapunov_increase())
        );
    }
    Ok(())
}

/// Prints the ascending spectrum with gaps and degeneracy groups; the lowest
/// `highlight` levels are starred.
pub fn cmd_spectrum(model: &str, seed: Option<u64>, highlight: usize, out: &mut dyn Write) -> CliResult<()> {
    let model = resolve_model(model, seed, Path::new(".")).map_err(CliError::input)?;
    let spectrum = spectrum_of(&model.drift).map_err(CliError::invariant)?;
    let ev = spectrum.eigenvalues();
    let groups = spectrum.degeneracy_groups();
    let mut text = format!(
        "{} qubits, {} levels, {} distinct\n",
        model.drift.n_qubits(),
        ev.len(),
        groups.len()
    );
    text.push_str(&format!("  {:>5}  {:>20}  {:>20}  {:>5}\n", "level", "eigenvalue", "gap to next", "group"));
    for (g, range) in groups.iter().enumerate() {
        for k in range.clone() {
            let gap = ev.get(k + 1).map_or(String::from("-"), |n| sig12(n - ev[k]));
            let mark = if k < highlight { '*' } else { ' ' };
            text.push_str(&format!("{mark} {k:>5}  {:>20}  {gap:>20}  {g:>5}\n", sig12(ev[k])));
        }
    }
    for (g, range) in groups.iter().enumerate().filter(|(_, r)| r.len() > 1) {
        text.push_str(&format!(
            "group {g}: levels {}..={} degenerate at {}\n",
            range.start,
            range.end - 1,
            sig12(ev[range.start])
        ));
    }
    write_out(out, &text)
}

/// Replays a circuit file on each initial state and prints the final energy
/// and fidelities to the lowest `levels` eigenlevels.
pub fn cmd_replay(circuit_path: &Path, initials: &[String], levels: usize, out: &mut dyn Write) -> CliResult<()> {
    let text = std::fs::read_to_string(circuit_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", circuit_path.display())))?;
    let circuit: CircuitDescription = text
        .parse()
        .map_err(|e| CliError::input(format!("{}: {e}", circuit_path.display())))?;
    if initials.is_empty() {
        return Err(CliError::input("at least one --initial state is required"));
    }
    let n = circuit.n_qubits();
    let spectrum = spectrum_of(&circuit.drift).map_err(CliError::invariant)?;
    let mut report = format!(
        "circuit {}: {} qubits, {} controls, {} layers\n",
        circuit_path.display(),
        n,
        circuit.controls.len(),
        circuit.depth()
    );
    for label in initials {
        let initial = resolve_state(label, n, || Ok(spectrum.clone()))
            .map_err(|e| CliError::input(format!("initial state {label:?}: {e}")))?;
        let state = replay(&circuit, &initial).map_err(CliError::from_runtime)?;
        let energy = expectation(&state, &circuit.drift).map_err(CliError::from_runtime)?;
        report.push_str(&format!("\ninitial {label}\nenergy {}\n", sig12(energy)));
        report.push_str(&format!("  {:>5}  {:>20}  {:>16}\n", "level", "eigenvalue", "fidelity"));
        for k in 0..levels.min(spectrum.len()) {
            let f = fidelity(&state, &spectrum, k).map_err(CliError::from_runtime)?;
            report.push_str(&format!(
                "  {k:>5}  {:>20}  {:>16}\n",
                sig12(spectrum.eigenvalues()[k]),
                sig12(f)
            ));
        }
    }
    write_out(out, &report)
}
