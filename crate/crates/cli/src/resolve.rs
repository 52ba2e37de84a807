//! Turns the textual model, control and state specs into library objects.
//!
//! A model spec is tried as, in order: a preset name, `random:<qubits>:<terms>`,
//! a readable Pauli-sum file, an inline Pauli sum such as `"1 Z; 0.5 X"`.

use std::path::Path;

use qfeedback_core::{
    diagonalize, local_zx_controls, preset_model, preset_names, prepare_product_state,
    random_problem, scale_and_add, PauliSum, Spectrum, StateVector,
};

/// A drift Hamiltonian plus, for random problems, the control drawn with it.
pub struct Model {
    pub drift: PauliSum,
    pub generated_controls: Option<Vec<PauliSum>>,
}

pub fn resolve_model(spec: &str, seed: Option<u64>, base_dir: &Path) -> Result<Model, String> {
    let spec = spec.trim();
    if let Some(drift) = preset_model(spec) {
        return Ok(Model { drift, generated_controls: None });
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let (n, t) = rest
            .split_once(':')
            .ok_or_else(|| format!("random model must look like random:<qubits>:<terms>, got {spec:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("invalid qubit count {n:?}"))?;
        let t: usize = t.parse().map_err(|_| format!("invalid term count {t:?}"))?;
        let seed = seed.ok_or("random models need a seed")?;
        let (drift, controls) = random_problem(n, t, seed).map_err(|e| e.to_string())?;
        return Ok(Model { drift, generated_controls: Some(controls) });
    }
    let drift = read_sum(spec, base_dir).map_err(|e| {
        format!(
            "{e} (expected a preset name [{}], random:<qubits>:<terms>, a Pauli-sum file or an inline sum)",
            preset_names().join(", ")
        )
    })?;
    Ok(Model { drift, generated_controls: None })
}

/// Reads a Pauli sum from a file when `spec` names one, otherwise parses it inline.
pub fn read_sum(spec: &str, base_dir: &Path) -> Result<PauliSum, String> {
    let path = base_dir.join(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        return text
            .parse()
            .map_err(|e| format!("{}: {e}", path.display()));
    }
    spec.parse().map_err(|e| format!("{spec:?} is not a readable file or Pauli sum: {e}"))
}

/// Controls named `local-zx` (one `Z_j + X_j` per qubit), `local-zx-sum`
/// (their sum as a single control), `random` (drawn with a random model), or
/// a list of sums and files.
pub fn resolve_controls(
    named: Option<&str>,
    listed: &[String],
    model: &Model,
    base_dir: &Path,
) -> Result<Vec<PauliSum>, String> {
    let n = model.drift.n_qubits();
    let controls = match named {
        Some("local-zx") => local_zx_controls(n).map_err(|e| e.to_string())?,
        Some("local-zx-sum") => {
            let each = local_zx_controls(n).map_err(|e| e.to_string())?;
            let refs: Vec<(f64, &PauliSum)> = each.iter().map(|c| (1.0, c)).collect();
            vec![scale_and_add(&refs).map_err(|e| e.to_string())?]
        }
        Some("random") => model
            .generated_controls
            .clone()
            .ok_or("controls = \"random\" needs a random:<qubits>:<terms> model")?,
        Some(other) => {
            return Err(format!(
                "unknown control set {other:?} (expected local-zx, local-zx-sum, random or a list of sums)"
            ))
        }
        None => listed
            .iter()
            .map(|s| read_sum(s, base_dir))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if controls.is_empty() {
        return Err("at least one control is required".into());
    }
    for (j, c) in controls.iter().enumerate() {
        if c.n_qubits() != n {
            return Err(format!(
                "control {} acts on {} qubits but the model has {n}",
                j + 1,
                c.n_qubits()
            ));
        }
    }
    Ok(controls)
}

/// A product label over `{0, 1, +, -}` or `eig:<level>` for an exact eigenstate.
pub fn resolve_state(
    spec: &str,
    n_qubits: usize,
    spectrum: impl FnOnce() -> Result<Spectrum, String>,
) -> Result<StateVector, String> {
    let spec = spec.trim();
    if let Some(level) = spec.strip_prefix("eig:") {
        let level: usize = level
            .parse()
            .map_err(|_| format!("invalid eigenlevel {level:?}"))?;
        let spectrum = spectrum()?;
        return spectrum
            .eigenvector(level)
            .cloned()
            .map_err(|e| e.to_string());
    }
    let state = prepare_product_state(spec).map_err(|e| e.to_string())?;
    if state.n_qubits() != n_qubits {
        return Err(format!(
            "state {spec:?} has {} qubits but the model has {n_qubits}",
            state.n_qubits()
        ));
    }
    Ok(state)
}

pub fn spectrum_of(drift: &PauliSum) -> Result<Spectrum, String> {
    diagonalize(drift).map_err(|e| e.to_string())
}
