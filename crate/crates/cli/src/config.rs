//! Experiment configuration files.
//!
//! Configs are TOML. Every key is listed below; unknown keys are rejected.
//!
//! | key | type | default |
//! |---|---|---|
//! | `model` | preset name, `random:<qubits>:<terms>`, Pauli-sum file or inline sum | required |
//! | `controls` | `"local-zx"`, `"local-zx-sum"`, `"random"`, or a list of sums/files | required |
//! | `mode` | `"falqon"`, `"weighted_full"`, `"weighted_pth_only"` | required |
//! | `depth` | number of layers, at least 1 | required |
//! | `dt` | layer time step | required |
//! | `gains` | one positive gain per control | all 1 |
//! | `weights` | one weight per register | `[1]` in falqon mode |
//! | `alpha_init` | parameters of layer 1, one per control | all 0 |
//! | `initial_states` | labels over `0 1 + -`, or `eig:<level>` | required |
//! | `seed` | seed for `random:` models | none |
//! | `output` | output directory, relative to the working directory | none |
//!
//! Relative file paths inside `model` and `controls` resolve against the
//! config file's directory.

use std::ops::Range;
use std::path::Path;

use qfeedback_core::{Ensemble, FeedbackConfig, FeedbackMode, PauliSum, Response, StateVector};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, CliResult};
use crate::resolve::{resolve_controls, resolve_model, resolve_state, spectrum_of};

/// Configs shipped inside the binary, addressable by name.
pub const BUNDLED_CONFIGS: &[(&str, &str)] =
    &[("lih-wfqae", include_str!("../configs/lih-wfqae.cfg"))];

pub fn bundled_config(name: &str) -> Option<&'static str> {
    BUNDLED_CONFIGS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ControlSpec {
    Named(String),
    List(Vec<String>),
}

/// A config with every default filled in; echoing it reproduces the same run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: String,
    pub controls: ControlSpec,
    pub mode: FeedbackMode,
    pub depth: usize,
    pub dt: f64,
    pub gains: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha_init: Vec<f64>,
    pub initial_states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Spanned<String>,
    controls: Spanned<ControlSpec>,
    mode: Spanned<FeedbackMode>,
    depth: Spanned<i64>,
    dt: Spanned<f64>,
    gains: Option<Spanned<Vec<f64>>>,
    weights: Option<Spanned<Vec<f64>>>,
    alpha_init: Option<Spanned<Vec<f64>>>,
    initial_states: Spanned<Vec<String>>,
    seed: Option<Spanned<u64>>,
    output: Option<Spanned<String>>,
}

/// Everything a run needs, resolved and validated.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub drift: PauliSum,
    pub controls: Vec<PauliSum>,
    pub feedback: FeedbackConfig,
    pub registers: Vec<StateVector>,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub experiment: Experiment,
}

struct Located<'a> {
    text: &'a str,
    source: &'a str,
}

impl Located<'_> {
    fn line(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn error(&self, span: Range<usize>, field: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::input(format!("{}:{}: {field}: {msg}", self.source, self.line(span.start)))
    }
}

/// Parses, resolves and validates a config. `source` names the config in
/// error messages.
pub fn load_config(text: &str, source: &str, base_dir: &Path) -> CliResult<LoadedConfig> {
    let at = Located { text, source };
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| at.line(s.start));
        CliError::input(format!("{source}:{line}: {}", e.message()))
    })?;

    let depth = *raw.depth.get_ref();
    if depth < 1 {
        return Err(at.error(raw.depth.span(), "depth", format!("depth must be at least 1, got {depth}")));
    }
    let dt = *raw.dt.get_ref();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(at.error(raw.dt.span(), "dt", format!("dt must be positive, got {dt}")));
    }
    let seed = raw.seed.as_ref().map(|s| *s.get_ref());

    let model = resolve_model(raw.model.get_ref(), seed, base_dir)
        .map_err(|e| at.error(raw.model.span(), "model", e))?;
    let n_qubits = model.drift.n_qubits();
    let (named, listed) = match raw.controls.get_ref() {
        ControlSpec::Named(n) => (Some(n.as_str()), &[][..]),
        ControlSpec::List(l) => (None, l.as_slice()),
    };
    let controls = resolve_controls(named, listed, &model, base_dir)
        .map_err(|e| at.error(raw.controls.span(), "controls", e))?;
    let d = controls.len();

    let mode = *raw.mode.get_ref();
    let weights = match (&raw.weights, mode) {
        (Some(w), _) => w.get_ref().clone(),
        (None, FeedbackMode::Falqon) => vec![1.0],
        (None, _) => {
            return Err(at.error(
                raw.mode.span(),
                "weights",
                format!("weights are required in {} mode", mode.as_str()),
            ))
        }
    };
    let mut feedback = FeedbackConfig {
        dt,
        gains: vec![1.0; d],
        response: Response::Identity,
        weights,
        mode,
        alpha_init: vec![0.0; d],
    };
    feedback.validate().map_err(|e| {
        let span = raw.weights.as_ref().map_or(raw.mode.span(), |w| w.span());
        at.error(span, "weights", e)
    })?;
    if let Some(g) = &raw.gains {
        if g.get_ref().len() != d {
            return Err(at.error(
                g.span(),
                "gains",
                format!("{} gains given for {d} controls", g.get_ref().len()),
            ));
        }
        feedback.gains = g.get_ref().clone();
        feedback.validate().map_err(|e| at.error(g.span(), "gains", e))?;
    }
    if let Some(a) = &raw.alpha_init {
        if a.get_ref().len() != d {
            return Err(at.error(
                a.span(),
                "alpha_init",
                format!("{} initial parameters given for {d} controls", a.get_ref().len()),
            ));
        }
        feedback.alpha_init = a.get_ref().clone();
        feedback.validate().map_err(|e| at.error(a.span(), "alpha_init", e))?;
    }

    let states = &raw.initial_states;
    let labels = states.get_ref();
    if labels.len() != feedback.n_registers() {
        return Err(at.error(
            states.span(),
            "initial_states",
            format!(
                "{} initial states given but {} mode with {} weights needs {}",
                labels.len(),
                mode.as_str(),
                feedback.n_registers(),
                feedback.n_registers()
            ),
        ));
    }
    let mut spectrum = None;
    let mut registers = Vec::with_capacity(labels.len());
    for label in labels {
        let state = resolve_state(label, n_qubits, || match &spectrum {
            Some(s) => Ok(Clone::clone(s)),
            None => {
                let s = spectrum_of(&model.drift)?;
                spectrum = Some(s.clone());
                Ok(s)
            }
        })
        .map_err(|e| at.error(states.span(), "initial_states", e))?;
        registers.push(state);
    }
    let registers = Ensemble::new(registers)
        .map_err(|e| at.error(states.span(), "initial_states", e))?
        .into_registers();

    let config = ExperimentConfig {
        model: raw.model.get_ref().clone(),
        controls: raw.controls.get_ref().clone(),
        mode,
        depth: depth as usize,
        dt,
        gains: feedback.gains.clone(),
        weights: feedback.weights.clone(),
        alpha_init: feedback.alpha_init.clone(),
        initial_states: labels.clone(),
        seed,
        output: raw.output.map(|o| o.into_inner()),
    };
    Ok(LoadedConfig {
        config,
        experiment: Experiment {
            drift: model.drift,
            controls,
            feedback,
            registers,
            depth: depth as usize,
        },
    })
}
