//! Feedback laws: maps from measured commutator expectations to the next
//! layer's control parameters.
//!
//! For a register `q` and control `j`, `B^(q)_j = <φ^(q)| i[H_{c,j}, H_d] |φ^(q)>`.
//! The weighted law sets `α_j = -K_j · h(Σ_q w_q B^(q)_j)`; the single-register
//! law is the special case `w = [1]`, `K = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::pauli::{commutator_i, PauliString, PauliSum};
use crate::state::{pauli_expectation, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// One register, ground state only.
    Falqon,
    /// `p+1` registers with strictly decreasing weights; targets the lowest `p+1` levels.
    WeightedFull,
    /// Weights `[1, …, 1, w]` with `w ∈ (0, 1)`; targets level `p` only.
    WeightedPthOnly,
}

impl FeedbackMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackMode::Falqon => "falqon",
            FeedbackMode::WeightedFull => "weighted_full",
            FeedbackMode::WeightedPthOnly => "weighted_pth_only",
        }
    }
}

/// The response function `h` in `α = -K h(x)`. Must satisfy `h(0) = 0` and `x h(x) > 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    #[default]
    Identity,
}

impl Response {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Response::Identity => x,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    pub dt: f64,
    pub gains: Vec<f64>,
    #[serde(default)]
    pub response: Response,
    pub weights: Vec<f64>,
    pub mode: FeedbackMode,
    pub alpha_init: Vec<f64>,
}

impl FeedbackConfig {
    /// Single-register configuration with unit gains and zero initial controls.
    pub fn falqon(dt: f64, n_controls: usize) -> Self {
        FeedbackConfig {
            dt,
            gains: vec![1.0; n_controls],
            response: Response::Identity,
            weights: vec![1.0],
            mode: FeedbackMode::Falqon,
            alpha_init: vec![0.0; n_controls],
        }
    }

    /// Multi-register configuration with unit gains and zero initial controls.
    pub fn weighted(mode: FeedbackMode, dt: f64, weights: Vec<f64>, n_controls: usize) -> Self {
        FeedbackConfig {
            dt,
            gains: vec![1.0; n_controls],
            response: Response::Identity,
            weights,
            mode,
            alpha_init: vec![0.0; n_controls],
        }
    }

    pub fn n_controls(&self) -> usize {
        self.gains.len()
    }

    pub fn n_registers(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.gains.is_empty() {
            return Err(Error::Config("at least one gain is required".into()));
        }
        if let Some(g) = self.gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::Config(format!("gains must be positive, got {g}")));
        }
        if self.alpha_init.len() != self.gains.len() {
            return Err(Error::Config(format!(
                "alpha_init has {} entries but there are {} gains",
                self.alpha_init.len(),
                self.gains.len()
            )));
        }
        if self.alpha_init.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("alpha_init must be finite".into()));
        }
        if self.weights.is_empty() {
            return Err(Error::Config("at least one weight is required".into()));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("weights must be finite".into()));
        }
        match self.mode {
            FeedbackMode::Falqon => {
                if self.weights != [1.0] {
                    return Err(Error::Config(format!(
                        "falqon mode uses a single register with weights [1], got {:?}",
                        self.weights
                    )));
                }
            }
            FeedbackMode::WeightedFull => {
                if let Some(w) = self.weights.iter().find(|w| **w <= 0.0) {
                    return Err(Error::Config(format!("weights must be positive, got {w}")));
                }
                for (q, pair) in self.weights.windows(2).enumerate() {
                    if pair[0] <= pair[1] {
                        return Err(Error::Config(format!(
                            "weights must satisfy w_q > w_j for q < j, but w_{} = {} and w_{} = {}",
                            q,
                            pair[0],
                            q + 1,
                            pair[1]
                        )));
                    }
                }
            }
            FeedbackMode::WeightedPthOnly => {
                let (last, rest) = self.weights.split_last().expect("non-empty");
                if rest.iter().any(|&w| w != 1.0) || !(*last > 0.0 && *last < 1.0) {
                    return Err(Error::Config(format!(
                        "weighted_pth_only expects weights [1, ..., 1, w] with 0 < w < 1, got {:?}",
                        self.weights
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `α_{k+1} = -B_k`.
#[inline]
pub fn falqon_controller(b: f64) -> f64 {
    -b
}

/// Weighted feedback law for control `control_index`, given `B^(q)` for every register.
pub fn weighted_controller(bs: &[f64], cfg: &FeedbackConfig, control_index: usize) -> Result<f64> {
    ensure_dim(cfg.weights.len(), bs.len())?;
    cfg.validate()?;
    let gain = *cfg.gains.get(control_index).ok_or(Error::OutOfRange {
        index: control_index,
        limit: cfg.gains.len(),
    })?;
    let drive = match cfg.mode {
        FeedbackMode::Falqon | FeedbackMode::WeightedFull => weighted_sum(bs, &cfg.weights),
        FeedbackMode::WeightedPthOnly => {
            let (b_last, lower) = bs.split_last().expect("non-empty");
            let w = *cfg.weights.last().expect("non-empty");
            w * b_last + lower.iter().sum::<f64>()
        }
    };
    Ok(-gain * cfg.response.eval(drive))
}

/// All controls at once; `bs[j][q]` is `B^(q)` for control `j`.
pub fn weighted_controllers(bs: &[Vec<f64>], cfg: &FeedbackConfig) -> Result<Vec<f64>> {
    ensure_dim(cfg.n_controls(), bs.len())?;
    bs.iter()
        .enumerate()
        .map(|(j, col)| weighted_controller(col, cfg, j))
        .collect()
}

/// `V = Σ_q w_q E_q`.
pub fn lyapunov_value(energies: &[f64], weights: &[f64]) -> Result<f64> {
    ensure_dim(weights.len(), energies.len())?;
    Ok(weighted_sum(energies, weights))
}

// Seeded with the first product, so a single unit weight returns its input bit for bit.
fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
    let mut pairs = values.iter().zip(weights);
    let Some((v0, w0)) = pairs.next() else {
        return 0.0;
    };
    pairs.fold(w0 * v0, |acc, (v, w)| acc + w * v)
}

/// Expectation estimations needed per layer: every register measures every string.
pub fn predict_layer_cost(p: usize, n_pauli_terms: usize) -> usize {
    (p + 1) * n_pauli_terms
}

/// Precomputed `i[H_{c,j}, H_d]` for every control, sharing one list of
/// distinct Pauli strings so each string is estimated once per register.
#[derive(Clone, Debug)]
pub struct CommutatorObservables {
    per_control: Vec<PauliSum>,
    strings: Vec<PauliString>,
    // per control: (index into `strings`, coefficient)
    loadings: Vec<Vec<(usize, f64)>>,
}

impl CommutatorObservables {
    pub fn new(drift: &PauliSum, controls: &[PauliSum]) -> Result<Self> {
        let per_control = controls
            .iter()
            .map(|c| commutator_i(c, drift))
            .collect::<Result<Vec<_>>>()?;
        let mut strings: Vec<PauliString> = per_control
            .iter()
            .flat_map(|o| o.terms().iter().map(|(_, s)| *s))
            .collect();
        strings.sort();
        strings.dedup();
        let loadings = per_control
            .iter()
            .map(|o| {
                o.terms()
                    .iter()
                    .map(|(c, s)| {
                        let idx = strings.binary_search(s).expect("string collected above");
                        (idx, *c)
                    })
                    .collect()
            })
            .collect();
        Ok(CommutatorObservables {
            per_control,
            strings,
            loadings,
        })
    }

    /// The operators `i[H_{c,j}, H_d]`.
    pub fn observables(&self) -> &[PauliSum] {
        &self.per_control
    }

    /// Distinct Pauli strings across all controls.
    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn n_strings(&self) -> usize {
        self.strings.len()
    }

    /// `B_j` for every control, assembled from term-wise string expectations.
    pub fn measure(&self, state: &StateVector) -> Result<Vec<f64>> {
        let values = self
            .strings
            .iter()
            .map(|s| pauli_expectation(state, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .loadings
            .iter()
            .map(|l| l.iter().fold(0.0, |acc, &(i, c)| acc + c * values[i]))
            .collect())
    }
}
