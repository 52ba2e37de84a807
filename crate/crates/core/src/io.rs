//! Text formats: the per-layer trace CSV and the replayable circuit file.
//!
//! # Trace CSV
//!
//! One header row, then one row per layer starting with `layer = 0` for the
//! initial ensemble. Columns, for `d` controls and `p + 1` registers:
//!
//! | column | meaning |
//! |---|---|
//! | `layer` | layer index `k` |
//! | `alpha_1` … `alpha_d` | parameters applied in layer `k` (blank at `k = 0`) |
//! | `lyapunov` | `V_k` |
//! | `energy_0` … `energy_p` | `<φ_k^(q)|H_d|φ_k^(q)>` |
//! | `fidelity_0` … `fidelity_p` | squared overlap of register `q` with eigenlevel `q` |
//! | `b_<q>_<j>` | commutator expectation for register `q`, control `j` (blank at `k = 0`) |
//! | `estimations` | expectation estimations spent on layer `k` |
//! | `cumulative_estimations` | running total |
//!
//! Numbers use 12 significant digits.
//!
//! # Circuit file
//!
//! ```text
//! qubits 3
//! dt 0.05
//! drift
//! -7.0582 III
//! ...
//! end
//! control
//! 1 ZII
//! 1 XII
//! end
//! layers 2
//! 0 0 0
//! -0.0021 -0.055 -0.47
//! ```
//!
//! `control` blocks repeat once per control Hamiltonian. Each layer line holds
//! one parameter per control. Floats are written in shortest round-trip form
//! so a parsed circuit replays bit for bit.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use crate::algorithms::{CircuitDescription, RunTrace, Snapshot};
use crate::error::{Error, Result};
use crate::numfmt::sig12;
use crate::pauli::PauliSum;

pub fn trace_csv_header(n_controls: usize, n_registers: usize) -> Vec<String> {
    let mut h = vec!["layer".to_string()];
    h.extend((1..=n_controls).map(|j| format!("alpha_{j}")));
    h.push("lyapunov".into());
    h.extend((0..n_registers).map(|q| format!("energy_{q}")));
    h.extend((0..n_registers).map(|q| format!("fidelity_{q}")));
    for q in 0..n_registers {
        h.extend((1..=n_controls).map(|j| format!("b_{q}_{j}")));
    }
    h.push("estimations".into());
    h.push("cumulative_estimations".into());
    h
}

fn snapshot_fields(row: &mut Vec<String>, s: &Snapshot) {
    row.push(sig12(s.lyapunov));
    row.extend(s.energies.iter().map(|&e| sig12(e)));
    row.extend(s.fidelities.iter().map(|&f| sig12(f)));
}

pub fn write_trace_csv<W: Write>(trace: &RunTrace, out: W) -> Result<()> {
    let d = trace.n_controls;
    let r = trace.n_registers();
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(trace_csv_header(d, r)).map_err(csv_err)?;

    let mut row = vec!["0".to_string()];
    row.extend(std::iter::repeat_n(String::new(), d));
    snapshot_fields(&mut row, &trace.initial);
    row.extend(std::iter::repeat_n(String::new(), d * r));
    row.extend(["0".to_string(), "0".to_string()]);
    w.write_record(&row).map_err(csv_err)?;

    for layer in &trace.layers {
        let mut row = vec![layer.layer.to_string()];
        row.extend(layer.alphas.iter().map(|&a| sig12(a)));
        snapshot_fields(&mut row, &layer.state);
        for bq in &layer.b_values {
            row.extend(bq.iter().map(|&b| sig12(b)));
        }
        row.push(layer.estimations.to_string());
        row.push(layer.cumulative_estimations.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

impl fmt::Display for CircuitDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# feedback circuit: drift then control per layer")?;
        writeln!(f, "qubits {}", self.n_qubits())?;
        writeln!(f, "dt {:?}", self.dt)?;
        writeln!(f, "drift")?;
        write!(f, "{}", self.drift)?;
        writeln!(f, "end")?;
        for c in &self.controls {
            writeln!(f, "control")?;
            write!(f, "{c}")?;
            writeln!(f, "end")?;
        }
        writeln!(f, "layers {}", self.layers.len())?;
        for layer in &self.layers {
            let mut line = String::new();
            for (i, a) in layer.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                write!(line, "{a:?}")?;
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitDescription {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, msg: String| Error::Parse(format!("circuit line {line}: {msg}"));

        let mut qubits = None;
        let mut dt = None;
        let mut drift = None;
        let mut controls = Vec::new();
        let mut layers = None;

        while let Some((no, line)) = lines.next() {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "qubits" => {
                    qubits = Some(
                        rest.parse::<usize>()
                            .map_err(|_| err(no, format!("invalid qubit count {rest:?}")))?,
                    )
                }
                "dt" => {
                    dt = Some(
                        rest.parse::<f64>()
                            .map_err(|_| err(no, format!("invalid dt {rest:?}")))?,
                    )
                }
                "drift" | "control" => {
                    let mut body = String::new();
                    let mut closed = false;
                    for (_, l) in lines.by_ref() {
                        if l == "end" {
                            closed = true;
                            break;
                        }
                        body.push_str(l);
                        body.push('\n');
                    }
                    if !closed {
                        return Err(err(no, format!("unterminated {key} block")));
                    }
                    let sum: PauliSum = body
                        .parse()
                        .map_err(|e: Error| err(no, format!("{key} block: {e}")))?;
                    if key == "drift" {
                        drift = Some(sum);
                    } else {
                        controls.push(sum);
                    }
                }
                "layers" => {
                    let count: usize = rest
                        .parse()
                        .map_err(|_| err(no, format!("invalid layer count {rest:?}")))?;
                    let mut parsed = Vec::with_capacity(count);
                    for _ in 0..count {
                        let (lno, l) = lines
                            .next()
                            .ok_or_else(|| err(no, format!("expected {count} layer lines")))?;
                        let values = l
                            .split_whitespace()
                            .map(|v| {
                                v.parse::<f64>()
                                    .map_err(|_| err(lno, format!("invalid parameter {v:?}")))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        parsed.push(values);
                    }
                    layers = Some(parsed);
                }
                other => return Err(err(no, format!("unknown directive {other:?}"))),
            }
        }

        let drift = drift.ok_or_else(|| Error::Parse("circuit has no drift block".into()))?;
        if let Some(n) = qubits {
            if n != drift.n_qubits() {
                return Err(Error::Parse(format!(
                    "circuit declares {n} qubits but the drift acts on {}",
                    drift.n_qubits()
                )));
            }
        }
        let circuit = CircuitDescription {
            dt: dt.ok_or_else(|| Error::Parse("circuit has no dt".into()))?,
            drift,
            controls,
            layers: layers.ok_or_else(|| Error::Parse("circuit has no layers section".into()))?,
        };
        circuit.validate()?;
        Ok(circuit)
    }
}
