//! Exact per-layer propagators `exp(-i θ G)` for Pauli-sum generators.
//!
//! Each layer factor is applied as an exact exponential; there is no Trotter
//! splitting inside a layer. Generators whose terms each touch at most one
//! qubit factor into 2x2 blocks applied in place. Anything else goes through a
//! Hermitian eigendecomposition computed once per generator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{hermitian_eigen, spectral_apply, HermitianEigen};
use crate::pauli::{check_dense_cap, Pauli, PauliSum};
use crate::state::StateVector;

/// Which factor of a circuit layer a unitary realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Drift,
    Control,
}

/// A one-local generator `c0·I + Σ_q n_q·σ_q`.
#[derive(Clone, Debug)]
struct LocalGenerator {
    n_qubits: usize,
    identity: f64,
    // (qubit, [nx, ny, nz])
    blocks: Vec<(usize, [f64; 3])>,
}

impl LocalGenerator {
    fn from_sum(g: &PauliSum) -> Option<Self> {
        if !g.is_one_local() {
            return None;
        }
        let mut identity = 0.0;
        let mut per_qubit = vec![[0.0; 3]; g.n_qubits()];
        let mut touched = vec![false; g.n_qubits()];
        for (c, s) in g.terms() {
            match s.support().as_slice() {
                [] => identity += c,
                &[q] => {
                    let slot = match s.factor(q) {
                        Pauli::X => 0,
                        Pauli::Y => 1,
                        Pauli::Z => 2,
                        Pauli::I => unreachable!("support excludes identity factors"),
                    };
                    per_qubit[q][slot] += c;
                    touched[q] = true;
                }
                _ => return None,
            }
        }
        let blocks = per_qubit
            .into_iter()
            .enumerate()
            .filter(|(q, _)| touched[*q])
            .collect();
        Some(LocalGenerator {
            n_qubits: g.n_qubits(),
            identity,
            blocks,
        })
    }

    fn apply(&self, state: &mut StateVector, angle: f64) {
        let n = self.n_qubits;
        let amps = state.amplitudes_mut();
        for &(q, [nx, ny, nz]) in &self.blocks {
            let r = (nx * nx + ny * ny + nz * nz).sqrt();
            let (cos, sinc) = if r > 0.0 {
                ((angle * r).cos(), (angle * r).sin() / r)
            } else {
                (1.0, angle)
            };
            // cos(θr) I - i sin(θr)/r (nx X + ny Y + nz Z)
            let m00 = Complex64::new(cos, -sinc * nz);
            let m11 = Complex64::new(cos, sinc * nz);
            let m01 = Complex64::new(-sinc * ny, -sinc * nx);
            let m10 = Complex64::new(sinc * ny, -sinc * nx);
            let bit = 1usize << (n - 1 - q);
            for i in 0..amps.len() {
                if i & bit != 0 {
                    continue;
                }
                let a0 = amps[i];
                let a1 = amps[i | bit];
                amps[i] = m00 * a0 + m01 * a1;
                amps[i | bit] = m10 * a0 + m11 * a1;
            }
        }
        if self.identity != 0.0 {
            let phase = Complex64::from_polar(1.0, -angle * self.identity);
            for a in amps.iter_mut() {
                *a *= phase;
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Realization {
    Local(LocalGenerator),
    Spectral(HermitianEigen),
    /// Pre-multiplied `exp(-i duration G)` for a fixed-angle layer.
    Fixed(DMatrix<Complex64>),
}

/// One factor of a circuit layer: `exp(-i · duration · scale · generator)`.
///
/// Drift unitaries have a fixed scale of 1. Control unitaries receive the
/// layer's controller value as `scale` at application time.
#[derive(Clone, Debug)]
pub struct LayerUnitary {
    kind: LayerKind,
    generator: PauliSum,
    duration: f64,
    realization: Realization,
}

impl LayerUnitary {
    /// `U_d = exp(-i H_d dt)`, realized once.
    pub fn drift(generator: PauliSum, dt: f64) -> Result<Self> {
        check_dense_cap(generator.n_qubits())?;
        let realization = match LocalGenerator::from_sum(&generator) {
            Some(local) => Realization::Local(local),
            None => {
                let eig = hermitian_eigen(&generator.to_dense()?)?;
                let phases: Vec<Complex64> = eig
                    .values
                    .iter()
                    .map(|&l| Complex64::from_polar(1.0, -dt * l))
                    .collect();
                let scaled = DMatrix::from_fn(eig.vectors.nrows(), eig.vectors.ncols(), |r, c| {
                    eig.vectors[(r, c)] * phases[c]
                });
                Realization::Fixed(scaled * eig.vectors.adjoint())
            }
        };
        Ok(LayerUnitary {
            kind: LayerKind::Drift,
            generator,
            duration: dt,
            realization,
        })
    }

    /// `U_c(α) = exp(-i α H_c dt)`; the eigendecomposition is reused for every α.
    pub fn control(generator: PauliSum, dt: f64) -> Result<Self> {
        let realization = Self::scalable(&generator)?;
        Ok(LayerUnitary {
            kind: LayerKind::Control,
            generator,
            duration: dt,
            realization,
        })
    }

    fn scalable(generator: &PauliSum) -> Result<Realization> {
        check_dense_cap(generator.n_qubits())?;
        Ok(match LocalGenerator::from_sum(generator) {
            Some(local) => Realization::Local(local),
            None => Realization::Spectral(hermitian_eigen(&generator.to_dense()?)?),
        })
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn generator(&self) -> &PauliSum {
        &self.generator
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Dense matrix of `exp(-i · duration · scale · generator)`.
    pub fn to_dense(&self, scale: f64) -> Result<DMatrix<Complex64>> {
        let n = self.generator.n_qubits();
        let dim = 1usize << n;
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[col] = Complex64::new(1.0, 0.0);
            let mut basis = StateVector::from_amplitudes(n, amps)?;
            self.apply(&mut basis, scale)?;
            for (row, a) in basis.amplitudes().iter().enumerate() {
                out[(row, col)] = *a;
            }
        }
        Ok(out)
    }

    /// Applies the unitary in place with the given control scale.
    pub fn apply(&self, state: &mut StateVector, scale: f64) -> Result<()> {
        ensure_dim(self.generator.n_qubits(), state.n_qubits())?;
        match &self.realization {
            Realization::Fixed(u) => {
                if scale != 1.0 {
                    return Err(Error::Config(
                        "fixed-angle layer applied with a non-unit scale".into(),
                    ));
                }
                apply_matrix(u, state);
            }
            Realization::Local(local) => {
                if scale != 0.0 {
                    local.apply(state, scale * self.duration);
                }
            }
            Realization::Spectral(eig) => {
                if scale != 0.0 {
                    apply_spectral(eig, state, scale * self.duration);
                }
            }
        }
        Ok(())
    }
}

fn apply_matrix(u: &DMatrix<Complex64>, state: &mut StateVector) {
    let v = DVector::from_column_slice(state.amplitudes());
    let out = u * v;
    state.amplitudes_mut().copy_from_slice(out.as_slice());
}

fn apply_spectral(eig: &HermitianEigen, state: &mut StateVector, angle: f64) {
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -angle * l))
        .collect();
    let v = DVector::from_column_slice(state.amplitudes());
    let out = spectral_apply(eig, &phases, &v);
    state.amplitudes_mut().copy_from_slice(out.as_slice());
}

/// The control factor of a layer with `d` control Hamiltonians:
/// `exp(-i dt Σ_j α_j H_{c,j})`.
///
/// With one control the eigendecomposition of `H_c` is rescaled per layer. With
/// several one-local controls the combined generator is still one-local and is
/// built per layer. Otherwise the combined generator is diagonalized per layer.
#[derive(Clone, Debug)]
pub struct ControlStage {
    controls: Vec<PauliSum>,
    dt: f64,
    single: Option<LayerUnitary>,
    all_local: bool,
}

impl ControlStage {
    pub fn new(controls: Vec<PauliSum>, dt: f64) -> Result<Self> {
        let Some(first) = controls.first() else {
            return Err(Error::Config("at least one control Hamiltonian is required".into()));
        };
        let n = first.n_qubits();
        for c in &controls {
            ensure_dim(n, c.n_qubits())?;
        }
        let single = if controls.len() == 1 {
            Some(LayerUnitary::control(controls[0].clone(), dt)?)
        } else {
            check_dense_cap(n)?;
            None
        };
        let all_local = controls.iter().all(PauliSum::is_one_local);
        Ok(ControlStage {
            controls,
            dt,
            single,
            all_local,
        })
    }

    pub fn controls(&self) -> &[PauliSum] {
        &self.controls
    }

    pub fn apply(&self, state: &mut StateVector, alphas: &[f64]) -> Result<()> {
        ensure_dim(self.controls.len(), alphas.len())?;
        if let Some(single) = &self.single {
            return single.apply(state, alphas[0]);
        }
        if alphas.iter().all(|&a| a == 0.0) {
            return Ok(());
        }
        let terms: Vec<(f64, &PauliSum)> = alphas.iter().copied().zip(&self.controls).collect();
        let combined = crate::pauli::scale_and_add(&terms)?;
        ensure_dim(combined.n_qubits(), state.n_qubits())?;
        if self.all_local {
            let local = LocalGenerator::from_sum(&combined)
                .expect("sum of one-local generators is one-local");
            local.apply(state, self.dt);
        } else {
            let eig = hermitian_eigen(&combined.to_dense()?)?;
            apply_spectral(&eig, state, self.dt);
        }
        Ok(())
    }
}

/// `exp(-i · angle · generator) |state>`, computed exactly.
pub fn apply_generator(state: &StateVector, generator: &PauliSum, angle: f64) -> Result<StateVector> {
    ensure_dim(state.n_qubits(), generator.n_qubits())?;
    let unitary = LayerUnitary::control(generator.clone(), 1.0)?;
    let mut out = state.clone();
    unitary.apply(&mut out, angle)?;
    out.check_normalized()?;
    Ok(out)
}
