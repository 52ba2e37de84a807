//! Pauli strings and real-weighted Pauli sums.
//!
//! A [`PauliString`] is stored as a pair of bit masks (X-part, Z-part) so that
//! products and commutation checks cost a handful of word operations. The
//! operator represented is `i^{|x & z|} X^x Z^z`, which makes every string
//! Hermitian: a qubit with both bits set carries a `Y`.
//!
//! Qubit 0 is the leftmost factor of the text form and the most significant bit
//! of a computational-basis index, so `"XZI"` puts `X` on qubit 0 and the basis
//! label `"100"` is index 4.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};

/// Largest qubit count a symbolic string can hold.
pub const MAX_QUBITS: usize = 64;

/// Largest qubit count that may be realized densely (statevectors, matrices).
pub const DENSE_QUBIT_CAP: usize = 12;

/// Terms with a smaller magnitude are dropped during canonicalization.
pub const COEFFICIENT_DUST: f64 = 1e-14;

pub(crate) fn check_dense_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > DENSE_QUBIT_CAP {
        Err(Error::QubitCap {
            n_qubits,
            cap: DENSE_QUBIT_CAP,
        })
    } else {
        Ok(())
    }
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn code(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of the imaginary unit, `i^k` for `k` in `0..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power(k: u32) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> u32 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Multiplies `value` by this phase without rounding.
    #[inline]
    pub fn apply(self, value: Complex64) -> Complex64 {
        match self {
            Phase::PlusOne => value,
            Phase::PlusI => Complex64::new(-value.im, value.re),
            Phase::MinusOne => -value,
            Phase::MinusI => Complex64::new(value.im, -value.re),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    // Phases multiply by adding their powers of i.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

/// Tensor product of single-qubit Pauli factors on a fixed number of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::OutOfRange {
                index: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        Ok(PauliString {
            n_qubits,
            x: 0,
            z: 0,
        })
    }

    pub fn from_factors(factors: &[Pauli]) -> Result<Self> {
        let mut s = Self::identity(factors.len())?;
        for (q, &f) in factors.iter().enumerate() {
            s.set(q, f);
        }
        Ok(s)
    }

    /// A string that is `factor` on `qubit` and identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, factor: Pauli) -> Result<Self> {
        let mut s = Self::identity(n_qubits)?;
        if qubit >= n_qubits {
            return Err(Error::OutOfRange {
                index: qubit,
                limit: n_qubits,
            });
        }
        s.set(qubit, factor);
        Ok(s)
    }

    /// Builds a string from `(qubit, factor)` pairs; later pairs overwrite earlier ones.
    pub fn from_sparse(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits)?;
        for &(q, f) in factors {
            if q >= n_qubits {
                return Err(Error::OutOfRange {
                    index: q,
                    limit: n_qubits,
                });
            }
            s.set(q, f);
        }
        Ok(s)
    }

    #[inline]
    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.n_qubits - 1 - qubit)
    }

    fn set(&mut self, qubit: usize, factor: Pauli) {
        let b = self.bit(qubit);
        let (x, z) = factor.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn factor(&self, qubit: usize) -> Pauli {
        let b = self.bit(qubit);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn factors(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n_qubits).map(move |q| self.factor(q))
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| (self.x | self.z) & self.bit(q) != 0)
            .collect()
    }

    /// Bit-flip mask in basis-index convention.
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Sign mask in basis-index convention.
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Action on a computational basis state: `P|index> = phase |target>`.
    #[inline]
    pub fn act_on_basis(&self, index: usize) -> (usize, Phase) {
        let i = index as u64;
        let sign = 2 * ((i & self.z).count_ones() % 2);
        ((i ^ self.x) as usize, Phase::from_power(self.y_count() + sign))
    }

    /// Operator product `a·b` returned as `(phase, string)` with `phase·string == a·b`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        ensure_dim(self.n_qubits, other.n_qubits)?;
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{y1} X^{x1} Z^{z1} · i^{y2} X^{x2} Z^{z2}
        //   = i^{y1 + y2} (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
        let product = PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
        };
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones();
        let k = (k + 4 * MAX_QUBITS as u32 - product.y_count()) % 4;
        Ok((Phase::from_power(k), product))
    }

    fn sort_key(&self) -> u128 {
        self.factors()
            .fold(0u128, |acc, f| (acc << 2) | f.code() as u128)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits
            .cmp(&other.n_qubits)
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.factors() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::Parse(format!("invalid Pauli factor {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        Self::from_factors(&factors)
    }
}

/// Real-weighted sum of Pauli strings in canonical form: one term per string,
/// sorted, with dust coefficients removed. Always Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        PauliString::identity(n_qubits)?;
        Ok(PauliSum {
            n_qubits,
            terms: Vec::new(),
        })
    }

    /// Canonicalizes `terms`: merges repeated strings and drops near-zero coefficients.
    pub fn new<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (c, s) in terms {
            ensure_dim(n_qubits, s.n_qubits())?;
            if !c.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient {c} on {s}")));
            }
            *merged.entry(s).or_insert(0.0) += c;
        }
        PauliString::identity(n_qubits)?;
        Ok(PauliSum {
            n_qubits,
            terms: merged
                .into_iter()
                .filter(|(_, c)| c.abs() >= COEFFICIENT_DUST)
                .map(|(s, c)| (c, s))
                .collect(),
        })
    }

    pub fn from_term(coefficient: f64, string: PauliString) -> Result<Self> {
        Self::new(string.n_qubits(), [(coefficient, string)])
    }

    /// Parses the one-term shorthand used in tests and inline specs, e.g. `"X"` or `"ZIZ"`.
    pub fn from_label(label: &str) -> Result<Self> {
        Self::from_term(1.0, label.parse()?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms
            .binary_search_by(|(_, s)| s.cmp(string))
            .map(|i| self.terms[i].0)
            .unwrap_or(0.0)
    }

    /// Coefficient of the identity string; `trace / 2^n`.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, s)| s.is_identity())
            .map_or(0.0, |(c, _)| *c)
    }

    pub fn scaled(&self, weight: f64) -> PauliSum {
        PauliSum::new(
            self.n_qubits,
            self.terms.iter().map(|&(c, s)| (weight * c, s)),
        )
        .expect("scaling preserves qubit count")
    }

    /// Largest `|coefficient|` sum; an upper bound on the spectral radius.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// True when every term acts on at most one qubit, so the exponential
    /// factorizes into independent 2x2 blocks.
    pub fn is_one_local(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.weight() <= 1)
    }

    pub fn commutes_with(&self, other: &PauliSum) -> Result<bool> {
        Ok(commutator_i(self, other)?.is_empty())
    }

    /// Dense `2^n x 2^n` realization.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        check_dense_cap(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for &(c, s) in &self.terms {
            for col in 0..dim {
                let (row, phase) = s.act_on_basis(col);
                m[(row, col)] += phase.apply(Complex64::new(c, 0.0));
            }
        }
        Ok(m)
    }
}

/// `i[a, b] = i(ab - ba)` as a canonical Pauli sum.
///
/// Only anticommuting pairs contribute. For those `st = ±i u`, so each pair adds
/// the exactly representable `∓2 c_s c_t` to the coefficient of `u`.
pub fn commutator_i(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    ensure_dim(a.n_qubits, b.n_qubits)?;
    let mut terms = Vec::new();
    for &(ca, sa) in &a.terms {
        for &(cb, sb) in &b.terms {
            if sa.commutes_with(&sb) {
                continue;
            }
            let (phase, product) = sa.multiply(&sb)?;
            // i · (2 · phase) with phase ∈ {+i, -i}
            let sign = match phase {
                Phase::PlusI => -1.0,
                Phase::MinusI => 1.0,
                _ => unreachable!("anticommuting Pauli strings multiply to ±i"),
            };
            terms.push((2.0 * sign * ca * cb, product));
        }
    }
    PauliSum::new(a.n_qubits, terms)
}

/// Linear combination `Σ w_k s_k`, canonicalized.
pub fn scale_and_add(sums: &[(f64, &PauliSum)]) -> Result<PauliSum> {
    let Some(&(_, first)) = sums.first() else {
        return Err(Error::Parse("scale_and_add needs at least one operand".into()));
    };
    let n = first.n_qubits;
    let mut terms = Vec::new();
    for &(w, s) in sums {
        ensure_dim(n, s.n_qubits)?;
        terms.extend(s.terms.iter().map(|&(c, p)| (w * c, p)));
    }
    PauliSum::new(n, terms)
}

impl fmt::Display for PauliSum {
    /// One `<coefficient> <factors>` line per term. Coefficients use the
    /// shortest decimal form that parses back to the same `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, s) in &self.terms {
            writeln!(f, "{c:?} {s}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    /// Accepts newline- or `;`-separated `<coefficient> <factors>` records.
    /// `#` starts a comment. An empty sum must be written as `0 <factors>`.
    fn from_str(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for record in line.split(';') {
                let record = record.trim();
                if record.is_empty() {
                    continue;
                }
                let term = parse_term(record)
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                match n_qubits {
                    None => n_qubits = Some(term.1.n_qubits()),
                    Some(n) if n != term.1.n_qubits() => {
                        return Err(Error::Parse(format!(
                            "line {}: {} has {} qubits, expected {n}",
                            lineno + 1,
                            term.1,
                            term.1.n_qubits()
                        )))
                    }
                    _ => {}
                }
                terms.push(term);
            }
        }
        let n = n_qubits.ok_or_else(|| Error::Parse("no terms found".into()))?;
        PauliSum::new(n, terms)
    }
}

fn parse_term(record: &str) -> std::result::Result<(f64, PauliString), String> {
    let mut fields = record.split_whitespace();
    let (Some(coef), Some(factors), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(format!("expected `<coefficient> <factors>`, got {record:?}"));
    };
    let c: f64 = coef
        .parse()
        .map_err(|_| format!("invalid coefficient {coef:?}"))?;
    if !c.is_finite() {
        return Err(format!("non-finite coefficient {coef:?}"));
    }
    let s: PauliString = factors.parse().map_err(|e: Error| e.to_string())?;
    Ok((c, s))
}
