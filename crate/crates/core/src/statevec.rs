//! Dense state vectors and unitaries over at most [`MAX_QUBITS`] qubits.
//!
//! Qubits are addressed with 1-based indices. Basis index `b` encodes the
//! bit-string `b₁b₂…bₙ` with qubit 1 as the most significant bit, so for two
//! qubits `|0⟩₁|1⟩₂` is index 1 and `|1⟩₁|0⟩₂` is index 2.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

pub type Amplitude = Complex64;

/// Absolute tolerance for normalization and unitarity checks.
pub const TOLERANCE: f64 = 1e-10;

/// Branches whose probability falls below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

const ZERO: Amplitude = Complex64 { re: 0.0, im: 0.0 };
const ONE: Amplitude = Complex64 { re: 1.0, im: 0.0 };

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t == 0 || t > n_qubits {
            return Err(Error::QubitOutOfRange { index: t, n_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Bit position (counted from the least significant bit) of a 1-based qubit.
#[inline]
fn bit_of(qubit: usize, n_qubits: usize) -> usize {
    n_qubits - qubit
}

/// Applies a `2^k × 2^k` row-major matrix to the qubits sitting at `shifts`
/// (bit positions, first entry = most significant factor of the matrix).
fn apply_kernel(matrix: &[Amplitude], shifts: &[usize], amps: &[Amplitude]) -> Vec<Amplitude> {
    let k = shifts.len();
    let local_dim = 1usize << k;
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            shifts
                .iter()
                .enumerate()
                .filter(|(f, _)| l >> (k - 1 - f) & 1 == 1)
                .map(|(_, s)| 1usize << s)
                .sum()
        })
        .collect();

    let mut out = vec![ZERO; amps.len()];
    let mut gathered = vec![ZERO; local_dim];
    for base in (0..amps.len()).filter(|b| b & mask == 0) {
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &matrix[r * local_dim..(r + 1) * local_dim];
            out[base | off] = row.iter().zip(&gathered).map(|(m, a)| m * a).sum();
        }
    }
    out
}

/// Joint pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Computational basis state `|bits⟩`.
    pub fn basis_state(bits: &[u8]) -> Result<Self> {
        check_qubit_count(bits.len())?;
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidBit(b));
            }
            index = (index << 1) | b as usize;
        }
        let mut amps = vec![ZERO; 1 << bits.len()];
        amps[index] = ONE;
        Ok(Self { n_qubits: bits.len(), amps })
    }

    /// Builds a state from raw amplitudes, which must already be normalized.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Single-qubit state `α|0⟩ + β|1⟩`.
    pub fn qubit(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    /// Decodes basis index `index` into its bit-string, qubit 1 first.
    pub fn bits_of_index(index: usize, n_qubits: usize) -> Vec<u8> {
        (1..=n_qubits)
            .map(|q| (index >> bit_of(q, n_qubits) & 1) as u8)
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product `self ⊗ other`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_qubit_count(n_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { n_qubits, amps })
    }

    /// Applies `u` to `targets`. `targets[0]` is the most significant tensor
    /// factor of `u`.
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<StateVector> {
        if u.arity != targets.len() {
            return Err(Error::ArityMismatch { arity: u.arity, targets: targets.len() });
        }
        check_targets(targets, self.n_qubits)?;
        let shifts: Vec<usize> = targets.iter().map(|&t| bit_of(t, self.n_qubits)).collect();
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: apply_kernel(&u.entries, &shifts, &self.amps),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Entrywise comparison within `tol`; global phase matters.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.n_qubits == other.n_qubits
            && self.amps.iter().zip(&other.amps).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Probability that measuring `qubit` yields `bit`.
    pub fn probability(&self, qubit: usize, bit: u8) -> Result<f64> {
        check_targets(&[qubit], self.n_qubits)?;
        if bit > 1 {
            return Err(Error::InvalidBit(bit));
        }
        let shift = bit_of(qubit, self.n_qubits);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift & 1) as u8 == bit)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto `bit` and renormalizes.
    pub fn project(&self, qubit: usize, bit: u8) -> Result<MeasurementOutcome> {
        let probability = self.probability(qubit, bit)?;
        if probability < ZERO_PROBABILITY {
            return Err(Error::ZeroProbabilityBranch { bit });
        }
        let shift = bit_of(qubit, self.n_qubits);
        let scale = 1.0 / probability.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if (i >> shift & 1) as u8 == bit { a * scale } else { ZERO })
            .collect();
        Ok(MeasurementOutcome {
            bit,
            probability,
            post_state: StateVector { n_qubits: self.n_qubits, amps },
        })
    }

    /// Computational-basis measurement of `qubit`. Outcome 0 is chosen iff
    /// `draw < P(0)`; a zero-probability choice is forced to the other outcome.
    pub fn measure(&self, qubit: usize, draw: f64) -> Result<MeasurementOutcome> {
        if !(0.0..1.0).contains(&draw) {
            return Err(Error::InvalidDraw(draw));
        }
        let p_zero = self.probability(qubit, 0)?;
        let mut bit = if draw < p_zero { 0 } else { 1 };
        let p_bit = if bit == 0 { p_zero } else { 1.0 - p_zero };
        if p_bit < ZERO_PROBABILITY {
            bit ^= 1;
        }
        self.project(qubit, bit)
    }

    /// Both measurement branches of `qubit`, outcome 0 first.
    pub fn enumerate_branches(&self, qubit: usize) -> Result<Vec<Branch>> {
        (0..=1u8)
            .map(|bit| {
                let probability = self.probability(qubit, bit)?;
                let post_state = match self.project(qubit, bit) {
                    Ok(outcome) => Some(outcome.post_state),
                    Err(Error::ZeroProbabilityBranch { .. }) => None,
                    Err(e) => return Err(e),
                };
                Ok(Branch { bit, probability, post_state })
            })
            .collect()
    }

    /// Drops `qubit`, which must sit in a definite computational basis value
    /// (e.g. right after being measured).
    pub fn remove_qubit(&self, qubit: usize) -> Result<StateVector> {
        check_targets(&[qubit], self.n_qubits)?;
        check_qubit_count(self.n_qubits - 1)?;
        let p_one = self.probability(qubit, 1)?;
        let keep = if p_one < TOLERANCE {
            0
        } else if 1.0 - p_one < TOLERANCE {
            1
        } else {
            return Err(Error::NotDisentangled(qubit));
        };
        let shift = bit_of(qubit, self.n_qubits);
        let low_mask = (1usize << shift) - 1;
        let mut amps: Vec<Amplitude> = (0..self.dim() / 2)
            .map(|r| {
                let full = ((r & !low_mask) << 1) | (keep << shift) | (r & low_mask);
                self.amps[full]
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { n_qubits: self.n_qubits - 1, amps })
    }

    /// Reorders qubits: qubit `i` of the result is qubit `order[i-1]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: order.len(), right: self.n_qubits });
        }
        check_targets(order, self.n_qubits)?;
        let n = self.n_qubits;
        let mut amps = vec![ZERO; self.dim()];
        for (old_index, a) in self.amps.iter().enumerate() {
            let new_index = order.iter().fold(0usize, |acc, &q| {
                (acc << 1) | (old_index >> bit_of(q, n) & 1)
            });
            amps[new_index] = *a;
        }
        Ok(StateVector { n_qubits: n, amps })
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < ZERO_PROBABILITY {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let bits: String = Self::bits_of_index(i, self.n_qubits)
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect();
            write!(f, "({:.6}{:+.6}i)|{}>", a.re, a.im, bits)?;
        }
        Ok(())
    }
}

/// Result of a single computational-basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: u8,
    pub probability: f64,
    pub post_state: StateVector,
}

/// One arm of [`StateVector::enumerate_branches`]. `post_state` is `None`
/// for a zero-probability arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub bit: u8,
    pub probability: f64,
    pub post_state: Option<StateVector>,
}

impl Branch {
    pub fn is_possible(&self) -> bool {
        self.post_state.is_some()
    }
}

/// Dense `2^k × 2^k` unitary acting on `k` qubits, stored row-major.
///
/// An optional label travels with the matrix for transcripts and reports; it
/// plays no part in any equality check.
#[derive(Debug, Clone, Serialize)]
pub struct Unitary {
    arity: usize,
    entries: Vec<Amplitude>,
    #[serde(skip)]
    label: Option<String>,
}

impl Unitary {
    /// Validates shape, finiteness and `U†U = I` within [`TOLERANCE`].
    pub fn new(arity: usize, entries: Vec<Amplitude>) -> Result<Self> {
        let u = Self::from_entries(arity, entries)?;
        let deviation = u.unitarity_deviation();
        if deviation > TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// Shape-checked but not unitarity-checked; for callers that report the
    /// unitarity failure themselves.
    pub(crate) fn from_entries(arity: usize, entries: Vec<Amplitude>) -> Result<Self> {
        check_qubit_count(arity)?;
        let dim = 1usize << arity;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: entries.len(), right: dim * dim });
        }
        if let Some(i) = entries.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { arity, entries, label: None })
    }

    /// Square matrix given as rows; the arity is inferred from the row count.
    pub fn from_rows(rows: &[Vec<Amplitude>]) -> Result<Self> {
        let dim = rows.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { left: bad.len(), right: dim });
        }
        Self::new(dim.trailing_zeros() as usize, rows.concat())
    }

    /// Real-valued entries, row-major.
    pub fn from_real(arity: usize, entries: &[f64]) -> Result<Self> {
        Self::new(arity, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(arity: usize) -> Result<Self> {
        check_qubit_count(arity)?;
        let dim = 1usize << arity;
        let entries = (0..dim * dim)
            .map(|i| if i / dim == i % dim { ONE } else { ZERO })
            .collect();
        Ok(Self { arity, entries, label: Some("I".into()) })
    }

    /// Diagonal unitary from its diagonal; each entry must have modulus 1.
    pub fn diagonal(diag: &[Amplitude]) -> Result<Self> {
        let dim = diag.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let entries = (0..dim * dim)
            .map(|i| if i / dim == i % dim { diag[i / dim] } else { ZERO })
            .collect();
        Self::new(dim.trailing_zeros() as usize, entries)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim() + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Amplitude]> {
        self.entries.chunks(self.dim())
    }

    pub fn adjoint(&self) -> Unitary {
        let dim = self.dim();
        let entries = (0..dim * dim).map(|i| self.get(i % dim, i / dim).conj()).collect();
        Unitary { arity: self.arity, entries, label: None }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn matmul(&self, rhs: &Unitary) -> Result<Unitary> {
        if self.arity != rhs.arity {
            return Err(Error::DimensionMismatch { left: self.arity, right: rhs.arity });
        }
        let dim = self.dim();
        let entries = (0..dim * dim)
            .map(|i| {
                let (r, c) = (i / dim, i % dim);
                (0..dim).map(|k| self.get(r, k) * rhs.get(k, c)).sum()
            })
            .collect();
        Ok(Unitary { arity: self.arity, entries, label: None })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Unitary) -> Result<Unitary> {
        let arity = self.arity + rhs.arity;
        check_qubit_count(arity)?;
        let (da, db) = (self.dim(), rhs.dim());
        let dim = da * db;
        let entries = (0..dim * dim)
            .map(|i| {
                let (r, c) = (i / dim, i % dim);
                self.get(r / db, c / db) * rhs.get(r % db, c % db)
            })
            .collect();
        let label = match (self.label(), rhs.label()) {
            (Some(a), Some(b)) => Some(format!("{a}⊗{b}")),
            _ => None,
        };
        Ok(Unitary { arity, entries, label })
    }

    /// Scalar multiple `λ·self`; `λ` must have modulus 1.
    pub fn scaled(&self, lambda: Amplitude) -> Result<Unitary> {
        if (lambda.norm() - 1.0).abs() > TOLERANCE {
            return Err(Error::PhaseModulus(lambda.norm()));
        }
        Ok(Unitary {
            arity: self.arity,
            entries: self.entries.iter().map(|a| a * lambda).collect(),
            label: None,
        })
    }

    /// Full `2^n × 2^n` matrix acting as `self` on `targets`, identity elsewhere.
    pub fn embed(&self, targets: &[usize], n_qubits: usize) -> Result<Unitary> {
        check_qubit_count(n_qubits)?;
        if self.arity != targets.len() {
            return Err(Error::ArityMismatch { arity: self.arity, targets: targets.len() });
        }
        check_targets(targets, n_qubits)?;
        let shifts: Vec<usize> = targets.iter().map(|&t| bit_of(t, n_qubits)).collect();
        let dim = 1usize << n_qubits;
        let mut entries = vec![ZERO; dim * dim];
        let mut column = vec![ZERO; dim];
        for c in 0..dim {
            column[c] = ONE;
            for (r, a) in apply_kernel(&self.entries, &shifts, &column).into_iter().enumerate() {
                entries[r * dim + c] = a;
            }
            column[c] = ZERO;
        }
        Ok(Unitary { arity: n_qubits, entries, label: None })
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.entries, self.dim())
    }

    /// Column `c`, i.e. the image of basis state `c`.
    pub fn column(&self, c: usize) -> Vec<Amplitude> {
        (0..self.dim()).map(|r| self.get(r, c)).collect()
    }

    /// Image of basis state `index` as a state vector.
    pub fn apply_to_basis(&self, index: usize) -> StateVector {
        StateVector { n_qubits: self.arity, amps: self.column(index) }
    }

    /// If every entry rounds to 0 or 1 within 1e-12 and the pattern is a
    /// permutation, returns the image index of each basis column.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        const EXACT: f64 = 1e-12;
        let dim = self.dim();
        let mut image = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut hit = None;
            for r in 0..dim {
                let a = self.get(r, c);
                if (a - ONE).norm() <= EXACT {
                    if hit.replace(r).is_some() {
                        return None;
                    }
                } else if a.norm() > EXACT {
                    return None;
                }
            }
            image.push(hit?);
        }
        let mut seen = vec![false; dim];
        for &r in &image {
            if std::mem::replace(&mut seen[r], true) {
                return None;
            }
        }
        Some(image)
    }
}

pub(crate) fn unitarity_deviation(entries: &[Amplitude], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let dot: Amplitude = (0..dim)
                .map(|k| entries[k * dim + i].conj() * entries[k * dim + j])
                .sum();
            let expected = if i == j { ONE } else { ZERO };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}
