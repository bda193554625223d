//! Standard gate table, the conditional ("if the basis condition holds, act")
//! gate constructor, circuit composition and gate equivalence.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::statevec::{unitarity_deviation, Amplitude, StateVector, Unitary, TOLERANCE};

/// Tolerance for exact (permutation-level) equality.
pub const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateName {
    Not,
    H,
    Z,
    Phase,
    Cnot,
    Swap,
    Dcnot,
    Cphase,
    Relphase,
    Fredkin,
    Cycle3,
}

impl GateName {
    pub const ALL: [GateName; 11] = [
        GateName::Not,
        GateName::H,
        GateName::Z,
        GateName::Phase,
        GateName::Cnot,
        GateName::Swap,
        GateName::Dcnot,
        GateName::Cphase,
        GateName::Relphase,
        GateName::Fredkin,
        GateName::Cycle3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Not => "NOT",
            GateName::H => "H",
            GateName::Z => "Z",
            GateName::Phase => "PHASE",
            GateName::Cnot => "CNOT",
            GateName::Swap => "SWAP",
            GateName::Dcnot => "DCNOT",
            GateName::Cphase => "CPHASE",
            GateName::Relphase => "RELPHASE",
            GateName::Fredkin => "FREDKIN",
            GateName::Cycle3 => "CYCLE3",
        }
    }

    pub fn needs_phase(self) -> bool {
        matches!(self, GateName::Phase | GateName::Cphase | GateName::Relphase)
    }

    pub fn arity(self) -> usize {
        match self {
            GateName::Not | GateName::H | GateName::Z | GateName::Phase => 1,
            GateName::Cnot
            | GateName::Swap
            | GateName::Dcnot
            | GateName::Cphase
            | GateName::Relphase => 2,
            GateName::Fredkin | GateName::Cycle3 => 3,
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase().replace(['-', '_'], "");
        let alias = match wanted.as_str() {
            "X" => "NOT",
            "CX" => "CNOT",
            "CSWAP" => "FREDKIN",
            other => other,
        };
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == alias)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// Unitary whose action on basis states is the bit-string map `f`.
fn permutation_gate(arity: usize, f: impl Fn(&[u8]) -> Vec<u8>) -> Result<Unitary> {
    let dim = 1usize << arity;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let out = f(&StateVector::bits_of_index(col, arity));
        let row = out.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        entries[row * dim + col] = Complex64::new(1.0, 0.0);
    }
    Unitary::new(arity, entries)
}

fn phase_factor(phi: f64) -> Amplitude {
    Complex64::from_polar(1.0, phi)
}

/// Looks up a gate by name. `phase` is in radians and is required for the
/// PHASE, CPHASE and RELPHASE families.
///
/// CNOT uses its first target as control, FREDKIN its first as control.
/// `PHASE(φ)|s⟩ = e^{isφ}|s⟩`, `CPHASE(φ) = diag(1,1,1,e^{iφ})`,
/// `RELPHASE(φ) = diag(1,e^{iφ},e^{iφ},1)` and `DCNOT|i,j⟩ = |j,i⊕j⟩`.
/// CYCLE3 hands qubit 1 the state of qubit 3, qubit 2 that of qubit 1 and
/// qubit 3 that of qubit 2.
pub fn standard_gate(name: GateName, phase: Option<f64>) -> Result<Unitary> {
    let phi = match (name.needs_phase(), phase) {
        (true, None) => return Err(Error::MissingPhase(name.as_str())),
        (true, Some(p)) => p,
        (false, _) => 0.0,
    };
    let one = Complex64::new(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let gate = match name {
        GateName::Not => Unitary::from_real(1, &[0.0, 1.0, 1.0, 0.0])?,
        GateName::H => Unitary::from_real(1, &[h, h, h, -h])?,
        GateName::Z => Unitary::from_real(1, &[1.0, 0.0, 0.0, -1.0])?,
        GateName::Phase => Unitary::diagonal(&[one, phase_factor(phi)])?,
        GateName::Cnot => permutation_gate(2, |b| vec![b[0], b[1] ^ b[0]])?,
        GateName::Swap => permutation_gate(2, |b| vec![b[1], b[0]])?,
        GateName::Dcnot => permutation_gate(2, |b| vec![b[1], b[0] ^ b[1]])?,
        GateName::Cphase => Unitary::diagonal(&[one, one, one, phase_factor(phi)])?,
        GateName::Relphase => {
            let p = phase_factor(phi);
            Unitary::diagonal(&[one, p, p, one])?
        }
        GateName::Fredkin => permutation_gate(3, |b| {
            if b[0] == 1 {
                vec![b[0], b[2], b[1]]
            } else {
                b.to_vec()
            }
        })?,
        GateName::Cycle3 => permutation_gate(3, |b| vec![b[2], b[0], b[1]])?,
    };
    let label = if name.needs_phase() {
        format!("{name}({phi})")
    } else {
        name.to_string()
    };
    Ok(gate.with_label(label))
}

pub type Condition = dyn Fn(&[u8]) -> bool + Send + Sync;

/// A gate described as "if the basis bit-string satisfies `condition`, apply
/// `actions[k]` to qubit `k` (times a global phase); otherwise do nothing".
pub struct ConditionalGateSpec {
    n_qubits: usize,
    condition: Box<Condition>,
    actions: Vec<Unitary>,
    global_phase_when_true: Amplitude,
}

impl ConditionalGateSpec {
    pub fn new(
        condition: impl Fn(&[u8]) -> bool + Send + Sync + 'static,
        actions: Vec<Unitary>,
    ) -> Result<Self> {
        let n_qubits = actions.len();
        if n_qubits == 0 || n_qubits > crate::MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        if let Some(a) = actions.iter().find(|a| a.arity() != 1) {
            return Err(Error::ArityMismatch { arity: a.arity(), targets: 1 });
        }
        Ok(Self {
            n_qubits,
            condition: Box::new(condition),
            actions,
            global_phase_when_true: Complex64::new(1.0, 0.0),
        })
    }

    pub fn with_global_phase(mut self, phase: Amplitude) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > TOLERANCE {
            return Err(Error::PhaseModulus(phase.norm()));
        }
        self.global_phase_when_true = phase;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn holds(&self, bits: &[u8]) -> bool {
        (self.condition)(bits)
    }
}

impl fmt::Debug for ConditionalGateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConditionalGateSpec")
            .field("n_qubits", &self.n_qubits)
            .field("actions", &self.actions.iter().map(|a| a.label()).collect::<Vec<_>>())
            .field("global_phase_when_true", &self.global_phase_when_true)
            .finish_non_exhaustive()
    }
}

/// Literal reading of a conditional rule: each basis column `|b⟩` is sent to
/// `phase·(⊗ₖ actionₖ)|b⟩` when the condition holds and left alone otherwise.
/// Fails with [`Error::NonUnitaryResult`] when that map is not unitary.
pub fn build_conditional(spec: &ConditionalGateSpec) -> Result<Unitary> {
    let n = spec.n_qubits;
    let dim = 1usize << n;
    let mut product = spec.actions[0].clone();
    for a in &spec.actions[1..] {
        product = product.kron(a)?;
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        if spec.holds(&StateVector::bits_of_index(col, n)) {
            for row in 0..dim {
                entries[row * dim + col] = spec.global_phase_when_true * product.get(row, col);
            }
        } else {
            entries[col * dim + col] = Complex64::new(1.0, 0.0);
        }
    }
    let deviation = unitarity_deviation(&entries, dim);
    if deviation > TOLERANCE {
        return Err(Error::NonUnitaryResult { deviation });
    }
    Unitary::new(n, entries)
}

fn not() -> Unitary {
    standard_gate(GateName::Not, None).expect("NOT is in the table")
}

fn id1() -> Unitary {
    Unitary::identity(1).expect("arity 1 is valid")
}

/// Swap written as a rule: if the two qubits differ, flip both.
pub fn definition1_swap() -> Unitary {
    let spec = ConditionalGateSpec::new(|b| b[0] != b[1], vec![not(), not()])
        .expect("two single-qubit actions");
    build_conditional(&spec)
        .expect("flip-both-when-different is a permutation")
        .with_label("SWAP[conditional]")
}

/// Fredkin written as a rule: if the control is 1 and the two targets
/// differ, flip both targets.
pub fn definition2_fredkin() -> Unitary {
    let spec = ConditionalGateSpec::new(|b| b[0] == 1 && b[1] != b[2], vec![id1(), not(), not()])
        .expect("three single-qubit actions");
    build_conditional(&spec)
        .expect("controlled flip of differing targets is a permutation")
        .with_label("FREDKIN[conditional]")
}

/// The naive three-qubit extension of [`definition1_swap`]: flip all three
/// qubits unless they are all equal. Unitary, but not a cyclic swap.
pub fn definition1_style_3q() -> Unitary {
    let spec = ConditionalGateSpec::new(
        |b| !(b[0] == b[1] && b[1] == b[2]),
        vec![not(), not(), not()],
    )
    .expect("three single-qubit actions");
    build_conditional(&spec)
        .expect("complementing non-constant strings is a permutation")
        .with_label("FLIP3[conditional]")
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ u`.
pub fn controlled_u(u: &Unitary) -> Result<Unitary> {
    if u.arity() != 1 {
        return Err(Error::ArityMismatch { arity: u.arity(), targets: 1 });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let entries = vec![
        one,  zero, zero,         zero,
        zero, one,  zero,         zero,
        zero, zero, u.get(0, 0),  u.get(0, 1),
        zero, zero, u.get(1, 0),  u.get(1, 1),
    ];
    let gate = Unitary::new(2, entries)?;
    Ok(match u.label() {
        Some(l) => gate.with_label(format!("C-{l}")),
        None => gate,
    })
}

/// A circuit: gates listed in the order they act.
#[derive(Debug, Clone)]
pub struct GateExpr {
    n_qubits: usize,
    ops: Vec<(Unitary, Vec<usize>)>,
}

impl GateExpr {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Self { n_qubits, ops: Vec::new() })
    }

    pub fn push(&mut self, u: Unitary, targets: &[usize]) -> Result<&mut Self> {
        // validate eagerly so a bad circuit never gets as far as compose
        u.embed(targets, self.n_qubits)?;
        self.ops.push((u, targets.to_vec()));
        Ok(self)
    }

    pub fn then(mut self, u: Unitary, targets: &[usize]) -> Result<Self> {
        self.push(u, targets)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[(Unitary, Vec<usize>)] {
        &self.ops
    }
}

/// Product of the embedded gates, first gate acting first.
pub fn compose(expr: &GateExpr) -> Result<Unitary> {
    let mut total = Unitary::identity(expr.n_qubits)?;
    for (u, targets) in &expr.ops {
        total = u.embed(targets, expr.n_qubits)?.matmul(&total)?;
    }
    Ok(total)
}

fn check_same_dim(a: &Unitary, b: &Unitary) -> Result<()> {
    if a.arity() != b.arity() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// Entrywise equality within [`EXACT`].
pub fn equal_exact(a: &Unitary, b: &Unitary) -> Result<bool> {
    check_same_dim(a, b)?;
    Ok(a.entries().iter().zip(b.entries()).all(|(x, y)| (x - y).norm() <= EXACT))
}

/// Whether `a = λ·b` for some `|λ| = 1`, within `tol`. `λ` is read off the
/// first entry of largest modulus in `b`.
pub fn equal_up_to_global_phase(a: &Unitary, b: &Unitary, tol: f64) -> Result<bool> {
    check_same_dim(a, b)?;
    let (pivot, _) = b
        .entries()
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bm), (i, x)| if x.norm() > bm { (i, x.norm()) } else { (bi, bm) });
    let lambda = a.entries()[pivot] / b.entries()[pivot];
    if (lambda.norm() - 1.0).abs() > tol {
        return Ok(false);
    }
    Ok(a.entries().iter().zip(b.entries()).all(|(x, y)| (x - lambda * y).norm() <= tol))
}
