//! Exact gate library and two-party LOCC simulator for conditionally defined
//! gates.
//!
//! * [`statevec`] holds dense state vectors and unitaries (at most
//!   [`MAX_QUBITS`] qubits, 1-based qubit indices, qubit 1 most significant).
//! * [`gates`] has the standard gate table and turns "if the basis condition
//!   holds, act on each qubit" rules into unitaries.
//! * [`classify`] sorts two-qubit gates into Class 1 (one-sided control) and
//!   Class 2.
//! * [`locc`] runs nonlocal gate protocols between Alice and Bob with exact
//!   ebit and classical-bit accounting, and enumerates every measurement
//!   branch.

pub mod classify;
pub mod error;
pub mod gates;
pub mod locc;
pub mod par;
pub mod sample;
pub mod statevec;

pub use error::{Error, Result};
pub use statevec::{Amplitude, StateVector, Unitary};

/// Largest joint system the simulator will build.
pub const MAX_QUBITS: usize = 8;
