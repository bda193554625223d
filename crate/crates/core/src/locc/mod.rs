//! Two-party LOCC simulation.
//!
//! Alice and Bob hold disjoint qubits of one joint [`StateVector`]. Qubits are
//! addressed by stable [`QubitId`] handles; measured ancillas are removed from
//! the joint state, so handles do not map to fixed positions. Every gate,
//! measurement and classical message is appended to a transcript together
//! with the running [`ResourceLedger`].

mod branches;
mod protocols;

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sample::BellState;
use crate::statevec::{StateVector, Unitary};
use crate::MAX_QUBITS;

pub use branches::{
    run_all_branches, run_all_branches_with, BranchRun, MeasurementSource, SeededDraws,
    MAX_MEASUREMENTS,
};
pub use protocols::{Protocol, ProtocolRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

/// Stable handle of a qubit inside a [`LoccSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct QubitId(pub u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Bell pairs allocated and classical bits sent so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResourceLedger {
    ebits_consumed: u32,
    cbits_alice_to_bob: u32,
    cbits_bob_to_alice: u32,
}

impl ResourceLedger {
    pub fn new(ebits: u32, alice_to_bob: u32, bob_to_alice: u32) -> Self {
        Self { ebits_consumed: ebits, cbits_alice_to_bob: alice_to_bob, cbits_bob_to_alice: bob_to_alice }
    }

    pub fn ebits_consumed(&self) -> u32 {
        self.ebits_consumed
    }

    pub fn cbits_sent(&self) -> u32 {
        self.cbits_alice_to_bob + self.cbits_bob_to_alice
    }

    pub fn cbits_from(&self, party: Party) -> u32 {
        match party {
            Party::Alice => self.cbits_alice_to_bob,
            Party::Bob => self.cbits_bob_to_alice,
        }
    }

    /// Counts since `earlier`.
    pub fn since(&self, earlier: &ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            ebits_consumed: self.ebits_consumed - earlier.ebits_consumed,
            cbits_alice_to_bob: self.cbits_alice_to_bob - earlier.cbits_alice_to_bob,
            cbits_bob_to_alice: self.cbits_bob_to_alice - earlier.cbits_bob_to_alice,
        }
    }

    /// More ebits and more classical bits than `other`.
    pub fn strictly_dominates(&self, other: &ResourceLedger) -> bool {
        self.ebits_consumed > other.ebits_consumed && self.cbits_sent() > other.cbits_sent()
    }
}

impl Serialize for ResourceLedger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ResourceLedger", 4)?;
        s.serialize_field("ebits", &self.ebits_consumed)?;
        s.serialize_field("cbits", &self.cbits_sent())?;
        s.serialize_field("alice_to_bob", &self.cbits_alice_to_bob)?;
        s.serialize_field("bob_to_alice", &self.cbits_bob_to_alice)?;
        s.end()
    }
}

impl fmt::Display for ResourceLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ebits={} cbits={} (alice->bob {}, bob->alice {})",
            self.ebits_consumed,
            self.cbits_sent(),
            self.cbits_alice_to_bob,
            self.cbits_bob_to_alice
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    BellPair { alice: QubitId, bob: QubitId },
    Gate { party: Party, gate: String, qubits: Vec<QubitId> },
    Measure { party: Party, qubit: QubitId, outcome: u8, probability: f64 },
    Send { from: Party, to: Party, bit: u8 },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::BellPair { alice, bob } => write!(f, "bell-pair alice={alice} bob={bob}"),
            Event::Gate { party, gate, qubits } => {
                let qubits: Vec<String> = qubits.iter().map(ToString::to_string).collect();
                write!(f, "gate party={party} gate={gate} qubits={}", qubits.join(","))
            }
            Event::Measure { party, qubit, outcome, probability } => {
                write!(f, "measure party={party} qubit={qubit} outcome={outcome} p={probability:.6}")
            }
            Event::Send { from, to, bit } => write!(f, "send from={from} to={to} bit={bit}"),
        }
    }
}

/// One transcript line: the event and the ledger right after it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub step: usize,
    #[serde(flatten)]
    pub event: Event,
    pub ledger: ResourceLedger,
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>3} {} | {}", self.step, self.event, self.ledger)
    }
}

#[derive(Debug, Clone)]
pub struct LoccSystem {
    joint: StateVector,
    live: Vec<QubitId>,
    owners: BTreeMap<QubitId, Party>,
    next_id: u32,
    ledger: ResourceLedger,
    transcript: Vec<Record>,
}

impl LoccSystem {
    /// Qubit `k` of `joint` becomes `QubitId(k)`, held by `owners[k-1]`.
    pub fn new(joint: StateVector, owners: &[Party]) -> Result<Self> {
        if owners.len() != joint.n_qubits() {
            return Err(Error::OwnerCount(owners.len(), joint.n_qubits()));
        }
        let live: Vec<QubitId> = (1..=owners.len() as u32).map(QubitId).collect();
        Ok(Self {
            owners: live.iter().copied().zip(owners.iter().copied()).collect(),
            next_id: owners.len() as u32 + 1,
            live,
            joint,
            ledger: ResourceLedger::default(),
            transcript: Vec::new(),
        })
    }

    pub fn joint(&self) -> &StateVector {
        &self.joint
    }

    /// Live qubits in joint-state order.
    pub fn qubits(&self) -> &[QubitId] {
        &self.live
    }

    pub fn owner(&self, qubit: QubitId) -> Result<Party> {
        self.owners.get(&qubit).copied().ok_or(Error::UnknownQubit(qubit))
    }

    pub fn owned_by(&self, party: Party) -> Vec<QubitId> {
        self.live.iter().copied().filter(|q| self.owners[q] == party).collect()
    }

    pub fn ledger(&self) -> &ResourceLedger {
        &self.ledger
    }

    pub fn transcript(&self) -> &[Record] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<Record> {
        self.transcript
    }

    /// 1-based position of `qubit` in the joint state.
    fn position(&self, qubit: QubitId) -> Result<usize> {
        self.live
            .iter()
            .position(|&q| q == qubit)
            .map(|p| p + 1)
            .ok_or(Error::UnknownQubit(qubit))
    }

    fn position_owned(&self, party: Party, qubit: QubitId) -> Result<usize> {
        let pos = self.position(qubit)?;
        if self.owners[&qubit] != party {
            return Err(Error::Ownership { party, qubit });
        }
        Ok(pos)
    }

    fn log(&mut self, event: Event) {
        self.transcript.push(Record { step: self.transcript.len() + 1, event, ledger: self.ledger });
    }

    /// Appends `(|00⟩+|11⟩)/√2`; returns `(alice_half, bob_half)`.
    pub fn create_bell_pair(&mut self) -> Result<(QubitId, QubitId)> {
        let n = self.joint.n_qubits() + 2;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        self.joint = self.joint.tensor(&BellState::PhiPlus.state())?;
        let alice = QubitId(self.next_id);
        let bob = QubitId(self.next_id + 1);
        self.next_id += 2;
        self.live.extend([alice, bob]);
        self.owners.insert(alice, Party::Alice);
        self.owners.insert(bob, Party::Bob);
        self.ledger.ebits_consumed += 1;
        self.log(Event::BellPair { alice, bob });
        Ok((alice, bob))
    }

    pub fn local_apply(&mut self, party: Party, u: &Unitary, targets: &[QubitId]) -> Result<()> {
        let positions = targets
            .iter()
            .map(|&q| self.position_owned(party, q))
            .collect::<Result<Vec<_>>>()?;
        self.joint = self.joint.apply(u, &positions)?;
        self.log(Event::Gate {
            party,
            gate: u.label().unwrap_or("U").to_string(),
            qubits: targets.to_vec(),
        });
        Ok(())
    }

    /// Measures `qubit` with an explicit draw in `[0, 1)` (outcome 0 iff
    /// `draw < P(0)`) and removes it from the system.
    pub fn local_measure(&mut self, party: Party, qubit: QubitId, draw: f64) -> Result<u8> {
        let pos = self.position_owned(party, qubit)?;
        let outcome = self.joint.measure(pos, draw)?;
        self.finish_measure(party, qubit, pos, outcome)
    }

    /// Measures `qubit`, letting `source` pick the outcome, and removes it.
    pub fn local_measure_with(
        &mut self,
        party: Party,
        qubit: QubitId,
        source: &mut dyn MeasurementSource,
    ) -> Result<u8> {
        let pos = self.position_owned(party, qubit)?;
        let p_zero = self.joint.probability(pos, 0)?;
        let bit = source.choose(p_zero);
        let outcome = self.joint.project(pos, bit)?;
        self.finish_measure(party, qubit, pos, outcome)
    }

    fn finish_measure(
        &mut self,
        party: Party,
        qubit: QubitId,
        pos: usize,
        outcome: crate::statevec::MeasurementOutcome,
    ) -> Result<u8> {
        self.joint = outcome.post_state.remove_qubit(pos)?;
        self.live.remove(pos - 1);
        self.owners.remove(&qubit);
        self.log(Event::Measure { party, qubit, outcome: outcome.bit, probability: outcome.probability });
        Ok(outcome.bit)
    }

    /// Sends one classical bit to the other party and returns it as delivered.
    pub fn send_bit(&mut self, from: Party, bit: u8) -> Result<u8> {
        if bit > 1 {
            return Err(Error::InvalidBit(bit));
        }
        match from {
            Party::Alice => self.ledger.cbits_alice_to_bob += 1,
            Party::Bob => self.ledger.cbits_bob_to_alice += 1,
        }
        self.log(Event::Send { from, to: from.other(), bit });
        Ok(bit)
    }

    /// Reduced state of exactly the live qubits, reordered as `order`.
    pub fn state_of(&self, order: &[QubitId]) -> Result<StateVector> {
        if order.len() != self.live.len() {
            return Err(Error::DimensionMismatch { left: order.len(), right: self.live.len() });
        }
        let positions = order.iter().map(|&q| self.position(q)).collect::<Result<Vec<_>>>()?;
        self.joint.permute(&positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{standard_gate, GateName};

    fn data_system() -> LoccSystem {
        let joint = StateVector::basis_state(&[0, 0]).unwrap();
        LoccSystem::new(joint, &[Party::Alice, Party::Bob]).unwrap()
    }

    /// Singular values of the 2×2 coefficient matrix of a two-qubit state.
    fn schmidt_coefficients(s: &StateVector) -> (f64, f64) {
        let a = s.amplitudes();
        // ρ_A = M M†, M = [[a0, a1], [a2, a3]]
        let r00 = a[0].norm_sqr() + a[1].norm_sqr();
        let r11 = a[2].norm_sqr() + a[3].norm_sqr();
        let r01 = a[0] * a[2].conj() + a[1] * a[3].conj();
        let mean = (r00 + r11) / 2.0;
        let spread = (((r00 - r11) / 2.0).powi(2) + r01.norm_sqr()).sqrt();
        ((mean + spread).sqrt(), (mean - spread).max(0.0).sqrt())
    }

    #[test]
    fn bell_pair_creation() {
        let mut sys = data_system();
        let (a, b) = sys.create_bell_pair().unwrap();
        assert_eq!((a, b), (QubitId(3), QubitId(4)));
        assert_eq!(sys.joint().n_qubits(), 4);
        assert_eq!(sys.ledger().ebits_consumed(), 1);
        assert_eq!(sys.owner(a).unwrap(), Party::Alice);
        assert_eq!(sys.owner(b).unwrap(), Party::Bob);
        assert_eq!(sys.owned_by(Party::Alice), vec![QubitId(1), a]);

        sys.create_bell_pair().unwrap();
        assert_eq!(sys.ledger().ebits_consumed(), 2);

        let (s0, s1) = schmidt_coefficients(&BellState::PhiPlus.state());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s0 - h).abs() < 1e-12 && (s1 - h).abs() < 1e-12);
    }

    #[test]
    fn bell_pair_respects_budget() {
        let joint = StateVector::basis_state(&[0; 7]).unwrap();
        let mut sys = LoccSystem::new(joint, &[Party::Alice; 7]).unwrap();
        assert_eq!(sys.create_bell_pair(), Err(Error::QubitCount(9)));
        assert_eq!(sys.ledger().ebits_consumed(), 0);
    }

    #[test]
    fn ownership_enforced() {
        let mut sys = data_system();
        let not = standard_gate(GateName::Not, None).unwrap();
        assert_eq!(
            sys.local_apply(Party::Alice, &not, &[QubitId(2)]),
            Err(Error::Ownership { party: Party::Alice, qubit: QubitId(2) })
        );
        assert_eq!(
            sys.local_measure(Party::Bob, QubitId(1), 0.5),
            Err(Error::Ownership { party: Party::Bob, qubit: QubitId(1) })
        );
        assert_eq!(
            sys.local_apply(Party::Alice, &not, &[QubitId(9)]),
            Err(Error::UnknownQubit(QubitId(9)))
        );
        assert!(sys.transcript().is_empty());
        sys.local_apply(Party::Alice, &not, &[QubitId(1)]).unwrap();
        assert_eq!(sys.joint(), &StateVector::basis_state(&[1, 0]).unwrap());
    }

    #[test]
    fn send_bit_counts_by_direction() {
        let mut sys = data_system();
        for bit in [0, 1, 1, 0] {
            sys.send_bit(Party::Alice, bit).unwrap();
        }
        sys.send_bit(Party::Bob, 1).unwrap();
        let l = sys.ledger();
        assert_eq!((l.cbits_from(Party::Alice), l.cbits_from(Party::Bob), l.cbits_sent()), (4, 1, 5));
        assert_eq!(sys.send_bit(Party::Bob, 2), Err(Error::InvalidBit(2)));
    }

    #[test]
    fn measuring_bell_half() {
        for (draw, expected) in [(0.2, 0u8), (0.7, 1u8)] {
            let mut sys = data_system();
            let (a, b) = sys.create_bell_pair().unwrap();
            let bit = sys.local_measure(Party::Alice, a, draw).unwrap();
            assert_eq!(bit, expected);
            match &sys.transcript().last().unwrap().event {
                Event::Measure { probability, .. } => assert!((probability - 0.5).abs() < 1e-12),
                e => panic!("unexpected {e:?}"),
            }
            assert_eq!(sys.qubits(), &[QubitId(1), QubitId(2), b]);
            // Bob's half collapsed to the same value
            let pos = 3;
            assert!((sys.joint().probability(pos, expected).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_of_reorders() {
        let joint = StateVector::basis_state(&[1, 0]).unwrap();
        let sys = LoccSystem::new(joint, &[Party::Alice, Party::Bob]).unwrap();
        let swapped = sys.state_of(&[QubitId(2), QubitId(1)]).unwrap();
        assert_eq!(swapped, StateVector::basis_state(&[0, 1]).unwrap());
        assert!(sys.state_of(&[QubitId(1)]).is_err());
    }

    #[test]
    fn owner_count_checked() {
        let joint = StateVector::basis_state(&[0, 0]).unwrap();
        assert_eq!(LoccSystem::new(joint, &[Party::Alice]).err(), Some(Error::OwnerCount(1, 2)));
    }

    #[test]
    fn transcript_lines() {
        let mut sys = data_system();
        sys.create_bell_pair().unwrap();
        sys.send_bit(Party::Bob, 1).unwrap();
        let lines: Vec<String> = sys.transcript().iter().map(ToString::to_string).collect();
        assert_eq!(
            lines,
            vec![
                "  1 bell-pair alice=q3 bob=q4 | ebits=1 cbits=0 (alice->bob 0, bob->alice 0)",
                "  2 send from=bob to=alice bit=1 | ebits=1 cbits=1 (alice->bob 0, bob->alice 1)",
            ]
        );
    }

    #[test]
    fn ledger_dominance() {
        let cnot = ResourceLedger::new(1, 1, 1);
        let swap = ResourceLedger::new(2, 2, 2);
        assert!(swap.strictly_dominates(&cnot));
        assert!(!cnot.strictly_dominates(&swap));
        assert!(!swap.strictly_dominates(&swap));
        assert_eq!(swap.since(&cnot), cnot);
    }
}
