//! Nonlocal gate protocols built from local gates, measurements, shared Bell
//! pairs and counted classical bits.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{LoccSystem, MeasurementSource, Party, QubitId, Record, ResourceLedger};
use crate::error::{Error, Result};
use crate::gates::{controlled_u, standard_gate, GateName};
use crate::statevec::{StateVector, Unitary};

fn gate(name: GateName) -> Unitary {
    standard_gate(name, None).expect("parameter-free table gate")
}

impl LoccSystem {
    fn distinct_owners(&self, a: QubitId, b: QubitId) -> Result<(Party, Party)> {
        let (pa, pb) = (self.owner(a)?, self.owner(b)?);
        if pa == pb {
            return Err(Error::SameParty(a, b, pa));
        }
        Ok((pa, pb))
    }

    /// Fresh Bell pair split as `(half held by party, half held by the other)`.
    fn bell_pair_for(&mut self, party: Party) -> Result<(QubitId, QubitId)> {
        let (alice, bob) = self.create_bell_pair()?;
        Ok(match party {
            Party::Alice => (alice, bob),
            Party::Bob => (bob, alice),
        })
    }

    /// Moves the state of `source` onto a fresh qubit held by `to`, using one
    /// Bell pair and two bits sent from the source's holder. The source and the
    /// sender's Bell half are measured out.
    pub fn teleport(
        &mut self,
        source: QubitId,
        to: Party,
        outcomes: &mut dyn MeasurementSource,
    ) -> Result<QubitId> {
        let from = self.owner(source)?;
        if from == to {
            return Err(Error::SelfTeleport(from));
        }
        let (near, far) = self.bell_pair_for(from)?;

        self.local_apply(from, &gate(GateName::Cnot), &[source, near])?;
        self.local_apply(from, &gate(GateName::H), &[source])?;
        let phase_bit = self.local_measure_with(from, source, outcomes)?;
        let flip_bit = self.local_measure_with(from, near, outcomes)?;
        let phase_bit = self.send_bit(from, phase_bit)?;
        let flip_bit = self.send_bit(from, flip_bit)?;

        if flip_bit == 1 {
            self.local_apply(to, &gate(GateName::Not), &[far])?;
        }
        if phase_bit == 1 {
            self.local_apply(to, &gate(GateName::Z), &[far])?;
        }
        Ok(far)
    }

    /// Controlled-`u` from `control` onto `target`, held by different parties.
    ///
    /// The control's holder copies the control value into its Bell half and
    /// measures it; the target's holder repairs its half, which now mirrors the
    /// control, applies controlled-`u` locally, then measures the half in the
    /// Hadamard basis so the control's holder can undo the leftover phase.
    /// Costs one ebit and one bit in each direction.
    pub fn nonlocal_control_u(
        &mut self,
        control: QubitId,
        target: QubitId,
        u: &Unitary,
        outcomes: &mut dyn MeasurementSource,
    ) -> Result<()> {
        let (cp, tp) = self.distinct_owners(control, target)?;
        let cu = controlled_u(u)?;
        let (c_half, t_half) = self.bell_pair_for(cp)?;

        self.local_apply(cp, &gate(GateName::Cnot), &[control, c_half])?;
        let m = self.local_measure_with(cp, c_half, outcomes)?;
        if self.send_bit(cp, m)? == 1 {
            self.local_apply(tp, &gate(GateName::Not), &[t_half])?;
        }

        self.local_apply(tp, &cu, &[t_half, target])?;

        self.local_apply(tp, &gate(GateName::H), &[t_half])?;
        let m = self.local_measure_with(tp, t_half, outcomes)?;
        if self.send_bit(tp, m)? == 1 {
            self.local_apply(cp, &gate(GateName::Z), &[control])?;
        }
        Ok(())
    }

    /// Exchanges the states of `a` and `b` (different parties) by teleporting
    /// `a` over, swapping locally and teleporting one qubit back. `b` keeps its
    /// handle; the returned handle replaces `a`. Two ebits, two bits each way.
    pub fn nonlocal_swap_teleport(
        &mut self,
        a: QubitId,
        b: QubitId,
        outcomes: &mut dyn MeasurementSource,
    ) -> Result<QubitId> {
        let (pa, pb) = self.distinct_owners(a, b)?;
        let moved = self.teleport(a, pb, outcomes)?;
        self.local_apply(pb, &gate(GateName::Swap), &[moved, b])?;
        self.teleport(moved, pa, outcomes)
    }

    /// Swap as three nonlocal CNOTs: `a→b`, `b→a`, `a→b`. Three ebits, six bits.
    pub fn nonlocal_swap_three_cnots(
        &mut self,
        a: QubitId,
        b: QubitId,
        outcomes: &mut dyn MeasurementSource,
    ) -> Result<()> {
        self.distinct_owners(a, b)?;
        let not = gate(GateName::Not);
        self.nonlocal_control_u(a, b, &not, outcomes)?;
        self.nonlocal_control_u(b, a, &not, outcomes)?;
        self.nonlocal_control_u(a, b, &not, outcomes)
    }
}

/// The packaged protocols, each acting on a two-qubit data register with
/// qubit 1 held by Alice and qubit 2 by Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Teleports Alice's data qubit to Bob; the ideal action is the identity.
    Teleport,
    NonlocalCnot,
    NonlocalSwapTeleport,
    NonlocalSwapThreeCnots,
}

impl Serialize for Protocol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Teleport,
        Protocol::NonlocalCnot,
        Protocol::NonlocalSwapTeleport,
        Protocol::NonlocalSwapThreeCnots,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Teleport => "teleport",
            Protocol::NonlocalCnot => "nonlocal-cnot",
            Protocol::NonlocalSwapTeleport => "nonlocal-swap-teleport",
            Protocol::NonlocalSwapThreeCnots => "nonlocal-swap-3cnot",
        }
    }

    /// The gate the protocol should realize on the data register.
    pub fn ideal_gate(self) -> Unitary {
        match self {
            Protocol::Teleport => Unitary::identity(2).expect("arity 2"),
            Protocol::NonlocalCnot => gate(GateName::Cnot),
            Protocol::NonlocalSwapTeleport | Protocol::NonlocalSwapThreeCnots => gate(GateName::Swap),
        }
    }

    pub fn ideal_output(self, input: &StateVector) -> Result<StateVector> {
        input.apply(&self.ideal_gate(), &[1, 2])
    }

    /// Runs the protocol on `input` (qubit 1 at Alice, qubit 2 at Bob). The
    /// output lists Alice's data qubit first.
    pub fn run(self, input: &StateVector, outcomes: &mut dyn MeasurementSource) -> Result<ProtocolRun> {
        let mut sys = LoccSystem::new(input.clone(), &[Party::Alice, Party::Bob])?;
        let (a, b) = (QubitId(1), QubitId(2));
        let order = match self {
            Protocol::Teleport => {
                let moved = sys.teleport(a, Party::Bob, outcomes)?;
                [moved, b]
            }
            Protocol::NonlocalCnot => {
                sys.nonlocal_control_u(a, b, &gate(GateName::Not), outcomes)?;
                [a, b]
            }
            Protocol::NonlocalSwapTeleport => [sys.nonlocal_swap_teleport(a, b, outcomes)?, b],
            Protocol::NonlocalSwapThreeCnots => {
                sys.nonlocal_swap_three_cnots(a, b, outcomes)?;
                [a, b]
            }
        };
        let output = sys.state_of(&order)?;
        let ledger = *sys.ledger();
        Ok(ProtocolRun { output, ledger, transcript: sys.into_transcript() })
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let known: Vec<&str> = Protocol::ALL.iter().map(|p| p.as_str()).collect();
                format!("unknown protocol `{s}` (expected one of: {})", known.join(", "))
            })
    }
}

/// Final data register, ledger and transcript of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRun {
    pub output: StateVector,
    pub ledger: ResourceLedger,
    pub transcript: Vec<Record>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locc::{run_all_branches, Event, SeededDraws};
    use crate::sample::{self, BellState};
    use num_complex::Complex64;

    #[test]
    fn teleport_single_qubit() {
        let psi = StateVector::qubit(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let branches = run_all_branches(|src| {
            let mut sys = LoccSystem::new(psi.clone(), &[Party::Alice])?;
            let q = sys.teleport(QubitId(1), Party::Bob, src)?;
            assert_eq!(sys.owned_by(Party::Bob), vec![q]);
            assert!(sys.owned_by(Party::Alice).is_empty());
            Ok((sys.state_of(&[q])?, *sys.ledger()))
        })
        .unwrap();
        assert_eq!(branches.len(), 4);
        for b in &branches {
            assert!((b.probability - 0.25).abs() < 1e-12);
            assert!((b.value.0.fidelity(&psi).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(b.value.1, ResourceLedger::new(1, 2, 0));
        }
    }

    #[test]
    fn teleport_zero_every_branch() {
        let zero = StateVector::basis_state(&[0]).unwrap();
        let branches = run_all_branches(|src| {
            let mut sys = LoccSystem::new(zero.clone(), &[Party::Bob])?;
            let q = sys.teleport(QubitId(1), Party::Alice, src)?;
            sys.state_of(&[q])
        })
        .unwrap();
        assert_eq!(branches.len(), 4);
        assert!(branches.iter().all(|b| b.value.approx_eq(&zero, 1e-12)));
    }

    #[test]
    fn teleport_to_self_rejected() {
        let zero = StateVector::basis_state(&[0]).unwrap();
        let mut sys = LoccSystem::new(zero, &[Party::Alice]).unwrap();
        let err = sys.teleport(QubitId(1), Party::Alice, &mut SeededDraws::new(0));
        assert_eq!(err, Err(Error::SelfTeleport(Party::Alice)));
    }

    #[test]
    fn nonlocal_cnot_product_input() {
        let alice = StateVector::qubit(Complex64::new(0.8, 0.0), Complex64::new(0.0, -0.6)).unwrap();
        let input = alice.tensor(&StateVector::basis_state(&[0]).unwrap()).unwrap();
        let ideal = Protocol::NonlocalCnot.ideal_output(&input).unwrap();
        let branches = run_all_branches(|src| Protocol::NonlocalCnot.run(&input, src)).unwrap();
        assert_eq!(branches.len(), 4);
        for b in &branches {
            assert!((b.probability - 0.25).abs() < 1e-12);
            assert!((b.value.output.fidelity(&ideal).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(b.value.ledger, ResourceLedger::new(1, 1, 1));
        }
    }

    #[test]
    fn nonlocal_identity_control() {
        let (_, input) = sample::random_product(&mut sample::rng(4), 2);
        let branches = run_all_branches(|src| {
            let mut sys = LoccSystem::new(input.clone(), &[Party::Alice, Party::Bob])?;
            sys.nonlocal_control_u(QubitId(1), QubitId(2), &Unitary::identity(1)?, src)?;
            sys.state_of(&[QubitId(1), QubitId(2)])
        })
        .unwrap();
        for b in &branches {
            assert!((b.value.fidelity(&input).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlocal_control_u_general_unitary() {
        // Bob controls an H on Alice's qubit
        let h = standard_gate(GateName::H, None).unwrap();
        let (_, input) = sample::random_product(&mut sample::rng(9), 2);
        let ideal = input.apply(&controlled_u(&h).unwrap(), &[2, 1]).unwrap();
        let branches = run_all_branches(|src| {
            let mut sys = LoccSystem::new(input.clone(), &[Party::Alice, Party::Bob])?;
            sys.nonlocal_control_u(QubitId(2), QubitId(1), &h, src)?;
            assert_eq!(*sys.ledger(), ResourceLedger::new(1, 1, 1));
            sys.state_of(&[QubitId(1), QubitId(2)])
        })
        .unwrap();
        assert_eq!(branches.len(), 4);
        for b in &branches {
            assert!((b.value.fidelity(&ideal).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_party_rejected() {
        let input = StateVector::basis_state(&[0, 0]).unwrap();
        let mut sys = LoccSystem::new(input, &[Party::Alice, Party::Alice]).unwrap();
        let not = standard_gate(GateName::Not, None).unwrap();
        let err = sys.nonlocal_control_u(QubitId(1), QubitId(2), &not, &mut SeededDraws::new(0));
        assert_eq!(err, Err(Error::SameParty(QubitId(1), QubitId(2), Party::Alice)));
        assert!(sys.transcript().is_empty());
    }

    #[test]
    fn swap_of_equal_states_is_trivial() {
        let input = StateVector::basis_state(&[0, 0]).unwrap();
        for p in [Protocol::NonlocalSwapTeleport, Protocol::NonlocalSwapThreeCnots] {
            let run = p.run(&input, &mut SeededDraws::new(1)).unwrap();
            assert!(run.output.approx_eq(&input, 1e-12));
        }
    }

    #[test]
    fn swap_leaves_symmetric_bell_state() {
        let phi = BellState::PhiPlus.state();
        for p in [Protocol::NonlocalSwapTeleport, Protocol::NonlocalSwapThreeCnots] {
            let branches = run_all_branches(|src| p.run(&phi, src)).unwrap();
            for b in &branches {
                assert!((b.value.output.fidelity(&phi).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ledgers() {
        let input = StateVector::basis_state(&[1, 0]).unwrap();
        let expected = [
            (Protocol::Teleport, ResourceLedger::new(1, 2, 0)),
            (Protocol::NonlocalCnot, ResourceLedger::new(1, 1, 1)),
            (Protocol::NonlocalSwapTeleport, ResourceLedger::new(2, 2, 2)),
            (Protocol::NonlocalSwapThreeCnots, ResourceLedger::new(3, 3, 3)),
        ];
        for (p, ledger) in expected {
            let run = p.run(&input, &mut SeededDraws::new(2)).unwrap();
            assert_eq!(run.ledger, ledger, "{p}");
            // ledger snapshots in the transcript never decrease
            for w in run.transcript.windows(2) {
                let (x, y) = (&w[0].ledger, &w[1].ledger);
                assert!(y.ebits_consumed() >= x.ebits_consumed() && y.cbits_sent() >= x.cbits_sent());
            }
        }
    }

    #[test]
    fn transcript_ownership_is_consistent() {
        let (_, input) = sample::random_product(&mut sample::rng(5), 2);
        for p in Protocol::ALL {
            let run = p.run(&input, &mut SeededDraws::new(6)).unwrap();
            let mut owners = std::collections::BTreeMap::from([
                (QubitId(1), Party::Alice),
                (QubitId(2), Party::Bob),
            ]);
            for r in &run.transcript {
                match &r.event {
                    Event::BellPair { alice, bob } => {
                        owners.insert(*alice, Party::Alice);
                        owners.insert(*bob, Party::Bob);
                    }
                    Event::Gate { party, qubits, .. } => {
                        assert!(qubits.iter().all(|q| owners[q] == *party), "{p}: {r}");
                    }
                    Event::Measure { party, qubit, .. } => assert_eq!(owners[qubit], *party),
                    Event::Send { from, to, .. } => assert_eq!(from.other(), *to),
                }
            }
        }
    }

    #[test]
    fn protocol_names() {
        for p in Protocol::ALL {
            assert_eq!(p.as_str().parse::<Protocol>().unwrap(), p);
        }
        assert!("bogus".parse::<Protocol>().is_err());
    }
}
