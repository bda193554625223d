//! Class 1 / Class 2 taxonomy of two-qubit gates in the computational basis.
//!
//! A Class 1 gate acts conditionally on only one qubit: it can be written as
//! `Σᵢ |i⟩⟨i| ⊗ Uᵢ` (first qubit controls) or `Σⱼ Uⱼ ⊗ |j⟩⟨j|` (second qubit
//! controls). Everything else is Class 2. No search over local basis changes
//! is made, so the verdict is basis dependent.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::equal_up_to_global_phase;
use crate::statevec::{Unitary, TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Class1,
    Class2,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Class1 => "Class1",
            Verdict::Class2 => "Class2",
        })
    }
}

/// Which qubit acts as control in a Class 1 decomposition. `Both` means the
/// gate is diagonal, so either qubit can be read as the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ControlSide {
    First,
    Second,
    Both,
}

impl fmt::Display for ControlSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlSide::First => "first",
            ControlSide::Second => "second",
            ControlSide::Both => "both (diagonal)",
        })
    }
}

/// Classification verdict. For Class 1, `blocks` holds the action applied to
/// the other qubit when the control reads 0 and 1. With `ControlSide::Both`
/// the blocks are the ones for the first qubit as control.
#[derive(Debug, Clone, Serialize)]
pub struct GateClass {
    pub verdict: Verdict,
    pub control_side: Option<ControlSide>,
    pub blocks: Option<(Unitary, Unitary)>,
}

impl GateClass {
    /// Rebuilds the two-qubit gate from the control side and blocks.
    pub fn reassemble(&self) -> Option<Unitary> {
        let (b0, b1) = self.blocks.as_ref()?;
        let side = match self.control_side? {
            ControlSide::First | ControlSide::Both => Side::First,
            ControlSide::Second => Side::Second,
        };
        Some(assemble(side, b0, b1))
    }
}

fn check_two_qubit(g: &Unitary) -> Result<()> {
    if g.arity() != 2 {
        return Err(Error::DimensionMismatch { left: g.dim(), right: 4 });
    }
    Ok(())
}

/// Row/column index of `|control, other⟩` in the 4×4 matrix.
#[inline]
fn index(side: Side, control: usize, other: usize) -> usize {
    match side {
        Side::First => 2 * control + other,
        Side::Second => 2 * other + control,
    }
}

fn assemble(side: Side, b0: &Unitary, b1: &Unitary) -> Unitary {
    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    for (c, block) in [b0, b1].into_iter().enumerate() {
        for r in 0..2 {
            for k in 0..2 {
                entries[index(side, c, r) * 4 + index(side, c, k)] = block.get(r, k);
            }
        }
    }
    Unitary::new(2, entries).expect("block-diagonal of unitaries is unitary")
}

/// Splits `g` into per-control-value blocks when the chosen qubit acts as a
/// pure control; `None` if any cross-block entry exceeds 1e-10 or a block
/// fails to be unitary.
pub fn one_sided_decomposition(g: &Unitary, side: Side) -> Result<Option<(Unitary, Unitary)>> {
    check_two_qubit(g)?;
    for cr in 0..2 {
        for cc in 0..2 {
            if cr == cc {
                continue;
            }
            for r in 0..2 {
                for k in 0..2 {
                    if g.get(index(side, cr, r), index(side, cc, k)).norm() > TOLERANCE {
                        return Ok(None);
                    }
                }
            }
        }
    }
    let block = |c: usize| {
        let entries = (0..4).map(|i| g.get(index(side, c, i / 2), index(side, c, i % 2))).collect();
        Unitary::new(1, entries)
    };
    match (block(0), block(1)) {
        (Ok(b0), Ok(b1)) => Ok(Some((b0, b1))),
        (Err(Error::NotUnitary { .. }), _) | (_, Err(Error::NotUnitary { .. })) => Ok(None),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// True when one qubit's control is vacuous: both blocks of a one-sided
/// decomposition agree up to global phase, so the gate is the evolution of a
/// single qubit (up to a phase conditioned on the other).
pub fn single_system_reducible(g: &Unitary) -> Result<bool> {
    for side in [Side::First, Side::Second] {
        if let Some((b0, b1)) = one_sided_decomposition(g, side)? {
            if equal_up_to_global_phase(&b0, &b1, TOLERANCE)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn classify(g: &Unitary) -> Result<GateClass> {
    let first = one_sided_decomposition(g, Side::First)?;
    let second = one_sided_decomposition(g, Side::Second)?;
    Ok(match (first, second) {
        (Some(blocks), Some(_)) => GateClass {
            verdict: Verdict::Class1,
            control_side: Some(ControlSide::Both),
            blocks: Some(blocks),
        },
        (Some(blocks), None) => GateClass {
            verdict: Verdict::Class1,
            control_side: Some(ControlSide::First),
            blocks: Some(blocks),
        },
        (None, Some(blocks)) => GateClass {
            verdict: Verdict::Class1,
            control_side: Some(ControlSide::Second),
            blocks: Some(blocks),
        },
        (None, None) => GateClass { verdict: Verdict::Class2, control_side: None, blocks: None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{
        controlled_u, definition1_swap, equal_exact, standard_gate, GateName,
    };

    fn gate(name: GateName) -> Unitary {
        standard_gate(name, Some(0.7)).unwrap()
    }

    fn id1() -> Unitary {
        Unitary::identity(1).unwrap()
    }

    fn assert_reassembles(g: &Unitary) {
        let class = classify(g).unwrap();
        let rebuilt = class.reassemble().expect("class 1");
        let worst = rebuilt
            .entries()
            .iter()
            .zip(g.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "reassembly error {worst}");
    }

    #[test]
    fn cnot_blocks() {
        let (b0, b1) = one_sided_decomposition(&gate(GateName::Cnot), Side::First)
            .unwrap()
            .unwrap();
        assert!(equal_exact(&b0, &id1()).unwrap());
        assert!(equal_exact(&b1, &gate(GateName::Not)).unwrap());
        assert!(one_sided_decomposition(&gate(GateName::Cnot), Side::Second).unwrap().is_none());
    }

    #[test]
    fn swap_has_no_one_sided_form() {
        // SWAP's entry at row |10⟩, column |01⟩ is 1, a cross-block entry
        assert_eq!(gate(GateName::Swap).get(2, 1), Complex64::new(1.0, 0.0));
        assert!(one_sided_decomposition(&gate(GateName::Swap), Side::First).unwrap().is_none());
        assert!(one_sided_decomposition(&gate(GateName::Swap), Side::Second).unwrap().is_none());
    }

    #[test]
    fn relphase_blocks() {
        let phi = 0.7;
        let p = Complex64::from_polar(1.0, phi);
        let one = Complex64::new(1.0, 0.0);
        let (b0, b1) = one_sided_decomposition(&gate(GateName::Relphase), Side::First)
            .unwrap()
            .unwrap();
        assert!(equal_exact(&b0, &Unitary::diagonal(&[one, p]).unwrap()).unwrap());
        assert!(equal_exact(&b1, &Unitary::diagonal(&[p, one]).unwrap()).unwrap());
    }

    #[test]
    fn second_side_control() {
        // CNOT with qubit 2 as control
        let reversed = gate(GateName::Cnot).embed(&[2, 1], 2).unwrap();
        let class = classify(&reversed).unwrap();
        assert_eq!(class.verdict, Verdict::Class1);
        assert_eq!(class.control_side, Some(ControlSide::Second));
        let (b0, b1) = class.blocks.clone().unwrap();
        assert!(equal_exact(&b0, &id1()).unwrap());
        assert!(equal_exact(&b1, &gate(GateName::Not)).unwrap());
        assert_reassembles(&reversed);
    }

    #[test]
    fn single_system_examples() {
        let phase = standard_gate(GateName::Phase, Some(0.4)).unwrap();
        assert!(single_system_reducible(&id1().kron(&phase).unwrap()).unwrap());
        assert!(single_system_reducible(&phase.kron(&id1()).unwrap()).unwrap());
        // the phase gate on both qubits differs from one-qubit evolution only by a conditional phase
        assert!(single_system_reducible(&phase.kron(&phase).unwrap()).unwrap());
        assert!(single_system_reducible(&gate(GateName::H).kron(&id1()).unwrap()).unwrap());
        assert!(!single_system_reducible(&gate(GateName::Cnot)).unwrap());
        let not = gate(GateName::Not);
        assert!(!single_system_reducible(&not.kron(&not).unwrap()).unwrap());
        assert!(!single_system_reducible(&gate(GateName::Swap)).unwrap());
    }

    #[test]
    fn verdict_table() {
        let class1 = [
            gate(GateName::Cnot),
            gate(GateName::Cphase),
            gate(GateName::Relphase),
            controlled_u(&gate(GateName::H)).unwrap(),
        ];
        for g in &class1 {
            assert_eq!(classify(g).unwrap().verdict, Verdict::Class1, "{:?}", g.label());
            assert_reassembles(g);
        }
        for g in [gate(GateName::Swap), definition1_swap(), gate(GateName::Dcnot)] {
            let class = classify(&g).unwrap();
            assert_eq!(class.verdict, Verdict::Class2, "{:?}", g.label());
            assert!(class.control_side.is_none() && class.blocks.is_none());
        }
        assert_eq!(classify(&gate(GateName::Cnot)).unwrap().control_side, Some(ControlSide::First));
    }

    #[test]
    fn diagonal_gates_are_both_sided() {
        for g in [gate(GateName::Cphase), gate(GateName::Relphase), Unitary::identity(2).unwrap()] {
            let class = classify(&g).unwrap();
            assert_eq!(class.control_side, Some(ControlSide::Both));
            assert_reassembles(&g);
        }
    }

    #[test]
    fn wrong_dimension() {
        assert!(matches!(classify(&id1()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            one_sided_decomposition(&gate(GateName::Fredkin), Side::First),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(single_system_reducible(&id1()).is_err());
    }
}
