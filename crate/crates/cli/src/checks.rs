//! The identity and protocol checks run by `condswap verify`.

use serde::Serialize;

use condswap::classify::{classify, single_system_reducible, Verdict};
use condswap::gates::{
    build_conditional, compose, definition1_style_3q, definition1_swap, definition2_fredkin,
    equal_exact, standard_gate, ConditionalGateSpec, GateExpr, GateName,
};
use condswap::locc::{run_all_branches, Protocol, ResourceLedger};
use condswap::par::{self, Execution};
use condswap::sample::{self, BellState};
use condswap::{Error, StateVector, Unitary};

use crate::render;

/// Seeded random product states per sweep.
pub const TRIALS: u64 = 100;
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-12;
const REASSEMBLY_TOL: f64 = 1e-10;
const CLASSIFY_PHASE: f64 = 0.7;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

fn gate(name: GateName) -> Unitary {
    standard_gate(name, Some(CLASSIFY_PHASE)).expect("table gate")
}

fn exact_permutation(u: &Unitary, reference: &Unitary) -> bool {
    equal_exact(u, reference).unwrap_or(false)
        && u.as_permutation().is_some()
        && u.as_permutation() == reference.as_permutation()
}

fn max_diff(a: &Unitary, b: &Unitary) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Inputs whose image differs between two gates of equal arity.
pub fn disagreeing_inputs(a: &Unitary, b: &Unitary) -> Vec<usize> {
    (0..a.dim())
        .filter(|&i| !a.apply_to_basis(i).approx_eq(&b.apply_to_basis(i), 1e-12))
        .collect()
}

fn definition1_checks() -> Vec<Check> {
    let d1 = definition1_swap();
    let swap = gate(GateName::Swap);
    let rows = [([0, 0], [0, 0]), ([1, 1], [1, 1]), ([0, 1], [1, 0]), ([1, 0], [0, 1])];
    let table_ok = rows.iter().all(|(i, o)| {
        StateVector::basis_state(i).unwrap().apply(&d1, &[1, 2]).unwrap()
            == StateVector::basis_state(o).unwrap()
    });

    let seeds: Vec<u64> = (0..TRIALS).collect();
    let worst = par::map(Execution::default(), &seeds, |&seed| {
        let (f, input) = sample::random_product(&mut sample::rng(seed), 2);
        let expected = sample::product_state(&[f[1], f[0]]);
        input.apply(&d1, &[1, 2]).unwrap().fidelity(&expected).unwrap()
    })
    .into_iter()
    .fold(1.0, f64::min);

    vec![
        check("definition1 == SWAP", exact_permutation(&d1, &swap), "entrywise within 1e-12, 0/1 entries"),
        check(
            "definition1 truth table",
            table_ok,
            "|00>->|00>, |11>->|11>, |01>->|10>, |10>->|01>",
        ),
        check(
            "definition1 swaps unknown qubits",
            worst >= FIDELITY_FLOOR,
            format!("{TRIALS} seeded product states, min fidelity {}", render::real(worst)),
        ),
    ]
}

fn composition_checks() -> Vec<Check> {
    let cnot = gate(GateName::Cnot);
    let three = GateExpr::new(2)
        .and_then(|e| e.then(cnot.clone(), &[1, 2]))
        .and_then(|e| e.then(cnot.clone(), &[2, 1]))
        .and_then(|e| e.then(cnot.clone(), &[1, 2]))
        .and_then(|e| compose(&e))
        .expect("valid circuit");
    let two = GateExpr::new(2)
        .and_then(|e| e.then(cnot.clone(), &[1, 2]))
        .and_then(|e| e.then(cnot.clone(), &[2, 1]))
        .and_then(|e| compose(&e))
        .expect("valid circuit");
    let d2 = definition2_fredkin();
    let fredkin = gate(GateName::Fredkin);
    vec![
        check("three CNOTs == SWAP", exact_permutation(&three, &gate(GateName::Swap)), "CNOT(1,2) CNOT(2,1) CNOT(1,2)"),
        check("two alternating CNOTs == DCNOT", exact_permutation(&two, &gate(GateName::Dcnot)), "CNOT(1,2) CNOT(2,1)"),
        check(
            "definition2 == FREDKIN",
            exact_permutation(&d2, &fredkin) && disagreeing_inputs(&d2, &fredkin).is_empty(),
            "all 8 basis states",
        ),
    ]
}

fn three_qubit_checks() -> Vec<Check> {
    let cycle = gate(GateName::Cycle3);
    let seeds: Vec<u64> = (0..TRIALS).collect();
    let worst = par::map(Execution::default(), &seeds, |&seed| {
        let (f, input) = sample::random_product(&mut sample::rng(seed), 3);
        let expected = sample::product_state(&[f[2], f[0], f[1]]);
        let out = input.apply(&cycle, &[1, 2, 3]).unwrap();
        out.amplitudes()
            .iter()
            .zip(expected.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max);

    let naive = definition1_style_3q();
    let differ: Vec<String> = disagreeing_inputs(&naive, &cycle)
        .into_iter()
        .map(|i| render::ket(i, 3))
        .collect();
    vec![
        check(
            "CYCLE3 reassigns coefficients cyclically",
            worst <= 1e-12,
            format!("{TRIALS} seeded product states, max amplitude error {}", render::real(worst)),
        ),
        check(
            "definition1-style 3-qubit rule != CYCLE3",
            !differ.is_empty(),
            format!("disagrees on {}", differ.join(" ")),
        ),
    ]
}

fn unitarity_checks() -> Vec<Check> {
    let mut gates: Vec<Unitary> = GateName::ALL.iter().map(|&n| gate(n)).collect();
    gates.extend([definition1_swap(), definition2_fredkin(), definition1_style_3q()]);
    let worst = gates.iter().map(Unitary::unitarity_deviation).fold(0.0, f64::max);
    let orthogonal = gates.iter().all(|g| {
        (0..g.dim()).all(|i| {
            (0..i).all(|j| g.apply_to_basis(i).inner(&g.apply_to_basis(j)).unwrap().norm() < 1e-10)
        })
    });

    let hadamard_rule = ConditionalGateSpec::new(
        |b| b[0] != b[1],
        vec![gate(GateName::H), gate(GateName::H)],
    )
    .expect("two actions");
    let rejected = matches!(build_conditional(&hadamard_rule), Err(Error::NonUnitaryResult { .. }));
    vec![
        check(
            "all gates unitary and reversible",
            worst <= 1e-10 && orthogonal,
            format!("{} gates, max |U†U-I| {}", gates.len(), render::real(worst)),
        ),
        check("conditional rule with H actions rejected as non-unitary", rejected, "NonUnitaryResult"),
    ]
}

fn classification_checks() -> Vec<Check> {
    let table = [
        (GateName::Cnot, Verdict::Class1),
        (GateName::Cphase, Verdict::Class1),
        (GateName::Relphase, Verdict::Class1),
        (GateName::Swap, Verdict::Class2),
        (GateName::Dcnot, Verdict::Class2),
    ];
    let mut out: Vec<Check> = table
        .iter()
        .map(|&(name, expected)| {
            let g = gate(name);
            let class = classify(&g).expect("two-qubit gate");
            let mut ok = class.verdict == expected;
            let mut detail = format!("verdict {}", class.verdict);
            if let Some(rebuilt) = class.reassemble() {
                let err = max_diff(&rebuilt, &g);
                ok &= err <= REASSEMBLY_TOL;
                detail = format!("{detail}, reassembly error {}", render::real(err));
            }
            let label = g.label().unwrap_or(name.as_str()).to_string();
            check(format!("classify {label} = {expected}"), ok, detail)
        })
        .collect();
    let d1 = classify(&definition1_swap()).expect("two-qubit gate").verdict;
    out.push(check("classify definition1 = Class2", d1 == Verdict::Class2, format!("verdict {d1}")));
    let phase = standard_gate(GateName::Phase, Some(CLASSIFY_PHASE)).unwrap();
    let not = gate(GateName::Not);
    let id = Unitary::identity(1).unwrap();
    let reducible = single_system_reducible(&id.kron(&phase).unwrap()).unwrap()
        && !single_system_reducible(&not.kron(&not).unwrap()).unwrap()
        && !single_system_reducible(&gate(GateName::Cnot)).unwrap();
    out.push(check(
        "single-system reducibility",
        reducible,
        "I⊗PHASE reducible; NOT⊗NOT and CNOT not",
    ));
    out
}

/// Expected branch count and ledger per packaged protocol.
pub fn expected_resources(p: Protocol) -> (usize, ResourceLedger) {
    match p {
        Protocol::Teleport => (4, ResourceLedger::new(1, 2, 0)),
        Protocol::NonlocalCnot => (4, ResourceLedger::new(1, 1, 1)),
        Protocol::NonlocalSwapTeleport => (16, ResourceLedger::new(2, 2, 2)),
        Protocol::NonlocalSwapThreeCnots => (64, ResourceLedger::new(3, 3, 3)),
    }
}

/// Product and Bell-state inputs every protocol is checked against.
pub fn protocol_inputs() -> Vec<(String, StateVector)> {
    let mut inputs: Vec<(String, StateVector)> = (0..3u64)
        .map(|seed| (format!("product#{seed}"), sample::random_product(&mut sample::rng(seed), 2).1))
        .collect();
    inputs.extend(BellState::ALL.iter().map(|b| (format!("{b:?}"), b.state())));
    inputs
}

/// Worst per-branch fidelity, branch count set and ledgers across inputs.
pub struct ProtocolSweep {
    pub min_fidelity: f64,
    pub branch_counts: Vec<usize>,
    pub probability_sums: Vec<f64>,
    pub ledgers: Vec<ResourceLedger>,
}

pub fn sweep_protocol(p: Protocol) -> Result<ProtocolSweep, Error> {
    let mut sweep = ProtocolSweep {
        min_fidelity: 1.0,
        branch_counts: Vec::new(),
        probability_sums: Vec::new(),
        ledgers: Vec::new(),
    };
    for (_, input) in protocol_inputs() {
        let ideal = p.ideal_output(&input)?;
        let branches = run_all_branches(|src| p.run(&input, src))?;
        sweep.branch_counts.push(branches.len());
        sweep.probability_sums.push(branches.iter().map(|b| b.probability).sum());
        for b in &branches {
            sweep.min_fidelity = sweep.min_fidelity.min(b.value.output.fidelity(&ideal)?);
            sweep.ledgers.push(b.value.ledger);
        }
    }
    Ok(sweep)
}

fn locc_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut ledgers = Vec::new();
    for p in Protocol::ALL {
        let (count, ledger) = expected_resources(p);
        match sweep_protocol(p) {
            Ok(s) => {
                let ok = s.min_fidelity >= FIDELITY_FLOOR
                    && s.branch_counts.iter().all(|&c| c == count)
                    && s.probability_sums.iter().all(|t| (t - 1.0).abs() < 1e-9);
                out.push(check(
                    format!("{p}: every branch reproduces the ideal gate"),
                    ok,
                    format!(
                        "{} inputs x {count} branches, min fidelity {}",
                        s.branch_counts.len(),
                        render::real(s.min_fidelity)
                    ),
                ));
                let uniform = s.ledgers.iter().all(|l| *l == ledger);
                ledgers.push((p, uniform.then_some(ledger)));
            }
            Err(e) => {
                out.push(check(format!("{p}: every branch reproduces the ideal gate"), false, e.to_string()));
                ledgers.push((p, None));
            }
        }
    }

    let observed = |p: Protocol| ledgers.iter().find(|(q, _)| *q == p).and_then(|(_, l)| *l);
    let ledger_line = |p: Protocol, label: &str, ebits: u32, cbits: u32| {
        let got = observed(p);
        let ok = got.is_some_and(|l| l.ebits_consumed() == ebits && l.cbits_sent() == cbits);
        let detail = got.map_or("inconsistent across branches".to_string(), |l| l.to_string());
        let unit = if ebits == 1 { "ebit" } else { "ebits" };
        check(format!("{label} ledger = ({ebits} {unit}, {cbits} cbits)"), ok, detail)
    };
    out.push(ledger_line(Protocol::Teleport, "teleport", 1, 2));
    out.push(ledger_line(Protocol::NonlocalCnot, "nonlocal CNOT", 1, 2));
    out.push(ledger_line(Protocol::NonlocalSwapTeleport, "nonlocal SWAP", 2, 4));
    out.push(ledger_line(Protocol::NonlocalSwapThreeCnots, "three-CNOT nonlocal SWAP", 3, 6));
    let dominates = match (observed(Protocol::NonlocalSwapTeleport), observed(Protocol::NonlocalCnot)) {
        (Some(swap), Some(cnot)) => swap.strictly_dominates(&cnot),
        _ => false,
    };
    out.push(check("nonlocal SWAP ledger dominates nonlocal CNOT ledger", dominates, "ebits and cbits"));
    out
}

fn matrix_file_check() -> Check {
    let mut gates: Vec<Unitary> = GateName::ALL.iter().map(|&n| gate(n)).collect();
    gates.push(definition1_swap());
    let worst = gates
        .iter()
        .map(|g| match render::parse_matrix(&render::matrix_file(g)) {
            Ok(back) => max_diff(g, &back),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    check(
        "matrix file round trip",
        worst <= 1e-12,
        format!("max entry error {}", render::real(worst)),
    )
}

pub fn run_all() -> Vec<Check> {
    let mut checks = definition1_checks();
    checks.extend(composition_checks());
    checks.extend(three_qubit_checks());
    checks.extend(unitarity_checks());
    checks.extend(classification_checks());
    checks.extend(locc_checks());
    checks.push(matrix_file_check());
    checks
}
