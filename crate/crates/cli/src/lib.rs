//! Commands behind the `condswap` binary. Each command returns a [`Report`]
//! that renders either as human-readable text or as JSON.

pub mod checks;
pub mod render;

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use condswap::classify::{classify, single_system_reducible, ControlSide, Verdict};
use condswap::gates::{definition1_style_3q, definition1_swap, definition2_fredkin, standard_gate, GateName};
use condswap::locc::{run_all_branches, Protocol, Record, ResourceLedger, SeededDraws};
use condswap::sample::{self, BellState};
use condswap::{StateVector, Unitary};

pub use checks::Check;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] condswap::Error),
    #[error("matrix file: {0}")]
    Matrix(condswap::Error),
    #[error("matrix file: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Gate argument: a table gate or one of the conditional constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateArg {
    Table(GateName),
    Definition1Swap,
    Definition2Fredkin,
    Definition1Style3q,
}

impl GateArg {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "definition1" | "def1-swap" => Ok(GateArg::Definition1Swap),
            "definition2" | "def2-fredkin" => Ok(GateArg::Definition2Fredkin),
            "def1-3q" | "definition1-3q" => Ok(GateArg::Definition1Style3q),
            _ => Ok(GateArg::Table(s.parse()?)),
        }
    }

    pub fn build(self, phase: Option<f64>) -> Result<Unitary, CliError> {
        Ok(match self {
            GateArg::Table(name) => standard_gate(name, phase)?,
            GateArg::Definition1Swap => definition1_swap(),
            GateArg::Definition2Fredkin => definition2_fredkin(),
            GateArg::Definition1Style3q => definition1_style_3q(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthRow {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary {
    pub outcomes: String,
    pub probability: f64,
    pub fidelity: f64,
    pub ledger: ResourceLedger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    AllBranches,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Product,
    Bell(BellState),
}

impl InputKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "product" => InputKind::Product,
            "phi+" | "phi-plus" => InputKind::Bell(BellState::PhiPlus),
            "phi-" | "phi-minus" => InputKind::Bell(BellState::PhiMinus),
            "psi+" | "psi-plus" => InputKind::Bell(BellState::PsiPlus),
            "psi-" | "psi-minus" => InputKind::Bell(BellState::PsiMinus),
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown input `{s}` (expected product, phi+, phi-, psi+ or psi-)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    TruthTable {
        gate: String,
        rows: Vec<TruthRow>,
    },
    Verify {
        checks: Vec<Check>,
    },
    Classify {
        gate: String,
        verdict: Verdict,
        control_side: Option<ControlSide>,
        blocks: Option<[Vec<Vec<String>>; 2]>,
        single_system_reducible: bool,
    },
    Simulate {
        protocol: Protocol,
        mode: SimulationMode,
        seed: u64,
        input: String,
        ideal_output: String,
        branches: Vec<BranchSummary>,
        #[serde(skip_serializing_if = "Option::is_none")]
        transcript: Option<Vec<Record>>,
        ledger: ResourceLedger,
        min_fidelity: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(flatten)]
    pub payload: Payload,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.payload {
            Payload::TruthTable { gate, rows } => {
                writeln!(out, "truth table of {gate}").unwrap();
                for r in rows {
                    writeln!(out, "  {} -> {}", r.input, r.output).unwrap();
                }
            }
            Payload::Verify { checks } => {
                for c in checks {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{}: {verdict}  ({})", c.name, c.detail).unwrap();
                }
                let failed = checks.iter().filter(|c| !c.passed).count();
                writeln!(out, "{} checks, {failed} failed", checks.len()).unwrap();
            }
            Payload::Classify { gate, verdict, control_side, blocks, single_system_reducible } => {
                writeln!(out, "{gate}: {verdict}").unwrap();
                if let Some(side) = control_side {
                    writeln!(out, "control: {side}").unwrap();
                }
                if let Some([b0, b1]) = blocks {
                    for (value, block) in [(0, b0), (1, b1)] {
                        writeln!(out, "block for control={value}:").unwrap();
                        for row in block {
                            writeln!(out, "  {}", row.join(" ")).unwrap();
                        }
                    }
                }
                writeln!(out, "single-system reducible: {single_system_reducible}").unwrap();
            }
            Payload::Simulate {
                protocol,
                mode,
                seed,
                input,
                ideal_output,
                branches,
                transcript,
                ledger,
                min_fidelity,
            } => {
                let mode = match mode {
                    SimulationMode::AllBranches => "all branches",
                    SimulationMode::Sampled => "sampled",
                };
                writeln!(out, "protocol {protocol} ({mode}, seed {seed})").unwrap();
                writeln!(out, "input: {input}").unwrap();
                writeln!(out, "ideal output: {ideal_output}").unwrap();
                if let Some(records) = transcript {
                    for r in records {
                        writeln!(out, "{r}").unwrap();
                    }
                }
                for b in branches {
                    writeln!(
                        out,
                        "branch {}: p={} fidelity={}",
                        b.outcomes,
                        render::real(b.probability),
                        render::real(b.fidelity)
                    )
                    .unwrap();
                }
                writeln!(out, "branches: {}", branches.len()).unwrap();
                writeln!(out, "ledger: {ledger}").unwrap();
                writeln!(out, "min fidelity: {}", render::real(*min_fidelity)).unwrap();
            }
        }
        let status = if self.passed { "ok" } else { "FAILED" };
        writeln!(out, "result: {status}").unwrap();
        out
    }
}

fn gate_title(u: &Unitary, fallback: &str) -> String {
    u.label().unwrap_or(fallback).to_string()
}

pub fn cmd_truth_table(gate: &str, phase: Option<f64>) -> Result<Report, CliError> {
    let u = GateArg::parse(gate)?.build(phase)?;
    let rows = (0..u.dim())
        .map(|i| TruthRow {
            input: render::ket(i, u.arity()),
            output: render::state(&u.apply_to_basis(i)),
        })
        .collect();
    Ok(Report {
        command: format!("truth-table {gate}"),
        payload: Payload::TruthTable { gate: gate_title(&u, gate), rows },
        passed: true,
    })
}

pub fn cmd_verify() -> Report {
    let checks = checks::run_all();
    let passed = checks.iter().all(|c| c.passed);
    Report { command: "verify".into(), payload: Payload::Verify { checks }, passed }
}

pub enum ClassifyTarget<'a> {
    Gate(&'a str),
    File(&'a Path),
}

pub fn cmd_classify(target: ClassifyTarget<'_>, phase: Option<f64>) -> Result<Report, CliError> {
    let (title, u) = match target {
        ClassifyTarget::Gate(name) => {
            let u = GateArg::parse(name)?.build(phase)?;
            (gate_title(&u, name), u)
        }
        ClassifyTarget::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            (path.display().to_string(), render::parse_matrix(&text)?)
        }
    };
    if u.arity() != 2 {
        return Err(CliError::Usage(format!(
            "classification needs a two-qubit (4x4) gate; {title} acts on {} qubit(s)",
            u.arity()
        )));
    }
    let class = classify(&u)?;
    let blocks = class
        .blocks
        .as_ref()
        .map(|(b0, b1)| [render::matrix_rows(b0), render::matrix_rows(b1)]);
    Ok(Report {
        command: format!("classify {title}"),
        payload: Payload::Classify {
            gate: title,
            verdict: class.verdict,
            control_side: class.control_side,
            blocks,
            single_system_reducible: single_system_reducible(&u)?,
        },
        passed: true,
    })
}

pub struct SimulateOptions {
    pub seed: Option<u64>,
    pub all_branches: bool,
    pub input: InputKind,
}

fn protocol_input(kind: InputKind, seed: u64) -> StateVector {
    match kind {
        InputKind::Product => sample::random_product(&mut sample::rng(seed), 2).1,
        InputKind::Bell(b) => b.state(),
    }
}

pub fn cmd_simulate(protocol: &str, opts: &SimulateOptions) -> Result<Report, CliError> {
    let protocol: Protocol = protocol.parse().map_err(CliError::Usage)?;
    let (mode, seed) = match (opts.all_branches, opts.seed) {
        (true, seed) => (SimulationMode::AllBranches, seed.unwrap_or(0)),
        (false, Some(seed)) => (SimulationMode::Sampled, seed),
        (false, None) => {
            return Err(CliError::Usage("sampling needs --seed <N> (or pass --all-branches)".into()))
        }
    };
    let input = protocol_input(opts.input, seed);
    let ideal = protocol.ideal_output(&input)?;

    let (branches, transcript, ledger) = match mode {
        SimulationMode::AllBranches => {
            let runs = run_all_branches(|src| protocol.run(&input, src))?;
            let mut summaries = Vec::with_capacity(runs.len());
            for b in &runs {
                summaries.push(BranchSummary {
                    outcomes: b.outcomes.iter().map(|&x| char::from(b'0' + x)).collect(),
                    probability: b.probability,
                    fidelity: b.value.output.fidelity(&ideal)?,
                    ledger: b.value.ledger,
                });
            }
            let ledger = runs.first().map(|b| b.value.ledger).unwrap_or_default();
            (summaries, None, ledger)
        }
        SimulationMode::Sampled => {
            // separate stream from the one that generated the input
            let mut draws = SeededDraws::new(seed ^ 0x5eed_d4a5_0000_0001);
            let run = protocol.run(&input, &mut draws)?;
            let outcomes: String = run
                .transcript
                .iter()
                .filter_map(|r| match r.event {
                    condswap::locc::Event::Measure { outcome, .. } => Some(char::from(b'0' + outcome)),
                    _ => None,
                })
                .collect();
            let probability = run
                .transcript
                .iter()
                .filter_map(|r| match r.event {
                    condswap::locc::Event::Measure { probability, .. } => Some(probability),
                    _ => None,
                })
                .product();
            let summary = BranchSummary {
                outcomes,
                probability,
                fidelity: run.output.fidelity(&ideal)?,
                ledger: run.ledger,
            };
            (vec![summary], Some(run.transcript), run.ledger)
        }
    };
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(1.0, f64::min);
    let passed = min_fidelity >= checks::FIDELITY_FLOOR;
    let mode_flag = match mode {
        SimulationMode::AllBranches => "--all-branches",
        SimulationMode::Sampled => "--seed",
    };
    Ok(Report {
        command: format!("simulate {protocol} {mode_flag}"),
        payload: Payload::Simulate {
            protocol,
            mode,
            seed,
            input: render::state(&input),
            ideal_output: render::state(&ideal),
            branches,
            transcript,
            ledger,
            min_fidelity,
        },
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_truth_table() {
        let r = cmd_truth_table("swap", None).unwrap();
        let Payload::TruthTable { rows, .. } = &r.payload else { panic!() };
        let pairs: Vec<(&str, &str)> = rows.iter().map(|r| (r.input.as_str(), r.output.as_str())).collect();
        assert_eq!(pairs, vec![("|00>", "|00>"), ("|01>", "|10>"), ("|10>", "|01>"), ("|11>", "|11>")]);
    }

    #[test]
    fn fredkin_truth_table() {
        let r = cmd_truth_table("fredkin", None).unwrap();
        let Payload::TruthTable { rows, .. } = &r.payload else { panic!() };
        assert_eq!(rows.len(), 8);
        let moved: Vec<_> = rows.iter().filter(|r| r.input != r.output).map(|r| r.input.as_str()).collect();
        assert_eq!(moved, vec!["|101>", "|110>"]);
    }

    #[test]
    fn phase_truth_table_renders_amplitudes() {
        let r = cmd_truth_table("phase", Some(std::f64::consts::PI)).unwrap();
        let Payload::TruthTable { rows, .. } = &r.payload else { panic!() };
        assert_eq!(rows[1].output, "-1|1>");
        assert!(matches!(cmd_truth_table("phase", None), Err(CliError::Core(_))));
    }

    #[test]
    fn unknown_gate() {
        assert!(matches!(
            cmd_truth_table("nosuchgate", None),
            Err(CliError::Core(condswap::Error::UnknownGate(_)))
        ));
    }

    #[test]
    fn classify_cnot_and_swap() {
        let r = cmd_classify(ClassifyTarget::Gate("cnot"), None).unwrap();
        let Payload::Classify { verdict, control_side, blocks, .. } = &r.payload else { panic!() };
        assert_eq!(*verdict, Verdict::Class1);
        assert_eq!(*control_side, Some(ControlSide::First));
        let [b0, b1] = blocks.as_ref().unwrap();
        assert_eq!(b0, &vec![vec!["1+0j", "0+0j"], vec!["0+0j", "1+0j"]]);
        assert_eq!(b1, &vec![vec!["0+0j", "1+0j"], vec!["1+0j", "0+0j"]]);

        let r = cmd_classify(ClassifyTarget::Gate("definition1"), None).unwrap();
        let Payload::Classify { verdict, blocks, .. } = &r.payload else { panic!() };
        assert_eq!(*verdict, Verdict::Class2);
        assert!(blocks.is_none());

        assert!(matches!(cmd_classify(ClassifyTarget::Gate("fredkin"), None), Err(CliError::Usage(_))));
    }

    #[test]
    fn simulate_requires_seed_when_sampling() {
        let opts = SimulateOptions { seed: None, all_branches: false, input: InputKind::Product };
        assert!(matches!(cmd_simulate("teleport", &opts), Err(CliError::Usage(_))));
        let opts = SimulateOptions { seed: Some(1), all_branches: false, input: InputKind::Product };
        assert!(matches!(cmd_simulate("warp-drive", &opts), Err(CliError::Usage(_))));
    }

    #[test]
    fn simulate_all_branches() {
        let opts = SimulateOptions { seed: None, all_branches: true, input: InputKind::Product };
        let r = cmd_simulate("nonlocal-cnot", &opts).unwrap();
        assert!(r.passed);
        let Payload::Simulate { branches, ledger, .. } = &r.payload else { panic!() };
        assert_eq!(branches.len(), 4);
        assert_eq!((ledger.ebits_consumed(), ledger.cbits_sent()), (1, 2));
    }

    #[test]
    fn sampled_run_has_transcript() {
        let opts = SimulateOptions { seed: Some(3), all_branches: false, input: InputKind::Bell(BellState::PsiMinus) };
        let r = cmd_simulate("nonlocal-swap-teleport", &opts).unwrap();
        assert!(r.passed);
        let Payload::Simulate { branches, transcript, .. } = &r.payload else { panic!() };
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].outcomes.len(), 4);
        assert!((branches[0].probability - 1.0 / 16.0).abs() < 1e-12);
        assert!(transcript.as_ref().is_some_and(|t| !t.is_empty()));
    }
}
