//! Measurement-outcome sources and exhaustive branch enumeration.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::sample;
use crate::statevec::ZERO_PROBABILITY;

/// Upper bound on measurement events per enumerated protocol run.
pub const MAX_MEASUREMENTS: usize = 16;

/// Decides measurement outcomes during a protocol run.
pub trait MeasurementSource {
    /// Picks an outcome given the probability of 0. Must not return an
    /// outcome of zero probability.
    fn choose(&mut self, p_zero: f64) -> u8;
}

/// Replayable sampling: one uniform draw per measurement from a seeded
/// ChaCha stream, outcome 0 iff `draw < P(0)`.
#[derive(Debug, Clone)]
pub struct SeededDraws {
    rng: ChaCha8Rng,
}

impl SeededDraws {
    pub fn new(seed: u64) -> Self {
        Self { rng: sample::rng(seed) }
    }
}

impl MeasurementSource for SeededDraws {
    fn choose(&mut self, p_zero: f64) -> u8 {
        let draw: f64 = self.rng.gen();
        let bit = u8::from(draw >= p_zero);
        let p_bit = if bit == 0 { p_zero } else { 1.0 - p_zero };
        if p_bit < ZERO_PROBABILITY {
            bit ^ 1
        } else {
            bit
        }
    }
}

/// Follows a fixed outcome prefix, then takes outcome 0 whenever possible,
/// recording every decision and its `P(0)`.
struct ForcedPath {
    prefix: Vec<u8>,
    decisions: Vec<(u8, f64)>,
}

impl MeasurementSource for ForcedPath {
    fn choose(&mut self, p_zero: f64) -> u8 {
        let i = self.decisions.len();
        let bit = match self.prefix.get(i) {
            Some(&b) => b,
            None => u8::from(p_zero < ZERO_PROBABILITY),
        };
        self.decisions.push((bit, p_zero));
        bit
    }
}

/// One complete measurement history of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRun<T> {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub value: T,
}

/// Runs `protocol` once per possible measurement history, with the default
/// [`Execution`]. Branches come back in lexicographic outcome order.
pub fn run_all_branches<T, F>(protocol: F) -> Result<Vec<BranchRun<T>>>
where
    T: Send,
    F: Fn(&mut dyn MeasurementSource) -> Result<T> + Sync + Send,
{
    run_all_branches_with(Execution::default(), protocol)
}

pub fn run_all_branches_with<T, F>(exec: Execution, protocol: F) -> Result<Vec<BranchRun<T>>>
where
    T: Send,
    F: Fn(&mut dyn MeasurementSource) -> Result<T> + Sync + Send,
{
    let mut branches = explore(exec, &protocol, Vec::new())?;
    branches.sort_by(|a, b| a.outcomes.cmp(&b.outcomes));
    Ok(branches)
}

fn explore<T, F>(exec: Execution, protocol: &F, prefix: Vec<u8>) -> Result<Vec<BranchRun<T>>>
where
    T: Send,
    F: Fn(&mut dyn MeasurementSource) -> Result<T> + Sync + Send,
{
    let fixed = prefix.len();
    let mut path = ForcedPath { prefix, decisions: Vec::new() };
    let value = protocol(&mut path)?;
    if path.decisions.len() > MAX_MEASUREMENTS {
        return Err(Error::TooManyMeasurements(MAX_MEASUREMENTS));
    }
    let outcomes: Vec<u8> = path.decisions.iter().map(|&(b, _)| b).collect();
    let probability = path
        .decisions
        .iter()
        .map(|&(b, p0)| if b == 0 { p0 } else { 1.0 - p0 })
        .product();

    // every later decision that took 0 but could have taken 1 opens a subtree
    let children: Vec<Vec<u8>> = (fixed..path.decisions.len())
        .filter(|&i| path.decisions[i].0 == 0 && 1.0 - path.decisions[i].1 >= ZERO_PROBABILITY)
        .map(|i| {
            let mut child = outcomes[..i].to_vec();
            child.push(1);
            child
        })
        .collect();

    let mut all = vec![BranchRun { outcomes, probability, value }];
    for sub in par::map(exec, &children, |c| explore(exec, protocol, c.clone())) {
        all.extend(sub?);
    }
    Ok(all)
}
