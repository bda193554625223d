//! Seeded test-state generators shared by tests, the CLI and benches.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::statevec::{Amplitude, StateVector};

/// Coefficients `(α, β)` of a single qubit `α|0⟩ + β|1⟩`.
pub type Coefficients = (Amplitude, Amplitude);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random qubit coefficients with a random overall phase.
pub fn random_coefficients<R: Rng + ?Sized>(rng: &mut R) -> Coefficients {
    let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
    let half = cos_theta.acos() / 2.0;
    let global: f64 = rng.gen_range(0.0..2.0 * PI);
    let relative: f64 = rng.gen_range(0.0..2.0 * PI);
    (
        Complex64::from_polar(half.cos(), global),
        Complex64::from_polar(half.sin(), global + relative),
    )
}

/// `⊗ₖ (αₖ|0⟩ + βₖ|1⟩)`, first entry on qubit 1.
pub fn product_state(factors: &[Coefficients]) -> StateVector {
    let mut iter = factors.iter();
    let (a, b) = iter.next().expect("at least one factor");
    let mut state = StateVector::qubit(*a, *b).expect("normalized coefficients");
    for (a, b) in iter {
        let q = StateVector::qubit(*a, *b).expect("normalized coefficients");
        state = state.tensor(&q).expect("within qubit budget");
    }
    state
}

pub fn random_product<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> (Vec<Coefficients>, StateVector) {
    let factors: Vec<Coefficients> = (0..n_qubits).map(|_| random_coefficients(rng)).collect();
    let state = product_state(&factors);
    (factors, state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] =
        [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn state(self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            BellState::PhiPlus => [h, 0.0, 0.0, h],
            BellState::PhiMinus => [h, 0.0, 0.0, -h],
            BellState::PsiPlus => [0.0, h, h, 0.0],
            BellState::PsiMinus => [0.0, h, -h, 0.0],
        };
        StateVector::from_amplitudes(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .expect("Bell states are normalized")
    }
}
