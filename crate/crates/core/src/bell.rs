//! Two-qubit states diagonal in the Bell basis.
//!
//! A Bell-diagonal state is stored as four probabilities in the order
//! `(a, b, c, d)` = weights of `(Φ+, Ψ−, Ψ+, Φ−)`. The fidelity with the
//! target pair Φ+ is `a`.
//!
//! Every Bell state is `(P ⊗ I)|Φ+⟩` for a Pauli `P`, which gives each state a
//! two-bit label `(phase, parity)`: Φ+ = (0,0), Φ− = (1,0), Ψ+ = (0,1),
//! Ψ− = (1,1). The purification and connection maps are sums over products of
//! components indexed by XOR combinations of these labels.

use crate::error::{check_unit, Error, Result};
use alloc::format;

/// Tolerance below zero that is treated as rounding and clamped.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the component sum from 1 on construction.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Allowed drift of the component sum after a map before renormalization is
/// refused.
pub const MAP_DRIFT_TOLERANCE: f64 = 1e-9;

/// Bell basis element, in component order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PsiMinus,
    PsiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiMinus,
    ];

    /// Position of this state in `BellDiagonal::components`.
    pub fn index(self) -> usize {
        match self {
            BellState::PhiPlus => 0,
            BellState::PsiMinus => 1,
            BellState::PsiPlus => 2,
            BellState::PhiMinus => 3,
        }
    }

    /// `(phase, parity)` bits of the Pauli frame relative to Φ+.
    pub fn label(self) -> (u8, u8) {
        match self {
            BellState::PhiPlus => (0, 0),
            BellState::PhiMinus => (1, 0),
            BellState::PsiPlus => (0, 1),
            BellState::PsiMinus => (1, 1),
        }
    }

    pub fn from_label(phase: u8, parity: u8) -> BellState {
        match (phase & 1, parity & 1) {
            (0, 0) => BellState::PhiPlus,
            (1, 0) => BellState::PhiMinus,
            (0, 1) => BellState::PsiPlus,
            _ => BellState::PsiMinus,
        }
    }
}

/// A two-qubit state diagonal in the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonal {
    components: [f64; 4],
}

impl BellDiagonal {
    /// The pure pair Φ+.
    pub const PHI_PLUS: BellDiagonal = BellDiagonal {
        components: [1.0, 0.0, 0.0, 0.0],
    };

    /// The maximally mixed two-qubit state.
    pub const MIXED: BellDiagonal = BellDiagonal {
        components: [0.25; 4],
    };

    /// Builds a state from `(Φ+, Ψ−, Ψ+, Φ−)` weights.
    ///
    /// Negative weights within [`NEGATIVE_TOLERANCE`] are clamped to zero; the
    /// weights must sum to one within [`SUM_TOLERANCE`].
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let components = clamp_negatives([a, b, c, d])?;
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Consistency(format!(
                "Bell-diagonal weights sum to {sum}, expected 1"
            )));
        }
        Ok(BellDiagonal { components })
    }

    /// Accepts the output of a trace-preserving map, renormalizing small drift.
    pub(crate) fn from_map_output(raw: [f64; 4]) -> Result<Self> {
        let components = clamp_negatives(raw)?;
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > MAP_DRIFT_TOLERANCE {
            return Err(Error::Consistency(format!(
                "map output sums to {sum}; drift beyond {MAP_DRIFT_TOLERANCE:e}"
            )));
        }
        Ok(BellDiagonal {
            components: components.map(|x| x / sum),
        })
    }

    /// Normalizes an unnormalized (post-selected) weight vector by `norm`.
    pub(crate) fn from_weights(raw: [f64; 4], norm: f64) -> Result<Self> {
        if !(norm > 0.0) {
            return Err(Error::Consistency(format!(
                "post-selection probability {norm} is not positive"
            )));
        }
        Self::from_map_output(raw.map(|x| x / norm))
    }

    /// Werner state `(F, (1−F)/3, (1−F)/3, (1−F)/3)`.
    pub fn werner(fidelity: f64) -> Result<Self> {
        let f = check_unit("fidelity", fidelity)?;
        let rest = (1.0 - f) / 3.0;
        Ok(BellDiagonal {
            components: [f, rest, rest, rest],
        })
    }

    /// Shape family with fixed fidelity `F0`:
    /// `(F0, (1−F0)(1−ε)/2, (1−F0)(1−ε)/2, (1−F0)ε)`.
    ///
    /// `ε = 1/3` is the Werner state, `ε = 1` the binary (Φ+, Φ−) state.
    pub fn epsilon(fidelity: f64, eps: f64) -> Result<Self> {
        let f = check_unit("fidelity", fidelity)?;
        let eps = check_unit("eps", eps)?;
        let off = 1.0 - f;
        let side = off * (1.0 - eps) / 2.0;
        Ok(BellDiagonal {
            components: [f, side, side, off * eps],
        })
    }

    /// Depolarizes to the Werner state of equal fidelity. Noiseless.
    pub fn twirl(&self) -> Self {
        let f = self.components[0];
        let rest = (1.0 - f) / 3.0;
        BellDiagonal {
            components: [f, rest, rest, rest],
        }
    }

    pub fn fidelity(&self) -> f64 {
        self.components[0]
    }

    pub fn components(&self) -> [f64; 4] {
        self.components
    }

    pub fn weight(&self, state: BellState) -> f64 {
        self.components[state.index()]
    }

    pub fn a(&self) -> f64 {
        self.components[0]
    }

    pub fn b(&self) -> f64 {
        self.components[1]
    }

    pub fn c(&self) -> f64 {
        self.components[2]
    }

    pub fn d(&self) -> f64 {
        self.components[3]
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &BellDiagonal) -> f64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

fn clamp_negatives(mut v: [f64; 4]) -> Result<[f64; 4]> {
    for x in v.iter_mut() {
        if !x.is_finite() {
            return Err(Error::Consistency(format!("non-finite Bell weight {x}")));
        }
        if *x < 0.0 {
            if *x < -NEGATIVE_TOLERANCE {
                return Err(Error::Consistency(format!("negative Bell weight {x}")));
            }
            *x = 0.0;
        }
    }
    Ok(v)
}
