//! Stochastic error model for local operations and measurements.
//!
//! A noisy gate is the ideal gate followed by depolarization of the qubits it
//! acts on, weighted by its reliability. One-qubit operations carry `p1`,
//! two-qubit operations `p2`, and single-qubit measurements are POVMs of
//! quality `eta`.

use crate::error::{check_unit, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    p1: f64,
    p2: f64,
    eta: f64,
}

impl NoiseParams {
    pub const PERFECT: NoiseParams = NoiseParams {
        p1: 1.0,
        p2: 1.0,
        eta: 1.0,
    };

    pub fn new(p1: f64, p2: f64, eta: f64) -> Result<Self> {
        Ok(NoiseParams {
            p1: check_unit("p1", p1)?,
            p2: check_unit("p2", p2)?,
            eta: check_unit("eta", eta)?,
        })
    }

    pub fn perfect() -> Self {
        Self::PERFECT
    }

    /// Equal error probability `x` on every operation: `p1 = p2 = eta = 1 − x`.
    pub fn uniform_error(x: f64) -> Result<Self> {
        let p = 1.0 - check_unit("error", x)?;
        Self::new(p, p, p)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Probabilities that two POVM readouts agree given the true bits agree
    /// (`even`), and given they differ (`odd`).
    pub fn coincidence_weights(&self) -> (f64, f64) {
        let eta = self.eta;
        let both_right_or_wrong = eta * eta + (1.0 - eta) * (1.0 - eta);
        (both_right_or_wrong, 2.0 * eta * (1.0 - eta))
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::PERFECT
    }
}

/// Reliability of two local operations performed as one joint operation.
pub fn compose_reliability(pa: f64, pb: f64) -> Result<f64> {
    Ok(check_unit("reliability", pa)? * check_unit("reliability", pb)?)
}

/// Outcome probabilities `(P(0), P(1))` of a quality-`eta` measurement on a
/// qubit whose |0⟩ population is `p0`.
pub fn povm_probabilities(p0: f64, eta: f64) -> Result<(f64, f64)> {
    let p0 = check_unit("p0", p0)?;
    let eta = check_unit("eta", eta)?;
    let zero = eta * p0 + (1.0 - eta) * (1.0 - p0);
    // P(1) = eta(1 − p0) + (1 − eta)p0, written as the complement so the pair
    // sums to one in floating point as well.
    Ok((zero, 1.0 - zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn composition_examples() {
        assert_eq!(compose_reliability(1.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            compose_reliability(0.995, 0.995).unwrap(),
            0.990025,
            epsilon = 1e-15
        );
        assert_eq!(compose_reliability(0.97, 0.0).unwrap(), 0.0);
        assert!(compose_reliability(1.1, 0.5).is_err());
    }

    #[test]
    fn povm_examples() {
        let (z, o) = povm_probabilities(1.0, 0.9).unwrap();
        assert_abs_diff_eq!(z, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(o, 0.1, epsilon = 1e-15);
        assert_eq!(povm_probabilities(0.5, 0.73).unwrap(), (0.5, 0.5));
        assert_eq!(povm_probabilities(0.0, 1.0).unwrap(), (0.0, 1.0));
        assert!(povm_probabilities(0.5, -0.1).is_err());
    }

    #[test]
    fn params_validation() {
        assert_eq!(NoiseParams::perfect(), NoiseParams::new(1.0, 1.0, 1.0).unwrap());
        assert!(NoiseParams::new(1.0, 1.01, 1.0).is_err());
        let n = NoiseParams::uniform_error(0.005).unwrap();
        assert_eq!((n.p1(), n.p2(), n.eta()), (0.995, 0.995, 0.995));
    }

    proptest! {
        #[test]
        fn povm_sums_to_one(p0 in 0.0f64..=1.0, eta in 0.0f64..=1.0) {
            let (z, o) = povm_probabilities(p0, eta).unwrap();
            prop_assert_eq!(z + o, 1.0);
            prop_assert!(z >= 0.0 && o >= 0.0);
        }

        #[test]
        fn composition_laws(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let ab = compose_reliability(a, b).unwrap();
            prop_assert_eq!(ab, compose_reliability(b, a).unwrap());
            let left = compose_reliability(ab, c).unwrap();
            let right = compose_reliability(a, compose_reliability(b, c).unwrap()).unwrap();
            prop_assert!((left - right).abs() <= 1e-15);
            prop_assert_eq!(compose_reliability(a, 1.0).unwrap(), a);
            prop_assert_eq!(compose_reliability(a, 0.0).unwrap(), 0.0);
        }
    }
}
