//! Entanglement swapping of adjacent pairs.
//!
//! In `(phase, parity)` labels a perfect Bell measurement composes two pairs
//! by XOR of their labels. A wrong readout of the X-basis qubit flips the
//! phase bit of the result, a wrong Z-basis readout flips its parity bit.
//! The noisy CNOT and the noisy correction together depolarize the result
//! with weight `1 − p1·p2`.

use crate::bell::{BellDiagonal, BellState};
use crate::error::{check_unit, Error, Result};
use crate::noise::NoiseParams;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ConnectionStrategy {
    /// Left to right, `N − 1` rounds.
    #[default]
    Sequential,
    /// Adjacent pairs simultaneously, `⌈log2 N⌉` rounds.
    Parallel,
}

fn xor_convolve(s1: &[f64; 4], s2: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for x in BellState::ALL {
        let (ph1, pa1) = x.label();
        for y in BellState::ALL {
            let (ph2, pa2) = y.label();
            out[BellState::from_label(ph1 ^ ph2, pa1 ^ pa2).index()] += s1[x.index()] * s2[y.index()];
        }
    }
    out
}

/// Connects the pairs `s1` (left) and `s2` (right).
pub fn connect_pair(s1: &BellDiagonal, s2: &BellDiagonal, noise: &NoiseParams) -> Result<BellDiagonal> {
    let eta = noise.eta();
    let right = eta * eta;
    let one_wrong = eta * (1.0 - eta);
    let mut readout = [0.0; 4];
    readout[BellState::PhiPlus.index()] = right;
    readout[BellState::PhiMinus.index()] = one_wrong;
    readout[BellState::PsiPlus.index()] = one_wrong;
    readout[BellState::PsiMinus.index()] = (1.0 - eta) * (1.0 - eta);

    let ideal = xor_convolve(&xor_convolve(&s1.components(), &s2.components()), &readout);
    let q = noise.p1() * noise.p2();
    BellDiagonal::from_map_output(ideal.map(|x| q * x + (1.0 - q) / 4.0))
}

/// Fidelity of `n_pairs` Werner pairs of fidelity `f` connected into one.
pub fn connect_chain_werner(f: f64, n_pairs: usize, noise: &NoiseParams) -> Result<f64> {
    let f = check_unit("fidelity", f)?;
    if n_pairs == 0 {
        return Err(Error::Config("a chain needs at least one pair".into()));
    }
    let eta = noise.eta();
    let links = (n_pairs - 1) as f64;
    let gates = libm::pow(noise.p1() * noise.p2(), links);
    let readout = libm::pow((4.0 * eta * eta - 1.0) / 3.0, links);
    let pairs = libm::pow((4.0 * f - 1.0) / 3.0, n_pairs as f64);
    Ok(0.25 * (1.0 + 3.0 * gates * readout * pairs))
}

/// Connects an ordered chain of pairs into one. Returns the final pair and
/// the number of connection rounds.
pub fn connect_chain(
    states: &[BellDiagonal],
    strategy: ConnectionStrategy,
    noise: &NoiseParams,
) -> Result<(BellDiagonal, usize)> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::Config("cannot connect an empty chain".into()))?;
    match strategy {
        ConnectionStrategy::Sequential => {
            let mut acc = *first;
            for s in rest {
                acc = connect_pair(&acc, s, noise)?;
            }
            Ok((acc, rest.len()))
        }
        ConnectionStrategy::Parallel => {
            let mut layer: Vec<BellDiagonal> = states.to_vec();
            let mut rounds = 0;
            while layer.len() > 1 {
                let mut next = Vec::with_capacity(layer.len().div_ceil(2));
                for chunk in layer.chunks(2) {
                    match chunk {
                        [l, r] => next.push(connect_pair(l, r, noise)?),
                        [single] => next.push(*single),
                        _ => unreachable!(),
                    }
                }
                layer = next;
                rounds += 1;
            }
            Ok((layer[0], rounds))
        }
    }
}
