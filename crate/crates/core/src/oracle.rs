//! Brute-force density-matrix simulator used as ground truth for the analytic
//! Bell-diagonal maps.
//!
//! Conventions, fixed for every circuit in this module:
//!
//! * qubit `q` of an `n`-qubit state is tensor factor `q`, i.e. bit
//!   `n − 1 − q` of the computational basis index (qubit 0 is most
//!   significant);
//! * pair `k` occupies qubits `(2k, 2k + 1)`; the first qubit of a pair sits
//!   at location A (or the left end), the second at location B;
//! * gate matrices act on their listed qubits in order, the first listed
//!   qubit being the most significant factor of the gate.
//!
//! Purification uses bilateral CNOTs: qubit 0 → 2 at location A and
//! qubit 1 → 3 at location B.

use crate::bell::{BellDiagonal, BellState};
use crate::error::{check_unit, Error, Result};
use crate::noise::NoiseParams;
use crate::purification::Scheme;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

pub const MAX_QUBITS: usize = 6;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Maximum disagreement allowed between outcome-conditioned connection results.
pub const OUTCOME_AGREEMENT_TOLERANCE: f64 = 1e-9;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

pub mod gates {
    use super::*;

    pub fn identity2() -> Matrix2<C> {
        Matrix2::identity()
    }

    pub fn identity4() -> Matrix4<C> {
        Matrix4::identity()
    }

    pub fn pauli_x() -> Matrix2<C> {
        Matrix2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_z() -> Matrix2<C> {
        Matrix2::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn hadamard() -> Matrix2<C> {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        Matrix2::new(h, h, h, -h)
    }

    /// Rotation `exp(−iθX/2)` about the x axis.
    pub fn rx(theta: f64) -> Matrix2<C> {
        let c = C::new(libm::cos(theta / 2.0), 0.0);
        let s = C::new(0.0, -libm::sin(theta / 2.0));
        Matrix2::new(c, s, s, c)
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Matrix4<C> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(2, 3)] = ONE;
        m[(3, 2)] = ONE;
        m
    }

    pub fn kron2(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = a[(i / 2, j / 2)] * b[(i % 2, j % 2)];
            }
        }
        m
    }
}

/// Result branch of a single-qubit POVM.
#[derive(Debug, Clone)]
pub struct PovmOutcome {
    pub outcome: u8,
    pub probability: f64,
    /// Normalized state of the remaining qubits; `None` for a zero-probability
    /// branch.
    pub state: Option<DensityMatrix>,
}

/// Dense density operator on up to [`MAX_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: DMatrix<C>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(n_qubits: usize, rho: DMatrix<C>) -> Result<Self> {
        let dm = Self::unchecked(n_qubits, rho)?;
        dm.validate()?;
        Ok(dm)
    }

    fn unchecked(n_qubits: usize, rho: DMatrix<C>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{n_qubits} qubits exceeds the oracle limit of {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n_qubits;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::Consistency(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(DensityMatrix { n_qubits, rho })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_modulus(&(&self.rho - self.rho.adjoint()));
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::Consistency(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Consistency(format!("trace is {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -EIGENVALUE_TOLERANCE {
            return Err(Error::Consistency(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Computational basis state `|index⟩⟨index|`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(MAX_QUBITS + 1);
        if index >= dim {
            return Err(Error::QubitIndex { index, n_qubits });
        }
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(index, index)] = ONE;
        Self::unchecked(n_qubits, rho)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(MAX_QUBITS + 1);
        Self::unchecked(
            n_qubits,
            DMatrix::identity(dim, dim) * C::new(1.0 / dim as f64, 0.0),
        )
    }

    /// Two-qubit pure Bell state.
    pub fn bell_pair(state: BellState) -> Self {
        let v = bell_vector(state);
        let rho = DMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj());
        DensityMatrix { n_qubits: 2, rho }
    }

    /// Two-qubit state `Σ_k w_k |β_k⟩⟨β_k|`.
    pub fn from_bell_diagonal(s: &BellDiagonal) -> Self {
        let mut rho = DMatrix::zeros(4, 4);
        for state in BellState::ALL {
            rho += Self::bell_pair(state).rho * C::new(s.weight(state), 0.0);
        }
        DensityMatrix { n_qubits: 2, rho }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `self ⊗ other`; the qubits of `other` follow those of `self`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Self::unchecked(self.n_qubits + other.n_qubits, self.rho.kronecker(&other.rho))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_modulus(&(&self.rho - &other.rho))
    }

    /// Applies an ideal unitary `gate` on `qubits`.
    pub fn apply_unitary(&self, gate: &DMatrix<C>, qubits: &[usize]) -> Result<Self> {
        self.check_qubits(qubits)?;
        check_unitary(gate, qubits.len())?;
        let full = self.embed(gate, qubits);
        let rho = &full * &self.rho * full.adjoint();
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            rho,
        })
    }

    /// `tr_q{ρ} ⊗ I_q / 2^|q|`, with the identity on the traced slots.
    pub fn depolarize(&self, qubits: &[usize]) -> Result<Self> {
        self.check_qubits(qubits)?;
        let dim = self.dim();
        let k = qubits.len();
        let masks = self.masks(qubits);
        let scale = 1.0 / (1usize << k) as f64;
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if sub_index(i, &masks) != sub_index(j, &masks) {
                    continue;
                }
                let mut acc = ZERO;
                for t in 0..(1usize << k) {
                    acc += self.rho[(with_sub(i, &masks, t), with_sub(j, &masks, t))];
                }
                out[(i, j)] = acc * scale;
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            rho: out,
        })
    }

    /// Noisy one-qubit operation with reliability `p1`:
    /// `p1·UρU† + (1 − p1)/2 · tr_t{ρ} ⊗ I_t`.
    pub fn apply_noisy_one_qubit(&self, gate: &Matrix2<C>, target: usize, p1: f64) -> Result<Self> {
        let p1 = check_unit("p1", p1)?;
        let gate = DMatrix::from_fn(2, 2, |i, j| gate[(i, j)]);
        self.noisy(&gate, &[target], p1)
    }

    /// Noisy two-qubit operation with reliability `p2`:
    /// `p2·UρU† + (1 − p2)/4 · tr_ab{ρ} ⊗ I_ab`.
    pub fn apply_noisy_two_qubit(
        &self,
        gate: &Matrix4<C>,
        q_a: usize,
        q_b: usize,
        p2: f64,
    ) -> Result<Self> {
        let p2 = check_unit("p2", p2)?;
        if q_a == q_b {
            return Err(Error::DuplicateQubit(q_a));
        }
        let gate = DMatrix::from_fn(4, 4, |i, j| gate[(i, j)]);
        self.noisy(&gate, &[q_a, q_b], p2)
    }

    fn noisy(&self, gate: &DMatrix<C>, qubits: &[usize], p: f64) -> Result<Self> {
        let ideal = self.apply_unitary(gate, qubits)?;
        let mixed = self.depolarize(qubits)?;
        let rho = ideal.rho * C::new(p, 0.0) + mixed.rho * C::new(1.0 - p, 0.0);
        let out = DensityMatrix {
            n_qubits: self.n_qubits,
            rho,
        };
        out.validate()?;
        Ok(out)
    }

    /// Quality-`eta` measurement of `target` in the computational basis. The
    /// measured qubit is traced out of each branch.
    pub fn measure_povm(&self, target: usize, eta: f64) -> Result<Vec<PovmOutcome>> {
        let eta = check_unit("eta", eta)?;
        self.check_qubits(&[target])?;
        let n_rest = self.n_qubits - 1;
        let rest_dim = 1usize << n_rest;
        let bit = self.n_qubits - 1 - target;
        let insert = |x: usize, v: usize| {
            let high = (x >> bit) << (bit + 1);
            let low = x & ((1usize << bit) - 1);
            high | (v << bit) | low
        };
        let mut outcomes = Vec::with_capacity(2);
        for outcome in 0..2usize {
            let mut sigma = DMatrix::<C>::zeros(rest_dim, rest_dim);
            for v in 0..2usize {
                let w = if v == outcome { eta } else { 1.0 - eta };
                if w == 0.0 {
                    continue;
                }
                for i in 0..rest_dim {
                    for j in 0..rest_dim {
                        sigma[(i, j)] += self.rho[(insert(i, v), insert(j, v))] * w;
                    }
                }
            }
            let probability = sigma.trace().re.max(0.0);
            let state = if probability > 0.0 {
                let dm = Self::unchecked(n_rest, sigma / C::new(probability, 0.0))?;
                dm.validate()?;
                Some(dm)
            } else {
                None
            };
            outcomes.push(PovmOutcome {
                outcome: outcome as u8,
                probability,
                state,
            });
        }
        Ok(outcomes)
    }

    /// `⟨β|ρ|β⟩` for a two-qubit state.
    pub fn bell_weight(&self, state: BellState) -> Result<f64> {
        self.require_pair()?;
        let v = bell_vector(state);
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * self.rho[(i, j)] * v[j];
            }
        }
        Ok(acc.re)
    }

    /// Diagonal of a two-qubit state in the Bell basis.
    pub fn bell_components(&self) -> Result<BellDiagonal> {
        self.require_pair()?;
        let mut w = [0.0; 4];
        for state in BellState::ALL {
            w[state.index()] = self.bell_weight(state)?;
        }
        BellDiagonal::from_map_output(w)
    }

    /// Largest off-diagonal element of a two-qubit state in the Bell basis.
    pub fn bell_coherence(&self) -> Result<f64> {
        self.require_pair()?;
        let mut max: f64 = 0.0;
        for (x, sx) in BellState::ALL.iter().enumerate() {
            for sy in BellState::ALL.iter().skip(x + 1) {
                let (u, v) = (bell_vector(*sx), bell_vector(*sy));
                let mut acc = ZERO;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += u[i].conj() * self.rho[(i, j)] * v[j];
                    }
                }
                max = max.max(acc.norm());
            }
        }
        Ok(max)
    }

    fn require_pair(&self) -> Result<()> {
        if self.n_qubits != 2 {
            return Err(Error::Config(format!(
                "Bell-basis quantities need 2 qubits, state has {}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..k].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Bit masks of `qubits` in the basis index, in listed order.
    fn masks(&self, qubits: &[usize]) -> Vec<usize> {
        qubits.iter().map(|q| 1usize << (self.n_qubits - 1 - q)).collect()
    }

    fn embed(&self, gate: &DMatrix<C>, qubits: &[usize]) -> DMatrix<C> {
        let dim = self.dim();
        let masks = self.masks(qubits);
        let target_mask: usize = masks.iter().fold(0, |m, b| m | b);
        DMatrix::from_fn(dim, dim, |i, j| {
            if i & !target_mask == j & !target_mask {
                gate[(sub_index(i, &masks), sub_index(j, &masks))]
            } else {
                ZERO
            }
        })
    }
}

fn max_modulus(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sub_index(x: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0, |acc, m| (acc << 1) | usize::from(x & m != 0))
}

fn with_sub(x: usize, masks: &[usize], sub: usize) -> usize {
    let k = masks.len();
    masks.iter().enumerate().fold(x, |acc, (pos, m)| {
        if (sub >> (k - 1 - pos)) & 1 == 1 {
            acc | m
        } else {
            acc & !m
        }
    })
}

fn check_unitary(gate: &DMatrix<C>, n_qubits: usize) -> Result<()> {
    let dim = 1usize << n_qubits;
    if gate.nrows() != dim || gate.ncols() != dim {
        return Err(Error::Config(format!(
            "gate is {}x{}, expected {dim}x{dim}",
            gate.nrows(),
            gate.ncols()
        )));
    }
    let dev = max_modulus(&(gate * gate.adjoint() - DMatrix::<C>::identity(dim, dim)));
    if dev > UNITARY_TOLERANCE {
        return Err(Error::NonUnitary(dev));
    }
    Ok(())
}

fn bell_vector(state: BellState) -> [C; 4] {
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    match state {
        BellState::PhiPlus => [h, ZERO, ZERO, h],
        BellState::PhiMinus => [h, ZERO, ZERO, -h],
        BellState::PsiPlus => [ZERO, h, h, ZERO],
        BellState::PsiMinus => [ZERO, h, -h, ZERO],
    }
}

fn pair_product(s1: &BellDiagonal, s2: &BellDiagonal) -> Result<DensityMatrix> {
    DensityMatrix::from_bell_diagonal(s1).tensor(&DensityMatrix::from_bell_diagonal(s2))
}

/// One recurrence purification step simulated on the full four-qubit state.
///
/// Scheme A twirls both inputs and the output and applies plain bilateral
/// CNOTs. Scheme B folds a `±π/2` x-rotation of both local qubits into each
/// noisy two-qubit gate (`+` at A, `−` at B). Qubits 2 and 3 are measured and
/// the branch with coincident readouts is kept. Returns the kept pair and the
/// coincidence probability.
pub fn oracle_purification_step(
    s1: &BellDiagonal,
    s2: &BellDiagonal,
    scheme: Scheme,
    noise: &NoiseParams,
) -> Result<(BellDiagonal, f64)> {
    let (s1, s2, gate_a, gate_b) = match scheme {
        Scheme::A => (s1.twirl(), s2.twirl(), gates::cnot(), gates::cnot()),
        Scheme::B => {
            let plus = gates::rx(core::f64::consts::FRAC_PI_2);
            let minus = gates::rx(-core::f64::consts::FRAC_PI_2);
            (
                *s1,
                *s2,
                gates::cnot() * gates::kron2(&plus, &plus),
                gates::cnot() * gates::kron2(&minus, &minus),
            )
        }
        Scheme::C => return Err(Error::InvalidScheme('C')),
    };
    let rho = pair_product(&s1, &s2)?
        .apply_noisy_two_qubit(&gate_a, 0, 2, noise.p2())?
        .apply_noisy_two_qubit(&gate_b, 1, 3, noise.p2())?;

    let mut kept = DMatrix::<C>::zeros(4, 4);
    let mut p_even = 0.0;
    for first in rho.measure_povm(2, noise.eta())? {
        let Some(rest) = first.state else { continue };
        // qubit 3 is now index 2
        for second in rest.measure_povm(2, noise.eta())? {
            let Some(pair) = second.state else { continue };
            if first.outcome == second.outcome {
                let p = first.probability * second.probability;
                kept += pair.rho * C::new(p, 0.0);
                p_even += p;
            }
        }
    }
    if !(p_even > 0.0) {
        return Err(Error::Consistency(format!("coincidence probability {p_even}")));
    }
    let out = DensityMatrix::from_matrix(2, kept / C::new(p_even, 0.0))?.bell_components()?;
    let out = match scheme {
        Scheme::A => out.twirl(),
        _ => out,
    };
    Ok((out, p_even))
}

/// Entanglement swapping simulated on the full four-qubit state.
///
/// Pairs `(0,1)` and `(2,3)` are joined by a noisy Bell measurement on
/// qubits 1 and 2 (noisy CNOT 1 → 2, then qubit 1 read in the X basis and
/// qubit 2 in the Z basis, both with quality `eta`). The outcome-dependent
/// Pauli correction on qubit 3 is a noisy one-qubit operation with `p1`.
/// Every outcome-conditioned result must agree; the weighted average is
/// returned.
pub fn oracle_connection(
    s1: &BellDiagonal,
    s2: &BellDiagonal,
    noise: &NoiseParams,
) -> Result<BellDiagonal> {
    let h = DMatrix::from_fn(2, 2, |i, j| gates::hadamard()[(i, j)]);
    let rho = pair_product(s1, s2)?
        .apply_noisy_two_qubit(&gates::cnot(), 1, 2, noise.p2())?
        .apply_unitary(&h, &[1])?;

    let mut branches: Vec<(f64, BellDiagonal)> = Vec::with_capacity(4);
    for phase in rho.measure_povm(1, noise.eta())? {
        let Some(rest) = phase.state else { continue };
        // remaining qubits (0, 2, 3) → (0, 1, 2)
        for parity in rest.measure_povm(1, noise.eta())? {
            let Some(pair) = parity.state else { continue };
            let p = phase.probability * parity.probability;
            if p == 0.0 {
                continue;
            }
            let mut correction = gates::identity2();
            if parity.outcome == 1 {
                correction = gates::pauli_x() * correction;
            }
            if phase.outcome == 1 {
                correction = gates::pauli_z() * correction;
            }
            let corrected = pair.apply_noisy_one_qubit(&correction, 1, noise.p1())?;
            branches.push((p, corrected.bell_components()?));
        }
    }

    let (_, reference) = branches
        .first()
        .copied()
        .ok_or_else(|| Error::Consistency("no measurement branch survived".into()))?;
    let mut avg = [0.0; 4];
    let mut total = 0.0;
    for (p, s) in &branches {
        let diff = s.max_abs_diff(&reference);
        if diff > OUTCOME_AGREEMENT_TOLERANCE {
            return Err(Error::Consistency(format!(
                "outcome-conditioned connection results differ by {diff:e}"
            )));
        }
        for (a, x) in avg.iter_mut().zip(s.components()) {
            *a += p * x;
        }
        total += p;
    }
    BellDiagonal::from_weights(avg, total)
}
