//! Recurrence purification: one-step maps, fixpoints and resource counts.
//!
//! Scheme A works on Werner states and twirls before and after every step.
//! Scheme B rotates both pairs before the bilateral CNOTs and keeps the full
//! Bell-diagonal vector. Scheme C is scheme B with the second pair replaced by
//! a fixed auxiliary state.
//!
//! Noisy two-qubit gates enter through `q = p2²`: whenever either bilateral
//! gate depolarizes, the four measured and kept qubits end up maximally mixed,
//! so each unnormalized output weight is `q·ideal + (1 − q)/8`.

use crate::bell::BellDiagonal;
use crate::error::{check_unit, Error, Result};
use crate::noise::NoiseParams;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Convergence tolerance of fixpoint iteration, max-norm on the 4-vector.
pub const FIXPOINT_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;
/// A discriminant this close to zero is treated as zero.
pub const DISCRIMINANT_TOLERANCE: f64 = 1e-12;
/// Step cap when counting purification steps towards a target.
pub const MAX_STEPS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    A,
    B,
    C,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::A, Scheme::B, Scheme::C];

    pub fn as_char(self) -> char {
        match self {
            Scheme::A => 'A',
            Scheme::B => 'B',
            Scheme::C => 'C',
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Scheme::A),
            "B" | "b" => Ok(Scheme::B),
            "C" | "c" => Ok(Scheme::C),
            other => Err(Error::InvalidScheme(other.chars().next().unwrap_or('?'))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointReport {
    pub f_trivial: f64,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub purification_possible: bool,
}

impl FixpointReport {
    fn none() -> Self {
        FixpointReport {
            f_trivial: 0.25,
            f_min: None,
            f_max: None,
            purification_possible: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport {
    pub k_max: usize,
    /// Expected number of pairs consumed.
    pub m: f64,
    /// Expected number of steps including failed ones; scheme C only.
    pub s: Option<f64>,
    /// Success probability of each successful step, in order.
    pub p_even: Vec<f64>,
    pub final_state: BellDiagonal,
}

impl ResourceReport {
    /// Pairs consumed if every step succeeded.
    pub fn m_floor(&self) -> f64 {
        if self.s.is_some() {
            (self.k_max + 1) as f64
        } else {
            libm::pow(2.0, self.k_max as f64)
        }
    }
}

/// Scheme A on Werner pairs of fidelity `f`. Returns the fidelity of the
/// re-twirled output and the coincidence probability.
pub fn scheme_a_step(f: f64, noise: &NoiseParams) -> Result<(f64, f64)> {
    let f = check_unit("fidelity", f)?;
    let (even, odd) = noise.coincidence_weights();
    let x = (1.0 - f) / 3.0;
    let num = even * (f * f + x * x) + odd * (f * x + x * x);
    let zero_parity = f + x;
    let den = even * (zero_parity * zero_parity + 4.0 * x * x) + odd * 4.0 * x * zero_parity;
    let q = noise.p2() * noise.p2();
    let p_even = q * den + (1.0 - q) / 2.0;
    if !(p_even > 0.0) {
        return Err(Error::Consistency(alloc::format!(
            "scheme A coincidence probability {p_even}"
        )));
    }
    let f_prime = (q * num + (1.0 - q) / 8.0) / p_even;
    Ok((f_prime, p_even))
}

/// Rotated bilateral step on `(s1, s2)`; `s2` is the measured pair.
fn rotated_step(s1: &BellDiagonal, s2: &BellDiagonal, noise: &NoiseParams) -> Result<(BellDiagonal, f64)> {
    let [a1, b1, c1, d1] = s1.components();
    let [a2, b2, c2, d2] = s2.components();
    let (e, o) = noise.coincidence_weights();
    let ideal = [
        e * (a1 * a2 + b1 * b2) + o * (a1 * c2 + b1 * d2),
        e * (c1 * d2 + d1 * c2) + o * (c1 * b2 + d1 * a2),
        e * (c1 * c2 + d1 * d2) + o * (c1 * a2 + d1 * b2),
        e * (a1 * b2 + b1 * a2) + o * (a1 * d2 + b1 * c2),
    ];
    let q = noise.p2() * noise.p2();
    let raw = ideal.map(|x| q * x + (1.0 - q) / 8.0);
    let p: f64 = raw.iter().sum();
    Ok((BellDiagonal::from_weights(raw, p)?, p))
}

/// Scheme B on two copies of `s`.
pub fn scheme_b_step(s: &BellDiagonal, noise: &NoiseParams) -> Result<(BellDiagonal, f64)> {
    rotated_step(s, s, noise)
}

/// Scheme C: purifies `target` with the fixed auxiliary pair `aux`.
pub fn scheme_c_step(
    target: &BellDiagonal,
    aux: &BellDiagonal,
    noise: &NoiseParams,
) -> Result<(BellDiagonal, f64)> {
    rotated_step(target, aux, noise)
}

/// Closed-form fixpoints of scheme A.
pub fn scheme_a_fixpoints(noise: &NoiseParams) -> FixpointReport {
    let eta = noise.eta();
    let p2sq = noise.p2() * noise.p2();
    let denom = 16.0 * eta * (eta - 1.0) + 4.0;
    if p2sq == 0.0 || denom.abs() < DISCRIMINANT_TOLERANCE {
        return FixpointReport::none();
    }
    let mut disc = 10.0 - 9.0 / p2sq + 64.0 * libm::pow(eta, 4.0) - 128.0 * libm::pow(eta, 3.0)
        + 116.0 * eta * eta
        - 52.0 * eta
        - 36.0 * eta * (eta - 1.0) / p2sq;
    if disc.abs() <= DISCRIMINANT_TOLERANCE {
        disc = 0.0;
    }
    if disc < 0.0 {
        return FixpointReport::none();
    }
    let root = libm::sqrt(disc);
    let base = 8.0 * eta * (eta - 1.0) + 3.0;
    FixpointReport {
        f_trivial: 0.25,
        f_min: Some((base - root) / denom),
        f_max: Some((base + root) / denom),
        purification_possible: disc > 0.0,
    }
}

fn step(
    scheme: Scheme,
    s: &BellDiagonal,
    aux: Option<&BellDiagonal>,
    noise: &NoiseParams,
) -> Result<(BellDiagonal, f64)> {
    match scheme {
        Scheme::A => {
            let (f, p) = scheme_a_step(s.fidelity(), noise)?;
            Ok((BellDiagonal::werner(f.clamp(0.0, 1.0))?, p))
        }
        Scheme::B => scheme_b_step(s, noise),
        Scheme::C => scheme_c_step(s, aux.ok_or(Error::InvalidScheme('C'))?, noise),
    }
}

fn check_aux(scheme: Scheme, aux: Option<&BellDiagonal>) -> Result<()> {
    match (scheme, aux) {
        (Scheme::C, None) => Err(Error::Config("scheme C needs an auxiliary pair".into())),
        (Scheme::A | Scheme::B, Some(_)) => Err(Error::Config(alloc::format!(
            "scheme {scheme} takes no auxiliary pair"
        ))),
        _ => Ok(()),
    }
}

/// Iterates a scheme's step map until the state moves by less than
/// [`FIXPOINT_TOLERANCE`]. Returns the attractor and the number of steps.
pub fn iterate_to_fixpoint(
    scheme: Scheme,
    start: &BellDiagonal,
    aux: Option<&BellDiagonal>,
    noise: &NoiseParams,
) -> Result<(BellDiagonal, usize)> {
    check_aux(scheme, aux)?;
    let mut s = match scheme {
        Scheme::A => start.twirl(),
        _ => *start,
    };
    for k in 1..=MAX_ITERATIONS {
        let (next, _) = step(scheme, &s, aux, noise)?;
        let moved = next.max_abs_diff(&s);
        s = next;
        if moved < FIXPOINT_TOLERANCE {
            return Ok((s, k));
        }
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

/// Fixpoints of scheme B. `f_max` is the attractor reached from Φ+; `f_min`
/// is the smallest Werner fidelity that still flows to it, found by
/// bisection.
pub fn scheme_b_fixpoints(noise: &NoiseParams) -> Result<FixpointReport> {
    let (top, _) = iterate_to_fixpoint(Scheme::B, &BellDiagonal::PHI_PLUS, None, noise)?;
    let f_max = top.fidelity();
    if f_max <= 0.25 + 1e-6 {
        return Ok(FixpointReport::none());
    }
    let flows_up = |f: f64| -> Result<bool> {
        let mut s = BellDiagonal::werner(f)?;
        for _ in 0..MAX_ITERATIONS {
            let (next, _) = scheme_b_step(&s, noise)?;
            if next.max_abs_diff(&s) < FIXPOINT_TOLERANCE {
                return Ok(next.max_abs_diff(&top) < 1e-6);
            }
            s = next;
        }
        Err(Error::NoConvergence(MAX_ITERATIONS))
    };
    let (mut lo, mut hi) = (0.25, f_max);
    if !flows_up(hi)? {
        return Ok(FixpointReport::none());
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if flows_up(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(FixpointReport {
        f_trivial: 0.25,
        f_min: Some(hi),
        f_max: Some(f_max),
        purification_possible: hi < f_max,
    })
}

/// Reachable scheme C fixpoint when purifying copies of `aux` with `aux`.
pub fn scheme_c_fixpoint(aux: &BellDiagonal, noise: &NoiseParams) -> Result<BellDiagonal> {
    iterate_to_fixpoint(Scheme::C, aux, Some(aux), noise).map(|(s, _)| s)
}

/// Steps and expected pair consumption to lift `start` to `f_target` with
/// scheme A or B; each step consumes two pairs on average `2/p_even` times.
pub fn resources_ab(
    scheme: Scheme,
    start: &BellDiagonal,
    f_target: f64,
    noise: &NoiseParams,
) -> Result<ResourceReport> {
    if scheme == Scheme::C {
        return Err(Error::InvalidScheme('C'));
    }
    let mut s = match scheme {
        Scheme::A => start.twirl(),
        _ => *start,
    };
    let trajectory = climb(scheme, &mut s, None, f_target, noise)?;
    let m = trajectory.iter().map(|p| 2.0 / p).product();
    Ok(ResourceReport {
        k_max: trajectory.len(),
        m,
        s: None,
        p_even: trajectory,
        final_state: s,
    })
}

/// Scheme C resources. The target starts as one copy of `aux`; a failed
/// step discards the target, so `M_k = (M_{k−1} + 1)/p_k` with `M_0 = 1` and
/// `S_k = (S_{k−1} + 1)/p_k` with `S_0 = 0`.
pub fn resources_c(aux: &BellDiagonal, f_target: f64, noise: &NoiseParams) -> Result<ResourceReport> {
    let mut s = *aux;
    let trajectory = climb(Scheme::C, &mut s, Some(aux), f_target, noise)?;
    let (mut m, mut steps) = (1.0, 0.0);
    for p in &trajectory {
        m = (m + 1.0) / p;
        steps = (steps + 1.0) / p;
    }
    Ok(ResourceReport {
        k_max: trajectory.len(),
        m,
        s: Some(steps),
        p_even: trajectory,
        final_state: s,
    })
}

/// Applies steps until the fidelity reaches `f_target`, returning the
/// per-step success probabilities. Fails once the fidelity stops rising.
fn climb(
    scheme: Scheme,
    s: &mut BellDiagonal,
    aux: Option<&BellDiagonal>,
    f_target: f64,
    noise: &NoiseParams,
) -> Result<Vec<f64>> {
    let f_target = check_unit("target fidelity", f_target)?;
    let start = s.fidelity();
    let mut probabilities = Vec::new();
    while s.fidelity() < f_target {
        let (next, p) = step(scheme, s, aux, noise)?;
        if next.fidelity() <= s.fidelity() + FIXPOINT_TOLERANCE || probabilities.len() >= MAX_STEPS {
            return Err(Error::Unreachable {
                start,
                target: f_target,
            });
        }
        *s = next;
        probabilities.push(p);
    }
    Ok(probabilities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_purification_step;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn noise(p2: f64, eta: f64) -> NoiseParams {
        NoiseParams::new(1.0, p2, eta).unwrap()
    }

    fn bennett(f: f64) -> f64 {
        let x = 1.0 - f;
        (f * f + (x / 3.0) * (x / 3.0)) / (f * f + 2.0 / 3.0 * f * x + 5.0 / 9.0 * x * x)
    }

    #[test]
    fn scheme_a_examples() {
        let (f, p) = scheme_a_step(0.7, &NoiseParams::perfect()).unwrap();
        assert_abs_diff_eq!(f, 0.735_294_117_647_058_8, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.68, epsilon = 1e-15);
        assert_abs_diff_eq!(f, bennett(0.7), epsilon = 1e-15);

        for n in [noise(0.9, 0.93), noise(0.5, 0.5), NoiseParams::perfect()] {
            assert_abs_diff_eq!(scheme_a_step(0.25, &n).unwrap().0, 0.25, epsilon = 1e-15);
        }

        let (f, p) = scheme_a_step(0.9, &noise(0.97, 1.0)).unwrap();
        assert_abs_diff_eq!(f, 0.902_973_8, epsilon = 5e-8);
        assert_abs_diff_eq!(p, 0.853_360_2, epsilon = 5e-8);
        assert!(scheme_a_step(1.5, &NoiseParams::perfect()).is_err());
    }

    #[test]
    fn scheme_a_fixpoint_examples() {
        let r = scheme_a_fixpoints(&NoiseParams::perfect());
        assert_eq!((r.f_min, r.f_max), (Some(0.5), Some(1.0)));
        assert!(r.purification_possible);

        let r = scheme_a_fixpoints(&noise(libm::sqrt(0.9), 1.0));
        assert_abs_diff_eq!(r.f_min.unwrap(), 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(r.f_max.unwrap(), 0.75, epsilon = 1e-9);
        assert!(!r.purification_possible);

        let n = noise(0.97, 1.0);
        let r = scheme_a_fixpoints(&n);
        let (lo, hi) = (r.f_min.unwrap(), r.f_max.unwrap());
        assert_abs_diff_eq!(lo, 0.585_172_4, epsilon = 5e-8);
        assert_abs_diff_eq!(hi, 0.914_827_6, epsilon = 5e-8);
        assert_abs_diff_eq!(scheme_a_step(lo, &n).unwrap().0, lo, epsilon = 1e-9);
        assert_abs_diff_eq!(scheme_a_step(hi, &n).unwrap().0, hi, epsilon = 1e-9);

        let r = scheme_a_fixpoints(&noise(0.94, 1.0));
        assert_eq!(r.f_min, None);
        assert!(!r.purification_possible);
        assert!(!scheme_a_fixpoints(&noise(0.99, 0.5)).purification_possible);
    }

    #[test]
    fn scheme_a_matches_oracle() {
        for &(f, p2, eta) in &[(0.7, 1.0, 1.0), (0.9, 0.97, 1.0), (0.6, 0.92, 0.95), (0.85, 0.99, 0.9)] {
            let n = noise(p2, eta);
            let w = BellDiagonal::werner(f).unwrap();
            let (s, p) = oracle_purification_step(&w, &w, Scheme::A, &n).unwrap();
            let (fa, pa) = scheme_a_step(f, &n).unwrap();
            assert_abs_diff_eq!(s.fidelity(), fa, epsilon = 1e-10);
            assert_abs_diff_eq!(p, pa, epsilon = 1e-10);
        }
    }

    #[test]
    fn scheme_b_examples() {
        let mixed = BellDiagonal::MIXED;
        let (s, p) = scheme_b_step(&mixed, &noise(0.9, 0.8)).unwrap();
        assert_abs_diff_eq!(s.fidelity(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);

        let w = BellDiagonal::werner(0.7).unwrap();
        // from a Werner input the first step ties with scheme A; the
        // advantage shows once the untwirled shape is reused
        let perfect = NoiseParams::perfect();
        let (b1, _) = scheme_b_step(&w, &perfect).unwrap();
        let (a1, _) = scheme_a_step(0.7, &perfect).unwrap();
        assert_abs_diff_eq!(b1.fidelity(), a1, epsilon = 1e-15);
        let (b2, _) = scheme_b_step(&b1, &perfect).unwrap();
        let (a2, _) = scheme_a_step(a1, &perfect).unwrap();
        assert!(b2.fidelity() > a2);

        let n = noise(0.99, 0.99);
        let (s, p) = scheme_b_step(&w, &n).unwrap();
        let golden = [
            0.723_579_241_749_584_9,
            0.034_736_708_295_643_24,
            0.034_736_708_295_643_24,
            0.206_947_341_659_128_7,
        ];
        for (x, g) in s.components().iter().zip(golden) {
            assert_abs_diff_eq!(*x, g, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p, 0.669_431_847_2, epsilon = 1e-12);
        let (o, po) = oracle_purification_step(&w, &w, Scheme::B, &n).unwrap();
        assert!(o.max_abs_diff(&s) < 1e-12);
        assert_abs_diff_eq!(po, p, epsilon = 1e-12);
    }

    #[test]
    fn scheme_c_examples() {
        let n = noise(0.96, 0.96);
        let s = BellDiagonal::epsilon(0.7, 1.0).unwrap();
        assert_eq!(scheme_c_step(&s, &s, &n).unwrap(), scheme_b_step(&s, &n).unwrap());
        let (m, _) = scheme_c_step(&BellDiagonal::MIXED, &BellDiagonal::MIXED, &n).unwrap();
        assert_abs_diff_eq!(m.fidelity(), 0.25, epsilon = 1e-15);

        let (out, p) = scheme_c_step(&s, &s, &n).unwrap();
        let golden = [
            0.758_712_277_666_200_6,
            0.043_853_870_215_152_54,
            0.153_579_981_903_494_3,
            0.043_853_870_215_152_54,
        ];
        for (x, g) in out.components().iter().zip(golden) {
            assert_abs_diff_eq!(*x, g, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p, 0.562_403_379_2, epsilon = 1e-12);

        let fix = scheme_c_fixpoint(&s, &n).unwrap();
        assert!(fix.fidelity() > 0.7);
        assert_abs_diff_eq!(fix.fidelity(), 0.801_314_932_648_139_7, epsilon = 1e-9);
    }

    #[test]
    fn iteration_examples() {
        let perfect = NoiseParams::perfect();
        let (s, _) = iterate_to_fixpoint(Scheme::A, &BellDiagonal::werner(0.7).unwrap(), None, &perfect).unwrap();
        assert_abs_diff_eq!(s.fidelity(), 1.0, epsilon = 1e-9);
        let (s, _) = iterate_to_fixpoint(Scheme::A, &BellDiagonal::werner(0.4).unwrap(), None, &perfect).unwrap();
        assert_abs_diff_eq!(s.fidelity(), 0.25, epsilon = 1e-9);
        let w = BellDiagonal::werner(0.7).unwrap();
        assert!(iterate_to_fixpoint(Scheme::C, &w, None, &perfect).is_err());
        assert!(iterate_to_fixpoint(Scheme::B, &w, Some(&w), &perfect).is_err());
    }

    #[test]
    fn scheme_b_fixpoints_bracket_scheme_a() {
        for p in [0.96, 0.97, 0.98, 0.99, 0.995] {
            let n = noise(p, p);
            let a = scheme_a_fixpoints(&n);
            let b = scheme_b_fixpoints(&n).unwrap();
            let b_max = b.f_max.unwrap();
            let b_min = b.f_min.unwrap();
            if let (Some(a_min), Some(a_max)) = (a.f_min, a.f_max) {
                assert!(b_max > a_max, "p={p}: {b_max} vs {a_max}");
                assert!(b_min <= a_min, "p={p}: {b_min} vs {a_min}");
            }
        }
        let b = scheme_b_fixpoints(&NoiseParams::perfect()).unwrap();
        assert_abs_diff_eq!(b.f_max.unwrap(), 1.0, epsilon = 1e-9);
        assert!(b.f_min.unwrap() <= 0.5 + 1e-9);
    }

    #[test]
    fn resources_ab_examples() {
        let perfect = NoiseParams::perfect();
        let w = BellDiagonal::werner(0.7).unwrap();
        let r = resources_ab(Scheme::A, &w, 0.73, &perfect).unwrap();
        assert_eq!(r.k_max, 1);
        assert_abs_diff_eq!(r.m, 2.0 / 0.68, epsilon = 1e-12);

        for scheme in [Scheme::A, Scheme::B] {
            let r = resources_ab(scheme, &w, 0.6, &perfect).unwrap();
            assert_eq!((r.k_max, r.m), (0, 1.0));
        }
        let n = noise(0.97, 1.0);
        assert!(matches!(
            resources_ab(Scheme::A, &BellDiagonal::werner(0.5).unwrap(), 0.9, &n),
            Err(Error::Unreachable { .. })
        ));
        assert!(matches!(
            resources_ab(Scheme::A, &BellDiagonal::werner(0.8).unwrap(), 0.95, &n),
            Err(Error::Unreachable { .. })
        ));
        assert!(resources_ab(Scheme::C, &w, 0.9, &n).is_err());
    }

    #[test]
    fn resources_c_recursions() {
        let perfect = NoiseParams::perfect();
        // unit probabilities: M = k + 1, S = k
        let (mut m, mut s) = (1.0, 0.0);
        for _ in 0..3 {
            m = (m + 1.0) / 1.0;
            s = (s + 1.0) / 1.0;
        }
        assert_eq!((m, s), (4.0, 3.0));

        let aux = BellDiagonal::epsilon(0.8, 1.0).unwrap();
        let r = resources_c(&aux, 0.81, &perfect).unwrap();
        assert_eq!(r.k_max, 1);
        assert_abs_diff_eq!(r.m, 2.0 / r.p_even[0], epsilon = 1e-15);
        assert_abs_diff_eq!(r.s.unwrap(), 1.0 / r.p_even[0], epsilon = 1e-15);
    }

    #[test]
    fn resources_c_golden() {
        let n = NoiseParams::new(1.0, 0.995, 0.995).unwrap();
        let aux = BellDiagonal::epsilon(0.9, 1.0).unwrap();
        let fix = scheme_c_fixpoint(&aux, &n).unwrap();
        let r = resources_c(&aux, fix.fidelity() - 0.005, &n).unwrap();
        assert_eq!(r.k_max, 2);
        assert_abs_diff_eq!(r.m, 3.960_690_851_587_046, epsilon = 1e-9);
        assert_abs_diff_eq!(r.s.unwrap(), 2.551_444_849_127_085, epsilon = 1e-9);
        assert!(r.m >= r.m_floor());
    }

    #[test]
    fn sum_form_matches_recursion() {
        let p = [0.83, 0.91, 0.77, 0.95];
        let mut m = 1.0;
        for k in 1..=p.len() {
            m = (m + 1.0) / p[k - 1];
            let sum: f64 = (1..=k)
                .map(|j| {
                    let seed = if j == 1 { 2.0 } else { 1.0 };
                    seed * p[j - 1..k].iter().map(|x| 1.0 / x).product::<f64>()
                })
                .sum();
            assert_abs_diff_eq!(m, sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn scheme_parse() {
        assert_eq!("B".parse::<Scheme>().unwrap(), Scheme::B);
        assert_eq!("c".parse::<Scheme>().unwrap(), Scheme::C);
        assert!("D".parse::<Scheme>().is_err());
    }

    proptest! {
        #[test]
        fn perfect_ops_reduce_to_bennett(f in 0.0f64..=1.0) {
            let (fp, _) = scheme_a_step(f, &NoiseParams::perfect()).unwrap();
            prop_assert!((fp - bennett(f)).abs() <= 1e-14);
        }

        #[test]
        fn interior_points_improve(p2 in 0.955f64..=1.0, eta in 0.985f64..=1.0, t in 0.01f64..0.99) {
            let n = noise(p2, eta);
            let r = scheme_a_fixpoints(&n);
            prop_assume!(r.purification_possible);
            let (lo, hi) = (r.f_min.unwrap(), r.f_max.unwrap());
            let f = lo + t * (hi - lo);
            prop_assert!(scheme_a_step(f, &n).unwrap().0 > f);
            prop_assert!((scheme_a_step(lo, &n).unwrap().0 - lo).abs() <= 1e-9);
            prop_assert!((scheme_a_step(hi, &n).unwrap().0 - hi).abs() <= 1e-9);
        }

        #[test]
        fn step_outputs_are_states(w in proptest::array::uniform4(0.01f64..1.0), p2 in 0.0f64..=1.0, eta in 0.0f64..=1.0) {
            let sum: f64 = w.iter().sum();
            let s = BellDiagonal::new(w[0] / sum, w[1] / sum, w[2] / sum, 1.0 - (w[0] + w[1] + w[2]) / sum).unwrap();
            let (out, p) = scheme_b_step(&s, &noise(p2, eta)).unwrap();
            prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
            let total: f64 = out.components().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }
}
