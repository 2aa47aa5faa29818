//! Nested repeater protocol: connect `L` pairs, purify back to the working
//! fidelity, repeat on the next level.

use crate::bell::BellDiagonal;
use crate::connection::{connect_chain, connect_chain_werner, ConnectionStrategy};
use crate::error::{check_unit, Error, Result};
use crate::noise::NoiseParams;
use crate::purification::{
    resources_ab, resources_c, scheme_a_fixpoints, scheme_b_fixpoints, scheme_c_fixpoint, Scheme,
};
use crate::timing::TimingParams;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Largest group size probed by [`check_loop`].
pub const MAX_GROUP_PROBE: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RepeaterConfig {
    pub n_segments: usize,
    pub group_size: usize,
    pub scheme: Scheme,
    pub working_fidelity: f64,
    /// Shape of the elementary pairs for schemes B and C.
    pub eps: f64,
    pub noise: NoiseParams,
    pub timing: TimingParams,
}

impl RepeaterConfig {
    pub fn new(n_segments: usize, group_size: usize, scheme: Scheme, working_fidelity: f64) -> Self {
        RepeaterConfig {
            n_segments,
            group_size,
            scheme,
            working_fidelity,
            eps: 1.0,
            noise: NoiseParams::perfect(),
            timing: TimingParams::default(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseParams) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_timing(mut self, timing: TimingParams) -> Self {
        self.timing = timing;
        self
    }

    /// `n` with `N = L^n`.
    pub fn nesting_levels(&self) -> Result<usize> {
        if self.group_size < 2 {
            return Err(Error::Config(format!(
                "group size must be at least 2, got {}",
                self.group_size
            )));
        }
        if self.n_segments == 0 {
            return Err(Error::Config("at least one segment is needed".into()));
        }
        let mut n = 0;
        let mut span = 1usize;
        while span < self.n_segments {
            span = span.checked_mul(self.group_size).ok_or_else(|| {
                Error::Config(format!("{} segments overflow", self.n_segments))
            })?;
            n += 1;
        }
        if span != self.n_segments {
            return Err(Error::Config(format!(
                "{} segments is not a power of the group size {}",
                self.n_segments, self.group_size
            )));
        }
        Ok(n)
    }

    pub fn validate(&self) -> Result<usize> {
        let f = check_unit("working fidelity", self.working_fidelity)?;
        if f <= 0.25 {
            return Err(Error::Domain {
                name: "working fidelity",
                value: f,
                lo: 0.25,
                hi: 1.0,
            });
        }
        check_unit("eps", self.eps)?;
        self.nesting_levels()
    }

    pub fn elementary_pair(&self) -> Result<BellDiagonal> {
        match self.scheme {
            Scheme::A => BellDiagonal::werner(self.working_fidelity),
            Scheme::B | Scheme::C => BellDiagonal::epsilon(self.working_fidelity, self.eps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopDiagnostics {
    /// Fidelity after connecting `L` elementary pairs.
    pub f_l: f64,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub feasible: bool,
    /// Largest group size for which the loop closes at this fidelity.
    pub max_feasible_l: Option<usize>,
}

/// Feasibility of one connect-and-purify loop at working fidelity `f`.
///
/// Scheme A works on Werner pairs and compares with its fixpoint interval.
/// Scheme B connects pairs of shape `eps` and compares with its fixpoint
/// interval. Scheme C has no threshold; the loop closes when the reachable
/// fixpoint for the connected auxiliary pair lies above `f`.
pub fn check_loop(
    working_fidelity: f64,
    group_size: usize,
    scheme: Scheme,
    eps: f64,
    noise: &NoiseParams,
) -> Result<LoopDiagnostics> {
    if group_size < 2 {
        return Err(Error::Config(format!("group size must be at least 2, got {group_size}")));
    }
    let probe = |l: usize| -> Result<LoopDiagnostics> { loop_at(working_fidelity, l, scheme, eps, noise) };
    let mut diag = probe(group_size)?;
    let mut best = None;
    for l in 2..=MAX_GROUP_PROBE {
        if probe(l)?.feasible {
            best = Some(l);
        } else {
            break;
        }
    }
    diag.max_feasible_l = best;
    Ok(diag)
}

fn loop_at(f: f64, l: usize, scheme: Scheme, eps: f64, noise: &NoiseParams) -> Result<LoopDiagnostics> {
    let (f_l, f_min, f_max) = match scheme {
        Scheme::A => {
            let fix = scheme_a_fixpoints(noise);
            let (lo, hi) = if fix.purification_possible {
                (fix.f_min, fix.f_max)
            } else {
                (None, None)
            };
            (connect_chain_werner(f, l, noise)?, lo, hi)
        }
        Scheme::B => {
            let pair = BellDiagonal::epsilon(f, eps)?;
            let (connected, _) = connect_chain(&vec![pair; l], ConnectionStrategy::Parallel, noise)?;
            let fix = scheme_b_fixpoints(noise)?;
            (connected.fidelity(), fix.f_min, fix.f_max)
        }
        Scheme::C => {
            let pair = BellDiagonal::epsilon(f, eps)?;
            let (connected, _) = connect_chain(&vec![pair; l], ConnectionStrategy::Parallel, noise)?;
            let top = scheme_c_fixpoint(&connected, noise)?;
            (connected.fidelity(), None, Some(top.fidelity()))
        }
    };
    let above_threshold = match (scheme, f_min) {
        (Scheme::C, _) => true,
        (_, Some(lo)) => f_l > lo,
        (_, None) => false,
    };
    let feasible = above_threshold && f_max.is_some_and(|hi| f < hi);
    Ok(LoopDiagnostics {
        f_l,
        f_min,
        f_max,
        feasible,
        max_feasible_l: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub f_connected: f64,
    pub f_purified: f64,
    pub k_max: usize,
    pub m: f64,
    /// Expected purification steps including failures; scheme C only.
    pub s: Option<f64>,
    pub p_even: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeaterReport {
    pub nesting_levels: usize,
    pub per_level: Vec<LevelReport>,
    pub total_resources: f64,
    pub physical_per_segment: f64,
    pub final_state: BellDiagonal,
}

/// Runs all nesting levels with expected-value resource accounting.
pub fn run_nested(config: &RepeaterConfig) -> Result<RepeaterReport> {
    let n = config.validate()?;
    let l = config.group_size;
    let noise = &config.noise;
    let target = config.working_fidelity;
    let mut state = config.elementary_pair()?;
    let mut per_level = Vec::with_capacity(n);

    for level in 1..=n {
        let (connected, _) = connect_chain(&vec![state; l], ConnectionStrategy::Parallel, noise)?;
        let purified = match config.scheme {
            Scheme::A => resources_ab(Scheme::A, &connected.twirl(), target, noise),
            Scheme::B => resources_ab(Scheme::B, &connected, target, noise),
            Scheme::C => resources_c(&connected, target, noise),
        };
        let r = purified.map_err(|e| match e {
            Error::Unreachable { .. } => Error::LoopOpen {
                level,
                connected: connected.fidelity(),
            },
            other => other,
        })?;
        per_level.push(LevelReport {
            level,
            f_connected: connected.fidelity(),
            f_purified: r.final_state.fidelity(),
            k_max: r.k_max,
            m: r.m,
            s: r.s,
            p_even: r.p_even,
        });
        state = r.final_state;
    }

    let ms: Vec<f64> = per_level.iter().map(|x| x.m).collect();
    let physical_per_segment = match config.scheme {
        Scheme::A | Scheme::B => ms.iter().product(),
        Scheme::C => (1 + n) as f64,
    };
    Ok(RepeaterReport {
        nesting_levels: n,
        total_resources: total_resources(l, &ms, n)?,
        physical_per_segment,
        per_level,
        final_state: state,
    })
}

/// `R = Π_k L·M_k`.
pub fn total_resources(group_size: usize, m_per_level: &[f64], n_levels: usize) -> Result<f64> {
    if m_per_level.len() != n_levels {
        return Err(Error::Config(format!(
            "{} resource values for {n_levels} levels",
            m_per_level.len()
        )));
    }
    Ok(m_per_level.iter().map(|m| group_size as f64 * m).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn errors(x: f64) -> NoiseParams {
        NoiseParams::uniform_error(x).unwrap()
    }

    #[test]
    fn nesting_levels() {
        let c = |n, l| RepeaterConfig::new(n, l, Scheme::B, 0.9);
        assert_eq!(c(128, 2).nesting_levels().unwrap(), 7);
        assert_eq!(c(9, 3).nesting_levels().unwrap(), 2);
        assert_eq!(c(1, 2).nesting_levels().unwrap(), 0);
        assert!(c(12, 2).nesting_levels().is_err());
        assert!(c(8, 1).nesting_levels().is_err());
        assert!(c(0, 2).nesting_levels().is_err());
    }

    #[test]
    fn loop_examples() {
        let n = NoiseParams::new(1.0, 0.97, 1.0).unwrap();
        let d = check_loop(0.9, 3, Scheme::A, 1.0, &n).unwrap();
        assert_abs_diff_eq!(d.f_l, 0.709_368_3, epsilon = 5e-8);
        assert_abs_diff_eq!(d.f_min.unwrap(), 0.585_172_4, epsilon = 5e-8);
        assert_abs_diff_eq!(d.f_max.unwrap(), 0.914_827_6, epsilon = 5e-8);
        assert!(d.feasible);
        assert!(d.max_feasible_l.unwrap() >= 3);

        let bad = NoiseParams::new(1.0, 0.95, 1.0).unwrap();
        for f in [0.6, 0.75, 0.9, 0.99] {
            for l in [2, 3, 5] {
                let d = check_loop(f, l, Scheme::A, 1.0, &bad).unwrap();
                assert!(!d.feasible);
                assert_eq!(d.max_feasible_l, None);
            }
        }

        let d = check_loop(0.99, 2, Scheme::A, 1.0, &NoiseParams::perfect()).unwrap();
        assert!(d.feasible);
    }

    #[test]
    fn scheme_c_loop_diagnostics() {
        let d = check_loop(0.96, 2, Scheme::C, 1.0, &errors(0.005)).unwrap();
        assert!(d.f_min.is_none());
        assert!(d.feasible);
        assert!(d.f_max.unwrap() > 0.96);
        // Werner pairs cannot be restored
        let d = check_loop(0.96, 2, Scheme::C, 1.0 / 3.0, &errors(0.005)).unwrap();
        assert!(!d.feasible);
    }

    #[test]
    fn resource_identities() {
        assert_eq!(total_resources(2, &[1.0; 5], 5).unwrap(), 32.0);
        assert_eq!(total_resources(2, &[2.0; 3], 3).unwrap(), 64.0);
        assert_eq!(total_resources(3, &[4.0; 2], 2).unwrap(), 144.0);
        assert!(total_resources(3, &[4.0; 2], 3).is_err());
        // R = N^(log_L M + 1)
        let r: f64 = total_resources(3, &[4.0; 2], 2).unwrap();
        let expected = libm::pow(9.0, libm::log(4.0) / libm::log(3.0) + 1.0);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_chain() {
        let cfg = RepeaterConfig::new(1, 2, Scheme::C, 0.96).with_noise(errors(0.005));
        let r = run_nested(&cfg).unwrap();
        assert_eq!(r.total_resources, 1.0);
        assert_eq!(r.physical_per_segment, 1.0);
        assert_eq!(r.final_state, cfg.elementary_pair().unwrap());
    }

    #[test]
    fn continental_scheme_b() {
        let cfg = RepeaterConfig::new(128, 2, Scheme::B, 0.96).with_noise(errors(0.005));
        let r = run_nested(&cfg).unwrap();
        assert_eq!(r.per_level.len(), 7);
        assert!((r.physical_per_segment - 329.0).abs() <= 0.15 * 329.0);
        for lvl in &r.per_level {
            assert!(lvl.f_purified >= 0.96);
            assert!(lvl.f_connected < 0.96);
        }
        assert!(r.final_state.fidelity() >= 0.96);
        assert_eq!(run_nested(&cfg).unwrap(), r);
    }

    #[test]
    fn scheme_c_physical_resources_are_linear() {
        for n in 1..=6 {
            let cfg = RepeaterConfig::new(1 << n, 2, Scheme::C, 0.96).with_noise(errors(0.005));
            assert_eq!(run_nested(&cfg).unwrap().physical_per_segment, (1 + n) as f64);
        }
    }

    #[test]
    fn open_loop_is_reported() {
        let cfg = RepeaterConfig::new(4, 2, Scheme::A, 0.9).with_noise(NoiseParams::new(1.0, 0.95, 1.0).unwrap());
        assert!(matches!(run_nested(&cfg), Err(Error::LoopOpen { level: 1, .. })));
    }
}
