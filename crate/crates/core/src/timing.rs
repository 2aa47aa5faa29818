//! Time cost of the nested protocol.
//!
//! With `L = 2^l`, a level-`m` connection joins pairs that each span
//! `f(m) = (2^l)^(m−1)` segments, so announcing its outcome across the new
//! pair costs `f(m)(2^l − 1)` one-segment messages and a purification round
//! across it costs `f(m)·2^l`.
//!
//! Schemes A and B purify all copies side by side, so each level costs one
//! connection plus `k` purification rounds. Scheme C purifies one pair at a
//! time with restarts on failure, which is sampled by Monte Carlo.

use crate::error::{Error, Result};
use crate::purification::Scheme;
use crate::repeater::{run_nested, RepeaterConfig, RepeaterReport};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// RNG streams reserved per run; stream id is `run · STREAMS_PER_RUN + level`.
pub const STREAMS_PER_RUN: u64 = 64;
pub const DEFAULT_RUNS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    tau_op: f64,
    tau_class: f64,
    l_segment: f64,
    l0: f64,
    c: f64,
}

impl TimingParams {
    /// Derives the one-segment message time as `l_segment / c`.
    pub fn from_geometry(tau_op: f64, l_segment: f64, l0: f64, c: f64) -> Result<Self> {
        for (name, v) in [("tau_op", tau_op), ("l_segment", l_segment), ("l0", l0), ("c", c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(TimingParams {
            tau_op,
            tau_class: l_segment / c,
            l_segment,
            l0,
            c,
        })
    }

    pub fn tau_op(&self) -> f64 {
        self.tau_op
    }

    pub fn tau_class(&self) -> f64 {
        self.tau_class
    }

    pub fn l_segment(&self) -> f64 {
        self.l_segment
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for TimingParams {
    /// 10 μs local operations, 10 km segments and attenuation length, light
    /// in fiber at 3·10⁵ km/s.
    fn default() -> Self {
        TimingParams {
            tau_op: 1e-5,
            tau_class: 10.0 / 3e5,
            l_segment: 10.0,
            l0: 10.0,
            c: 3e5,
        }
    }
}

/// Expected time to create one elementary pair over an absorbing fiber.
pub fn tau_pair_afc(p: &TimingParams) -> f64 {
    (5.0 * p.tau_op + 2.0 * p.tau_class) * libm::exp(p.l_segment / p.l0)
}

/// Time for a classical signal to cross `distance_km`.
pub fn classical_time(distance_km: f64, c: f64) -> f64 {
    distance_km / c
}

/// `l` with `L = 2^l`.
pub fn group_exponent(group_size: usize) -> Result<u32> {
    if group_size >= 2 && group_size.is_power_of_two() {
        Ok(group_size.trailing_zeros())
    } else {
        Err(Error::Config(format!(
            "group size {group_size} is not a power of two"
        )))
    }
}

#[derive(Debug, Clone, Copy)]
struct LevelCost {
    connect: f64,
    round: f64,
}

fn level_cost(l: u32, level: usize, p: &TimingParams) -> LevelCost {
    let block = libm::pow(2.0, l as f64);
    let f = libm::pow(block, (level - 1) as f64);
    LevelCost {
        connect: 3.0 * l as f64 * p.tau_op + f * (block - 1.0) * p.tau_class,
        round: 3.0 * p.tau_op + f * block * p.tau_class,
    }
}

/// Total time for schemes A and B with `k_per_level[m − 1]` purification
/// rounds at level `m`.
pub fn total_time_ab(config: &RepeaterConfig, k_per_level: &[usize]) -> Result<f64> {
    let n = config.nesting_levels()?;
    let l = group_exponent(config.group_size)?;
    if k_per_level.len() != n {
        return Err(Error::Config(format!(
            "{} round counts for {n} levels",
            k_per_level.len()
        )));
    }
    let mut t = tau_pair_afc(&config.timing);
    for (m, &k) in (1..=n).zip(k_per_level) {
        let cost = level_cost(l, m, &config.timing);
        t += cost.connect + k as f64 * cost.round;
    }
    Ok(t)
}

/// Closed form of [`total_time_ab`] for the same `k` on every level.
pub fn total_time_ab_closed(n: usize, l: u32, k: usize, p: &TimingParams) -> f64 {
    let (n_f, l_f, k_f) = (n as f64, l as f64, k as f64);
    let block = libm::pow(2.0, l_f);
    let span = libm::pow(block, n_f);
    n_f * (3.0 * l_f + 3.0 * k_f) * p.tau_op
        + (span - 1.0 + k_f * block * (span - 1.0) / (block - 1.0)) * p.tau_class
        + tau_pair_afc(p)
}

/// Per-level inputs of the scheme C sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleC {
    group_size: usize,
    tau_pair: f64,
    costs: Vec<(f64, f64)>,
    p_even: Vec<Vec<f64>>,
    m: Vec<f64>,
    s: Vec<f64>,
}

impl ScheduleC {
    pub fn new(config: &RepeaterConfig, report: &RepeaterReport) -> Result<Self> {
        if config.scheme != Scheme::C {
            return Err(Error::InvalidScheme(config.scheme.as_char()));
        }
        let l = group_exponent(config.group_size)?;
        if report.nesting_levels >= STREAMS_PER_RUN as usize {
            return Err(Error::Config(format!(
                "at most {} nesting levels are supported",
                STREAMS_PER_RUN - 1
            )));
        }
        let costs = (1..=report.nesting_levels)
            .map(|m| {
                let c = level_cost(l, m, &config.timing);
                (c.connect, c.round)
            })
            .collect();
        Ok(ScheduleC {
            group_size: config.group_size,
            tau_pair: tau_pair_afc(&config.timing),
            costs,
            p_even: report.per_level.iter().map(|x| x.p_even.clone()).collect(),
            m: report.per_level.iter().map(|x| x.m).collect(),
            s: report.per_level.iter().map(|x| x.s.unwrap_or(0.0)).collect(),
        })
    }

    pub fn from_config(config: &RepeaterConfig) -> Result<Self> {
        Self::new(config, &run_nested(config)?)
    }

    pub fn nesting_levels(&self) -> usize {
        self.costs.len()
    }

    /// Estimate using the expected `M` and `S` of every level instead of
    /// sampling. Ignores waiting for the slowest sibling.
    pub fn analytic_estimate(&self) -> f64 {
        let mut t = self.tau_pair;
        for (i, &(connect, round)) in self.costs.iter().enumerate() {
            t = (t + connect) * self.m[i] + self.s[i] * round;
        }
        t
    }
}

/// Outcome of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSample {
    pub total: f64,
    /// Summed durations of every level-`m` pair produced, and their count.
    pub level_sums: Vec<f64>,
    pub level_counts: Vec<u64>,
}

struct Sampler<'a> {
    schedule: &'a ScheduleC,
    rngs: Vec<ChaCha8Rng>,
    level_sums: Vec<f64>,
    level_counts: Vec<u64>,
}

impl Sampler<'_> {
    fn pair(&mut self, level: usize) -> f64 {
        if level == 0 {
            return self.schedule.tau_pair;
        }
        let (_, round) = self.schedule.costs[level - 1];
        let steps = self.schedule.p_even[level - 1].len();
        let mut t = self.connected(level);
        let mut k = 0;
        while k < steps {
            t += self.connected(level) + round;
            let p = self.schedule.p_even[level - 1][k];
            if self.rngs[level].random::<f64>() < p {
                k += 1;
            } else {
                k = 0;
                t += self.connected(level);
            }
        }
        self.level_sums[level - 1] += t;
        self.level_counts[level - 1] += 1;
        t
    }

    /// Builds `L` pairs of the level below side by side and connects them.
    fn connected(&mut self, level: usize) -> f64 {
        let mut slowest: f64 = 0.0;
        for _ in 0..self.schedule.group_size {
            slowest = slowest.max(self.pair(level - 1));
        }
        slowest + self.schedule.costs[level - 1].0
    }
}

/// One run of the scheme C sampler. Runs are independent, so they may be
/// evaluated in any order or concurrently.
pub fn simulate_run(schedule: &ScheduleC, seed: u64, run: u64) -> RunSample {
    let n = schedule.nesting_levels();
    let rngs = (0..=n as u64)
        .map(|level| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(run * STREAMS_PER_RUN + level);
            rng
        })
        .collect();
    let mut sampler = Sampler {
        schedule,
        rngs,
        level_sums: vec![0.0; n],
        level_counts: vec![0; n],
    };
    let total = sampler.pair(n);
    RunSample {
        total,
        level_sums: sampler.level_sums,
        level_counts: sampler.level_counts,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeReport {
    pub mean_total: f64,
    pub std_total: f64,
    pub runs: usize,
    /// Mean time to produce one level-`m` pair, for `m = 1..=n`.
    pub per_level_breakdown: Vec<f64>,
}

impl TimeReport {
    /// Aggregates samples in the given order.
    pub fn from_samples(samples: &[RunSample]) -> Result<Self> {
        let runs = samples.len();
        if runs == 0 {
            return Err(Error::Config("at least one run is needed".into()));
        }
        let mean = samples.iter().map(|s| s.total).sum::<f64>() / runs as f64;
        // shifted by the first sample so equal totals give exactly zero
        let shift = samples[0].total;
        let mean_shifted = samples.iter().map(|s| s.total - shift).sum::<f64>() / runs as f64;
        let var = if runs > 1 {
            samples
                .iter()
                .map(|s| (s.total - shift - mean_shifted) * (s.total - shift - mean_shifted))
                .sum::<f64>()
                / (runs - 1) as f64
        } else {
            0.0
        };
        let levels = samples[0].level_sums.len();
        let mut sums = vec![0.0; levels];
        let mut counts = vec![0u64; levels];
        for s in samples {
            for (i, (x, c)) in s.level_sums.iter().zip(&s.level_counts).enumerate() {
                sums[i] += x;
                counts[i] += c;
            }
        }
        Ok(TimeReport {
            mean_total: mean,
            std_total: libm::sqrt(var),
            runs,
            per_level_breakdown: sums
                .iter()
                .zip(&counts)
                .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
                .collect(),
        })
    }
}

/// Monte Carlo total time of scheme C over `runs` seeded runs.
pub fn simulate_time_c(config: &RepeaterConfig, runs: usize, seed: u64) -> Result<TimeReport> {
    let schedule = ScheduleC::from_config(config)?;
    let samples: Vec<RunSample> = (0..runs as u64).map(|r| simulate_run(&schedule, seed, r)).collect();
    TimeReport::from_samples(&samples)
}
