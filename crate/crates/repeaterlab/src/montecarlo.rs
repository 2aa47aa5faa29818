use rayon::prelude::*;
use repeaterlab_core::timing::{simulate_run, RunSample, ScheduleC, TimeReport};
use repeaterlab_core::{RepeaterConfig, Result};

/// Scheme C Monte Carlo with runs spread over the rayon pool. Samples are
/// collected in run order, so the report equals the sequential one.
pub fn simulate_time_c_parallel(config: &RepeaterConfig, runs: usize, seed: u64) -> Result<TimeReport> {
    let schedule = ScheduleC::from_config(config)?;
    let samples: Vec<RunSample> = (0..runs as u64)
        .into_par_iter()
        .map(|r| simulate_run(&schedule, seed, r))
        .collect();
    TimeReport::from_samples(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use repeaterlab_core::timing::simulate_time_c;
    use repeaterlab_core::{NoiseParams, Scheme};

    #[test]
    fn matches_sequential() {
        let cfg = RepeaterConfig::new(32, 2, Scheme::C, 0.96).with_noise(NoiseParams::uniform_error(0.005).unwrap());
        assert_eq!(
            simulate_time_c_parallel(&cfg, 40, 5).unwrap(),
            simulate_time_c(&cfg, 40, 5).unwrap()
        );
    }
}
