use crate::config::{Experiment, ExperimentConfig, Params, SchemeArg};
use crate::error::{AppError, AppResult};
use crate::montecarlo::simulate_time_c_parallel;
use rayon::prelude::*;
use repeaterlab_core::purification::{
    iterate_to_fixpoint, scheme_a_fixpoints, scheme_a_step, scheme_b_fixpoints, scheme_b_step,
    FixpointReport,
};
use repeaterlab_core::repeater::{check_loop, run_nested, RepeaterReport};
use repeaterlab_core::timing::total_time_ab;
use repeaterlab_core::{BellDiagonal, Error, NoiseParams, RepeaterConfig, Scheme};

/// Rows of one experiment plus a human-readable summary for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<String>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> AppResult<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

pub fn run(cfg: &ExperimentConfig) -> AppResult<Table> {
    let p = &cfg.params;
    match &cfg.experiment {
        Experiment::Fixpoints { p_lo, p_hi, steps } => fixpoints(p, *p_lo, *p_hi, *steps),
        Experiment::Converge { start, steps } => converge(p, *start, *steps),
        Experiment::Shape { steps } => shape(p, *steps),
        Experiment::Loop { f_lo, f_hi, steps } => loop_scan(p, *f_lo, *f_hi, *steps),
        Experiment::Resources {
            f_lo,
            f_hi,
            steps,
            error_levels,
        } => resources(p, *f_lo, *f_hi, *steps, error_levels),
        Experiment::Repeater => repeater(p, cfg.seed),
        Experiment::Table => table(p, cfg.seed),
    }
}

fn scan_noise(p: &Params, x: f64) -> AppResult<NoiseParams> {
    let eta = if p.eta_tied { x } else { p.eta };
    Ok(NoiseParams::new(p.p1, x, eta)?)
}

fn fixpoint_report(scheme: SchemeArg, noise: &NoiseParams) -> AppResult<FixpointReport> {
    match scheme {
        SchemeArg::A => Ok(scheme_a_fixpoints(noise)),
        SchemeArg::B => Ok(scheme_b_fixpoints(noise)?),
        SchemeArg::C => Err(AppError::Config(
            "fixpoints are defined for schemes A and B; use `shape` for scheme C".into(),
        )),
    }
}

/// Smallest `p2` at which scheme A still has a fixpoint interval.
fn scheme_a_threshold(p: &Params) -> AppResult<Option<f64>> {
    let possible = |x: f64| -> AppResult<bool> { Ok(scheme_a_fixpoints(&scan_noise(p, x)?).f_max.is_some()) };
    let (mut lo, mut hi) = (0.5, 1.0);
    if !possible(hi)? || possible(lo)? {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if possible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn fixpoints(p: &Params, lo: f64, hi: f64, steps: usize) -> AppResult<Table> {
    let mut points = linspace(lo, hi, steps);
    if p.scheme == SchemeArg::A {
        if let Some(t) = scheme_a_threshold(p)? {
            points.push(t);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let rows: Vec<AppResult<Vec<String>>> = points
        .par_iter()
        .map(|&x| {
            let r = fixpoint_report(p.scheme, &scan_noise(p, x)?)?;
            Ok(vec![num(x), opt(r.f_min), opt(r.f_max)])
        })
        .collect();
    let mut t = Table::new(&["p", "f_min", "f_max"]);
    t.rows = rows.into_iter().collect::<AppResult<_>>()?;
    Ok(t)
}

fn converge(p: &Params, start: f64, steps: usize) -> AppResult<Table> {
    let noise = p.noise()?;
    let mut t = Table::new(&["step", "scheme_a", "scheme_b"]);
    let mut fa = start;
    let mut sb = BellDiagonal::werner(start)?;
    t.rows.push(vec!["0".into(), num(fa), num(sb.fidelity())]);
    for k in 1..=steps {
        fa = scheme_a_step(fa, &noise)?.0;
        sb = scheme_b_step(&sb, &noise)?.0;
        t.rows.push(vec![k.to_string(), num(fa), num(sb.fidelity())]);
    }
    Ok(t)
}

fn shape(p: &Params, steps: usize) -> AppResult<Table> {
    let noise = p.noise()?;
    let rows: Vec<AppResult<Vec<String>>> = linspace(0.0, 1.0, steps)
        .par_iter()
        .map(|&eps| {
            let aux = BellDiagonal::epsilon(p.working_fidelity, eps)?;
            let (fix, n) = iterate_to_fixpoint(Scheme::C, &aux, Some(&aux), &noise)?;
            Ok(vec![num(eps), num(fix.fidelity()), n.to_string()])
        })
        .collect();
    let mut t = Table::new(&["eps", "f_fixpoint", "iterations"]);
    t.rows = rows.into_iter().collect::<AppResult<_>>()?;
    Ok(t)
}

fn loop_scan(p: &Params, lo: f64, hi: f64, steps: usize) -> AppResult<Table> {
    let noise = p.noise()?;
    let rows: Vec<AppResult<(bool, Vec<String>)>> = linspace(lo, hi, steps)
        .par_iter()
        .map(|&f| {
            let d = check_loop(f, p.group, p.scheme.into(), p.eps, &noise)?;
            Ok((
                d.feasible,
                vec![
                    num(f),
                    num(d.f_l),
                    opt(d.f_min),
                    opt(d.f_max),
                    d.feasible.to_string(),
                    d.max_feasible_l.map(|l| l.to_string()).unwrap_or_default(),
                ],
            ))
        })
        .collect();
    let mut t = Table::new(&["f", "f_l", "f_min", "f_max", "feasible", "max_feasible_l"]);
    let mut any = false;
    for r in rows {
        let (ok, row) = r?;
        any |= ok;
        t.rows.push(row);
    }
    if !any {
        return Err(AppError::Infeasible(format!(
            "no working fidelity in [{lo}, {hi}] closes the loop with L = {}",
            p.group
        )));
    }
    Ok(t)
}

fn resources(p: &Params, lo: f64, hi: f64, steps: usize, error_levels: &[f64]) -> AppResult<Table> {
    let grid: Vec<(f64, f64)> = error_levels
        .iter()
        .flat_map(|&e| linspace(lo, hi, steps).into_iter().map(move |f| (e, f)))
        .collect();
    let rows: Vec<AppResult<Vec<String>>> = grid
        .par_iter()
        .map(|&(e, f)| {
            let cfg = RepeaterConfig {
                working_fidelity: f,
                noise: NoiseParams::uniform_error(e)?,
                ..p.repeater()?
            };
            let mut row = vec![num(e), num(f)];
            match run_nested(&cfg) {
                Ok(r) => row.extend([
                    num(r.physical_per_segment),
                    num(r.total_resources),
                    r.per_level.iter().map(|x| x.k_max).max().unwrap_or(0).to_string(),
                ]),
                Err(Error::LoopOpen { .. }) => row.extend([String::new(), String::new(), String::new()]),
                Err(other) => return Err(other.into()),
            }
            Ok(row)
        })
        .collect();
    let mut t = Table::new(&["errors", "f", "physical_per_segment", "total_resources", "k_max"]);
    t.rows = rows.into_iter().collect::<AppResult<_>>()?;
    Ok(t)
}

/// Mean and standard deviation of the total time; exact for schemes A/B.
pub fn protocol_time(cfg: &RepeaterConfig, report: &RepeaterReport, runs: usize, seed: u64) -> AppResult<(f64, f64)> {
    match cfg.scheme {
        Scheme::A | Scheme::B => {
            let ks: Vec<usize> = report.per_level.iter().map(|x| x.k_max).collect();
            Ok((total_time_ab(cfg, &ks)?, 0.0))
        }
        Scheme::C => {
            let r = simulate_time_c_parallel(cfg, runs, seed)?;
            Ok((r.mean_total, r.std_total))
        }
    }
}

fn repeater(p: &Params, seed: u64) -> AppResult<Table> {
    let cfg = p.repeater()?;
    let report = run_nested(&cfg)?;
    let mut t = Table::new(&["level", "f_connected", "f_purified", "k_max", "m", "s"]);
    for lvl in &report.per_level {
        t.rows.push(vec![
            lvl.level.to_string(),
            num(lvl.f_connected),
            num(lvl.f_purified),
            lvl.k_max.to_string(),
            num(lvl.m),
            opt(lvl.s),
        ]);
    }
    t.summary.push(format!(
        "scheme {} with {} segments, {} levels",
        cfg.scheme, cfg.n_segments, report.nesting_levels
    ));
    t.summary.push(format!("final fidelity {}", report.final_state.fidelity()));
    t.summary.push(format!("total resources {}", report.total_resources));
    t.summary.push(format!("physical resources per segment {}", report.physical_per_segment));
    if cfg.group_size.is_power_of_two() {
        let (mean, std) = protocol_time(&cfg, &report, p.runs, seed)?;
        t.summary.push(format!("time {mean} s (std {std} s)"));
    }
    Ok(t)
}

/// Continental (2^7 segments) and intercontinental (2^10 segments) rows for
/// all three schemes.
fn table(p: &Params, seed: u64) -> AppResult<Table> {
    let mut t = Table::new(&[
        "scheme",
        "segments",
        "levels",
        "physical_per_segment",
        "total_resources",
        "final_fidelity",
        "time_s",
        "time_std_s",
    ]);
    for scheme in [SchemeArg::A, SchemeArg::B, SchemeArg::C] {
        for n in [7u32, 10] {
            let params = Params {
                scheme,
                segments: 1 << n,
                group: 2,
                ..p.clone()
            };
            let cfg = params.repeater()?;
            let mut row = vec![format!("{}", Scheme::from(scheme)), (1u64 << n).to_string(), n.to_string()];
            match run_nested(&cfg) {
                Ok(r) => {
                    let (mean, std) = protocol_time(&cfg, &r, p.runs, seed)?;
                    row.extend([
                        num(r.physical_per_segment),
                        num(r.total_resources),
                        num(r.final_state.fidelity()),
                        num(mean),
                        num(std),
                    ]);
                }
                Err(Error::LoopOpen { level, connected }) => {
                    t.summary.push(format!(
                        "scheme {} at {} segments: loop open at level {level} (F_L = {connected})",
                        Scheme::from(scheme),
                        1u64 << n
                    ));
                    row.extend(std::iter::repeat_n(String::new(), 5));
                }
                Err(other) => return Err(other.into()),
            }
            t.rows.push(row);
        }
    }
    Ok(t)
}
