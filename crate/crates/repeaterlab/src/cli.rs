//! Command-line surface and its translation into an [`ExperimentConfig`].

use crate::config::{sidecar_path, Experiment, ExperimentConfig, Params, SchemeArg};
use crate::error::{AppError, AppResult};
use crate::experiments::{self, Table};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const SEED_ENV: &str = "REPEATERLAB_SEED";
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "repeaterlab", version, about = "Entanglement purification and quantum repeater simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixpoint interval of scheme A or B against p2.
    Fixpoints {
        #[arg(long = "p", value_name = "LO..HI", default_value = "0.9..1.0", value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 51)]
        steps: usize,
    },
    /// Fidelity per purification step for schemes A and B.
    Converge {
        #[arg(long, default_value_t = 0.7)]
        start: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Scheme C fixpoint against the shape parameter of the auxiliary pair.
    Shape {
        #[arg(long, default_value_t = 51)]
        steps: usize,
    },
    /// Whether connecting L pairs and purifying closes the loop.
    Loop {
        #[arg(long = "f", value_name = "LO..HI", default_value = "0.8..0.99", value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Physical resources per segment against the working fidelity.
    Resources {
        #[arg(long = "f", value_name = "LO..HI", default_value = "0.9..0.99", value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.005,0.01")]
        error_levels: Vec<f64>,
    },
    /// Full nested repeater run.
    Repeater {
        /// Nesting levels; sets the segment count to group^levels.
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Schemes A, B and C at 2^7 and 2^10 segments.
    Table,
    /// Repeat a run from its metadata sidecar.
    Rerun {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaArg {
    Value(f64),
    Tied,
}

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "tied" {
            return Ok(EtaArg::Tied);
        }
        s.parse()
            .map(EtaArg::Value)
            .map_err(|_| format!("expected a number or `tied`, got `{s}`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, value_enum, ignore_case = true, default_value = "B")]
    pub scheme: SchemeArg,
    #[arg(long, global = true)]
    pub p1: Option<f64>,
    #[arg(long, global = true)]
    pub p2: Option<f64>,
    /// Measurement quality, or `tied` to follow p2.
    #[arg(long, global = true)]
    pub eta: Option<EtaArg>,
    /// Shorthand for p1 = p2 = eta = 1 - x.
    #[arg(long, global = true)]
    pub errors: Option<f64>,
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    #[arg(long, global = true, default_value_t = 2)]
    pub group: usize,
    #[arg(long, global = true, default_value_t = 0.96)]
    pub working_fidelity: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub tau_op: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub l_segment: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub l0: f64,
    #[arg(long, global = true, default_value_t = 3e5)]
    pub c: f64,
    #[arg(long, global = true, default_value_t = 300)]
    pub runs: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    if !(lo <= hi) {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

fn params(common: &CommonArgs) -> AppResult<Params> {
    let base = match common.errors {
        Some(x) if (0.0..=1.0).contains(&x) => 1.0 - x,
        Some(x) => return Err(AppError::Config(format!("--errors must lie in [0, 1], got {x}"))),
        None => 1.0,
    };
    let (eta, eta_tied) = match common.eta {
        Some(EtaArg::Value(v)) => (v, false),
        Some(EtaArg::Tied) => (common.p2.unwrap_or(base), true),
        None => (base, false),
    };
    Ok(Params {
        scheme: common.scheme,
        p1: common.p1.unwrap_or(base),
        p2: common.p2.unwrap_or(base),
        eta,
        eta_tied,
        segments: common.segments.unwrap_or(128),
        group: common.group,
        working_fidelity: common.working_fidelity,
        eps: common.eps,
        tau_op: common.tau_op,
        l_segment: common.l_segment,
        l0: common.l0,
        c: common.c,
        runs: common.runs,
    })
}

fn seed(flag: u64, env: Option<&str>) -> AppResult<u64> {
    match env {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| AppError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{s}`"))),
        None => Ok(flag),
    }
}

/// Builds the run description. `env_seed` is the value of `REPEATERLAB_SEED`,
/// if set. A rerun loads its description verbatim and only takes `--out`.
pub fn resolve(cli: &Cli, env_seed: Option<&str>) -> AppResult<ExperimentConfig> {
    let common = &cli.common;
    let mut params = params(common)?;
    let experiment = match &cli.command {
        Command::Fixpoints { range, steps } => Experiment::Fixpoints {
            p_lo: range.0,
            p_hi: range.1,
            steps: *steps,
        },
        Command::Converge { start, steps } => Experiment::Converge {
            start: *start,
            steps: *steps,
        },
        Command::Shape { steps } => Experiment::Shape { steps: *steps },
        Command::Loop { range, steps } => Experiment::Loop {
            f_lo: range.0,
            f_hi: range.1,
            steps: *steps,
        },
        Command::Resources {
            range,
            steps,
            error_levels,
        } => Experiment::Resources {
            f_lo: range.0,
            f_hi: range.1,
            steps: *steps,
            error_levels: error_levels.clone(),
        },
        Command::Repeater { levels } => {
            if let Some(n) = levels {
                let span = u32::try_from(params.group)
                    .ok()
                    .and_then(|g| g.checked_pow(*n))
                    .ok_or_else(|| AppError::Config(format!("{} levels of group {} overflow", n, params.group)))?;
                let span = span as usize;
                if common.segments.is_some_and(|s| s != span) {
                    return Err(AppError::Config(format!(
                        "--segments {} disagrees with --levels {n} and --group {}",
                        params.segments, params.group
                    )));
                }
                params.segments = span;
            }
            Experiment::Repeater
        }
        Command::Table => Experiment::Table,
        Command::Rerun { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if common.out.is_some() {
                cfg.out = common.out.clone();
            }
            return Ok(cfg);
        }
    };
    Ok(ExperimentConfig {
        seed: seed(common.seed, env_seed)?,
        out: common.out.clone(),
        params,
        experiment,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Runs the experiment and writes its CSV (stdout when no path is given) and
/// sidecar. The summary goes to stderr.
pub fn execute(cfg: &ExperimentConfig) -> AppResult<Table> {
    let table = experiments::run(cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            table.write_csv(BufWriter::new(file))?;
            let meta = sidecar_path(path);
            std::fs::write(&meta, cfg.to_toml()?).map_err(io_err(&meta))?;
        }
        None => table.write_csv(std::io::stdout().lock())?,
    }
    let mut err = std::io::stderr().lock();
    for line in &table.summary {
        let _ = writeln!(err, "{line}");
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("repeaterlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.95..1.0"), Ok((0.95, 1.0)));
        assert!(parse_range("1..0.5").is_err());
        assert!(parse_range("0.5").is_err());
    }

    #[test]
    fn errors_shorthand_and_overrides() {
        let cfg = resolve(&cli(&["table", "--errors", "0.005", "--p1", "0.99"]), None).unwrap();
        assert_eq!(cfg.params.p1, 0.99);
        assert_eq!(cfg.params.p2, 0.995);
        assert_eq!(cfg.params.eta, 0.995);
        let cfg = resolve(&cli(&["fixpoints", "--eta", "tied"]), None).unwrap();
        assert!(cfg.params.eta_tied);
        assert!(resolve(&cli(&["table", "--errors", "2"]), None).is_err());
    }

    #[test]
    fn seed_from_environment() {
        let c = cli(&["converge", "--seed", "5"]);
        assert_eq!(resolve(&c, None).unwrap().seed, 5);
        assert_eq!(resolve(&c, Some("77")).unwrap().seed, 77);
        assert!(resolve(&c, Some("x")).is_err());
    }

    #[test]
    fn levels_set_segments() {
        let cfg = resolve(&cli(&["repeater", "--levels", "3", "--group", "3"]), None).unwrap();
        assert_eq!(cfg.params.segments, 27);
        assert!(resolve(&cli(&["repeater", "--levels", "3", "--segments", "4"]), None).is_err());
    }
}
