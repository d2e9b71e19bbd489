//! Benchmark sweeps: wall-clock time per reaction against the number of
//! species.
//!
//! Cells run one after another so that timings do not compete for cores.
//! Only the reaction loop is timed; building the engine or the static
//! network is excluded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use epdm_core::dm::{DmState, StaticNetwork};
use epdm_core::models::Model;
use epdm_core::{rng, stats, Engine, Step};

use crate::config::{ConfigError, EngineChoice, RunConfig};
use crate::error::CliError;

pub const HEADER: &str = "engine,N,M,replicate,reactions,sec_per_reaction";

/// How often the timeout is checked inside the timed loop.
const TIMEOUT_CHECK_EVERY: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub engine: EngineChoice,
    pub n: u64,
    /// Reactions known to the engine at start: tracked ones for EPDM, the
    /// enumerated network for DM.
    pub m: u64,
    pub replicate: u64,
    pub reactions: u64,
    /// `None` when the cell timed out or executed no reaction.
    pub sec_per_reaction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub engine: EngineChoice,
    pub n: u64,
    pub m: u64,
    pub reactions: f64,
    /// Mean over replicates with a measurement; `None` if there were none.
    pub sec_per_reaction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub means: Vec<MeanRow>,
    /// Log-log slope of mean time per reaction against N, per engine;
    /// `None` with fewer than two measured N.
    pub slopes: Vec<(EngineChoice, Option<f64>)>,
}

fn format_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "NA".to_string())
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{HEADER}\n");
        for r in &self.rows {
            let t = format_opt(r.sec_per_reaction);
            writeln!(s, "{},{},{},{},{},{}", r.engine.name(), r.n, r.m, r.replicate, r.reactions, t).unwrap();
        }
        for r in &self.means {
            let t = format_opt(r.sec_per_reaction);
            writeln!(s, "{},{},{},mean,{},{}", r.engine.name(), r.n, r.m, r.reactions, t).unwrap();
        }
        s
    }

    pub fn slopes_text(&self) -> String {
        let mut s = String::new();
        for (engine, slope) in &self.slopes {
            let v = slope.map(|x| x.to_string()).unwrap_or_else(|| "undefined".to_string());
            writeln!(s, "{} = {}", engine.name(), v).unwrap();
        }
        s
    }

    pub fn slope(&self, engine: EngineChoice) -> Option<f64> {
        self.slopes.iter().find(|(e, _)| *e == engine).and_then(|(_, s)| *s)
    }
}

struct Timed {
    m: u64,
    reactions: u64,
    elapsed: Duration,
    timed_out: bool,
}

fn time_epdm(model: Model, seed: u64, max_reactions: u64, timeout: Option<Duration>) -> Result<Timed, CliError> {
    let initial = model.initial_state();
    let mut engine = Engine::new(model, &initial, seed)?;
    let m = engine.tracked_reactions() as u64;
    let start = Instant::now();
    let mut reactions = 0;
    let mut timed_out = false;
    while reactions < max_reactions {
        match engine.step()? {
            Step::Fired(_) => reactions += 1,
            _ => break,
        }
        if reactions % TIMEOUT_CHECK_EVERY == 0 && timeout.is_some_and(|t| start.elapsed() > t) {
            timed_out = true;
            break;
        }
    }
    Ok(Timed { m, reactions, elapsed: start.elapsed(), timed_out })
}

fn time_dm(
    model: Model,
    seed: u64,
    max_reactions: u64,
    timeout: Option<Duration>,
    max_universe: u64,
) -> Result<Timed, CliError> {
    if model.universe_size() > max_universe {
        return Err(ConfigError::Invalid(format!(
            "dm engine would enumerate {} species, above max_universe = {max_universe}",
            model.universe_size()
        ))
        .into());
    }
    let net = StaticNetwork::enumerate(&model, &model.universe())?;
    let mut state = DmState::new(&net, &model.initial_state(), seed)?;
    let start = Instant::now();
    let mut reactions = 0;
    let mut timed_out = false;
    while reactions < max_reactions {
        match state.step(&net)? {
            Step::Fired(_) => reactions += 1,
            _ => break,
        }
        if reactions % TIMEOUT_CHECK_EVERY == 0 && timeout.is_some_and(|t| start.elapsed() > t) {
            timed_out = true;
            break;
        }
    }
    Ok(Timed { m: net.len() as u64, reactions, elapsed: start.elapsed(), timed_out })
}

/// Runs every (engine, N, replicate) cell. After a timeout the remaining
/// cells of that engine at the same or larger N are recorded as missing
/// without running.
pub fn bench(cfg: &RunConfig) -> Result<BenchReport, CliError> {
    let max_reactions = cfg.max_reactions.ok_or(ConfigError::Missing("max_reactions"))?;
    let replicates = cfg.replicates.unwrap_or(10);
    let timeout = cfg.timeout.map(Duration::from_secs_f64);
    let sweep: Vec<u64> = if cfg.sweep.is_empty() {
        let n = cfg.params.get("N").ok_or(ConfigError::Missing("sweep"))?;
        vec![n.parse().map_err(|_| ConfigError::Invalid(format!("N = {n:?} is not a count")))?]
    } else {
        cfg.sweep.clone()
    };

    let mut rows = Vec::new();
    let mut means = Vec::new();
    let mut slopes = Vec::new();
    for &engine in &cfg.engines {
        let mut gave_up = false;
        let mut points = Vec::new();
        for &n in &sweep {
            let model = cfg.build_model_with_n(n)?;
            let mut cell_rows = Vec::new();
            let mut m = 0;
            for r in 0..replicates {
                if gave_up {
                    cell_rows.push(BenchRow { engine, n, m, replicate: r, reactions: 0, sec_per_reaction: None });
                    continue;
                }
                let seed = rng::derive_seed(rng::derive_seed(cfg.seed, n), r);
                let timed = match engine {
                    EngineChoice::Epdm => time_epdm(model.clone(), seed, max_reactions, timeout)?,
                    EngineChoice::Dm => time_dm(model.clone(), seed, max_reactions, timeout, cfg.max_universe)?,
                };
                m = timed.m;
                gave_up = timed.timed_out;
                let sec_per_reaction = (!timed.timed_out && timed.reactions > 0)
                    .then(|| timed.elapsed.as_secs_f64() / timed.reactions as f64)
                    .filter(|t| *t > 0.0);
                cell_rows.push(BenchRow { engine, n, m, replicate: r, reactions: timed.reactions, sec_per_reaction });
            }
            for row in &mut cell_rows {
                row.m = m;
            }
            let measured: Vec<f64> = cell_rows.iter().filter_map(|r| r.sec_per_reaction).collect();
            let mean_time = (!measured.is_empty()).then(|| stats::mean(&measured));
            let reactions = cell_rows.iter().map(|r| r.reactions as f64).sum::<f64>() / cell_rows.len() as f64;
            if let Some(t) = mean_time {
                points.push((n as f64, t));
            }
            means.push(MeanRow { engine, n, m, reactions, sec_per_reaction: mean_time });
            rows.extend(cell_rows);
        }
        slopes.push((engine, stats::log_log_slope(&points)));
    }
    Ok(BenchReport { rows, means, slopes })
}

pub fn slopes_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".slopes");
    PathBuf::from(name)
}

/// `bench` subcommand: rows and per-N means at `out`, slopes at `out.slopes`.
pub fn run_bench(cfg: &RunConfig, out: &Path) -> Result<BenchReport, CliError> {
    let report = bench(cfg)?;
    std::fs::write(out, report.to_csv()).map_err(|e| CliError::io(out, e))?;
    let slopes = slopes_path(out);
    std::fs::write(&slopes, report.slopes_text()).map_err(|e| CliError::io(&slopes, e))?;
    Ok(report)
}
