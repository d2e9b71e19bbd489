use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use epdm_core::{Engine, RuleSet, Step};

use crate::config::{ConfigError, RunConfig};
use crate::error::CliError;
use crate::trajectory::{self, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxReactions,
    MaxTime,
    Exhausted,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::MaxReactions => "max_reactions",
            StopReason::MaxTime => "max_time",
            StopReason::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub seed: u64,
    pub reactions: u64,
    pub final_time: f64,
    pub final_propensity: f64,
    pub live_species: usize,
    pub snapshots: usize,
    pub stop: StopReason,
    pub wall_seconds: f64,
}

fn snapshot<R: RuleSet>(engine: &Engine<R>) -> Snapshot {
    Snapshot::new(engine.time(), engine.snapshot().into_iter().map(|(k, n)| (k.as_str().to_string(), n)))
}

/// Runs `engine` to the configured stop condition, writing the initial
/// state, a snapshot at every multiple of the sampling interval and the
/// final state. The final state is skipped when it repeats the last row.
pub fn simulate_engine<R: RuleSet, W: Write>(
    engine: &mut Engine<R>,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<SimulationSummary, CliError> {
    let io_err = |e| CliError::io("<trajectory>", e);
    let start = Instant::now();
    let max_time = cfg.max_time.unwrap_or(f64::INFINITY);
    let max_reactions = cfg.max_reactions.unwrap_or(u64::MAX);
    let grid = |k: u64| cfg.sample_interval.map(|dt| k as f64 * dt).unwrap_or(f64::INFINITY);

    writeln!(out, "{}", trajectory::HEADER).map_err(io_err)?;
    let mut last = snapshot(engine);
    trajectory::write_snapshot(out, &last).map_err(io_err)?;
    let mut written = 1;
    let mut k = 1;
    while grid(k) <= engine.time() {
        k += 1;
    }

    let mut reactions = 0u64;
    let stop = loop {
        if reactions >= max_reactions {
            break StopReason::MaxReactions;
        }
        let horizon = grid(k).min(max_time);
        match engine.step_until(horizon)? {
            Step::Fired(_) => reactions += 1,
            Step::Exhausted => break StopReason::Exhausted,
            Step::HorizonReached if engine.time() >= max_time => break StopReason::MaxTime,
            Step::HorizonReached => {
                last = snapshot(engine);
                trajectory::write_snapshot(out, &last).map_err(io_err)?;
                written += 1;
                k += 1;
            }
        }
    };

    let fin = snapshot(engine);
    if fin != last {
        trajectory::write_snapshot(out, &fin).map_err(io_err)?;
        written += 1;
    }
    out.flush().map_err(io_err)?;
    Ok(SimulationSummary {
        seed: engine.seed(),
        reactions,
        final_time: engine.time(),
        final_propensity: engine.total_propensity(),
        live_species: engine.live_species(),
        snapshots: written,
        stop,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

pub fn write_meta(path: &Path, cfg: &RunConfig, summary: &SimulationSummary) -> Result<(), CliError> {
    let mut text = format!("model = {}\n", cfg.model);
    for (k, v) in &cfg.params {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text.push_str(&format!(
        "seed = {}\nreactions = {}\nfinal_time = {}\nfinal_propensity = {}\nlive_species = {}\nsnapshots = {}\n\
         stop = {}\nwall_seconds = {}\n",
        summary.seed,
        summary.reactions,
        summary.final_time,
        summary.final_propensity,
        summary.live_species,
        summary.snapshots,
        summary.stop.name(),
        summary.wall_seconds,
    ));
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `simulate` subcommand: trajectory CSV at `out` and metadata at `out.meta`.
pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<SimulationSummary, CliError> {
    let model = cfg.build_model()?;
    let initial = model.initial_state();
    let mut engine = Engine::new(model, &initial, cfg.seed)?;
    if cfg.max_reactions.is_none() && cfg.max_time.is_none() {
        return Err(ConfigError::NoStopCondition.into());
    }
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut writer = BufWriter::new(file);
    let summary = simulate_engine(&mut engine, cfg, &mut writer).map_err(|e| match e {
        CliError::Io { source, .. } => CliError::io(out, source),
        other => other,
    })?;
    write_meta(&meta_path(out), cfg, &summary)?;
    Ok(summary)
}
