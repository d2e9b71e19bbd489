//! Statistical comparison of EPDM against the direct-method oracle.
//!
//! Both engines run the same number of independent replicates to the
//! configured horizon; each specie's count distribution at the horizon is
//! compared with a chi-square homogeneity test, Bonferroni-corrected over
//! species. Separately, reaction selection in a frozen state is compared
//! against the oracle's analytic `a_μ / a`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use epdm_core::dm::{DmState, StaticNetwork};
use epdm_core::stats::{self, TestResult};
use epdm_core::{rng, ChannelKey, Engine, RuleSet, SpecieId, Step};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::error::CliError;

/// Replicate index reserved for the frozen-state selection draws.
const SELECTION_STREAM: u64 = u64::MAX;
/// Offset mixed into the EPDM seed when no oracle seed is configured.
const ORACLE_STREAM: u64 = 0x6f72_6163_6c65;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecieComparison {
    pub specie: SpecieId,
    pub epdm_mean: f64,
    pub dm_mean: f64,
    pub test: TestResult,
    /// `min(1, p · number of species)`.
    pub adjusted_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionCheck {
    pub state: BTreeMap<SpecieId, u64>,
    pub channels: usize,
    pub draws: u64,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub model: String,
    pub horizon: f64,
    pub replicates: u64,
    pub seed: u64,
    pub oracle_seed: u64,
    pub alpha: f64,
    pub species: Vec<SpecieComparison>,
    /// `None` when the frozen state has no reaction with positive propensity.
    pub selection: Option<SelectionCheck>,
}

impl ValidateReport {
    pub fn marginals_pass(&self) -> bool {
        self.species.iter().all(|s| s.adjusted_p > self.alpha)
    }

    pub fn selection_pass(&self) -> bool {
        self.selection.as_ref().is_none_or(|s| s.test.p_value > self.alpha)
    }

    pub fn passed(&self) -> bool {
        self.marginals_pass() && self.selection_pass()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(s, "model = {}", self.model).unwrap();
        writeln!(s, "horizon = {}", self.horizon).unwrap();
        writeln!(s, "replicates = {}", self.replicates).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "oracle_seed = {}", self.oracle_seed).unwrap();
        writeln!(s, "alpha = {}", self.alpha).unwrap();
        writeln!(s, "specie,epdm_mean,dm_mean,chi2,df,p,p_bonferroni,verdict").unwrap();
        for c in &self.species {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                c.specie,
                c.epdm_mean,
                c.dm_mean,
                c.test.statistic,
                c.test.df,
                c.test.p_value,
                c.adjusted_p,
                verdict(c.adjusted_p > self.alpha)
            )
            .unwrap();
        }
        match &self.selection {
            Some(sel) => writeln!(
                s,
                "selection: channels = {}, draws = {}, chi2 = {}, df = {}, p = {}, {}",
                sel.channels,
                sel.draws,
                sel.test.statistic,
                sel.test.df,
                sel.test.p_value,
                verdict(sel.test.p_value > self.alpha)
            )
            .unwrap(),
            None => writeln!(s, "selection: skipped, frozen state has zero propensity").unwrap(),
        }
        writeln!(s, "result = {}", verdict(self.passed())).unwrap();
        s
    }
}

fn counts_at(snapshot: &BTreeMap<SpecieId, u64>, net: &StaticNetwork) -> Result<Vec<u64>, CliError> {
    let mut counts = vec![0; net.species().len()];
    for (s, &n) in snapshot {
        let i = net.index_of(s).ok_or_else(|| {
            CliError::ValidationFailed(format!("EPDM produced {s}, which is outside the universe"))
        })?;
        counts[i] = n;
    }
    Ok(counts)
}

fn histogram(values: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut h = Vec::new();
    for v in values {
        let v = v as usize;
        if h.len() <= v {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

/// Chi-square goodness of fit of EPDM's selection frequencies in `state`
/// against the oracle's propensities.
pub fn selection_check<R: RuleSet + Clone>(
    rules: &R,
    net: &StaticNetwork,
    state: &BTreeMap<SpecieId, u64>,
    draws: u64,
    seed: u64,
) -> Result<Option<SelectionCheck>, CliError> {
    let initial: Vec<(SpecieId, u64)> = state.iter().map(|(k, v)| (k.clone(), *v)).collect();
    let engine = Engine::new(rules.clone(), &initial, seed)?;
    let counts = counts_at(state, net)?;
    let mut expected: BTreeMap<ChannelKey, f64> = BTreeMap::new();
    for (ch, a) in net.channels().iter().zip(net.propensities(&counts)) {
        if a > 0.0 {
            *expected.entry(ch.key.clone()).or_default() += a;
        }
    }
    if expected.is_empty() {
        return Ok(None);
    }
    let mut observed: BTreeMap<ChannelKey, u64> = expected.keys().map(|k| (k.clone(), 0)).collect();
    let mut r = rng::seeded(seed);
    for _ in 0..draws {
        let sel = engine.sample_reaction(rng::closed_open_unit(&mut r))?;
        let key = engine.channel_of(sel)?;
        match observed.get_mut(&key) {
            Some(n) => *n += 1,
            None => {
                return Err(CliError::ValidationFailed(format!(
                    "EPDM selected {key:?}, which has zero propensity in the oracle"
                )))
            }
        }
    }
    let obs: Vec<u64> = observed.values().copied().collect();
    let probs: Vec<f64> = expected.values().copied().collect();
    Ok(Some(SelectionCheck {
        state: state.clone(),
        channels: expected.len(),
        draws,
        test: stats::goodness_of_fit(&obs, &probs),
    }))
}

pub fn validate(cfg: &RunConfig) -> Result<ValidateReport, CliError> {
    let horizon = cfg.max_time.ok_or(ConfigError::Missing("max_time"))?;
    let replicates = cfg.replicates.unwrap_or(10_000);
    let oracle_seed = cfg.oracle_seed.unwrap_or_else(|| rng::derive_seed(cfg.seed, ORACLE_STREAM));
    if oracle_seed == cfg.seed {
        return Err(ConfigError::Invalid(format!(
            "oracle_seed equals seed ({}); the two engines need independent streams",
            cfg.seed
        ))
        .into());
    }
    let model = cfg.build_model()?;
    if model.universe_size() > cfg.max_universe {
        return Err(ConfigError::Invalid(format!(
            "universe of {} species is too large to enumerate (max_universe = {})",
            model.universe_size(),
            cfg.max_universe
        ))
        .into());
    }
    let universe = model.universe();
    let net = StaticNetwork::enumerate(&model, &universe)?;
    let initial = model.initial_state();

    let epdm: Vec<Vec<u64>> = (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<Vec<u64>, CliError> {
            let mut engine = Engine::new(model.clone(), &initial, rng::derive_seed(cfg.seed, r))?;
            while !matches!(engine.step_until(horizon)?, Step::HorizonReached | Step::Exhausted) {}
            counts_at(&engine.snapshot(), &net)
        })
        .collect::<Result<_, _>>()?;
    let dm: Vec<Vec<u64>> = (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<Vec<u64>, CliError> {
            let mut state = DmState::new(&net, &initial, rng::derive_seed(oracle_seed, r))?;
            while !matches!(state.step_until(&net, horizon)?, Step::HorizonReached | Step::Exhausted) {}
            Ok(state.counts().to_vec())
        })
        .collect::<Result<_, _>>()?;

    let tests = net.species().len().max(1) as f64;
    let species = net
        .species()
        .iter()
        .enumerate()
        .map(|(i, specie)| {
            let a = histogram(epdm.iter().map(|c| c[i]));
            let b = histogram(dm.iter().map(|c| c[i]));
            let test = stats::homogeneity(&a, &b);
            let mean = |rows: &[Vec<u64>]| rows.iter().map(|c| c[i] as f64).sum::<f64>() / rows.len() as f64;
            SpecieComparison {
                specie: specie.clone(),
                epdm_mean: mean(&epdm),
                dm_mean: mean(&dm),
                test,
                adjusted_p: (test.p_value * tests).min(1.0),
            }
        })
        .collect();

    // Frozen state: the first EPDM replicate at the horizon, or the initial
    // state if that one has nothing left to fire.
    let first: BTreeMap<SpecieId, u64> = net
        .species()
        .iter()
        .zip(epdm.first().map(Vec::as_slice).unwrap_or(&[]))
        .filter(|(_, n)| **n > 0)
        .map(|(s, n)| (s.clone(), *n))
        .collect();
    let selection_seed = rng::derive_seed(cfg.seed, SELECTION_STREAM);
    let mut selection = selection_check(&model, &net, &first, cfg.draws, selection_seed)?;
    if selection.is_none() {
        let start: BTreeMap<SpecieId, u64> = initial.iter().cloned().collect();
        selection = selection_check(&model, &net, &start, cfg.draws, selection_seed)?;
    }

    Ok(ValidateReport {
        model: cfg.model.clone(),
        horizon,
        replicates,
        seed: cfg.seed,
        oracle_seed,
        alpha: cfg.alpha,
        species,
        selection,
    })
}

/// `validate` subcommand: writes the report to `out` (or returns it only)
/// and fails with a validation error if any test falls below `alpha`.
pub fn run_validate(cfg: &RunConfig, out: Option<&Path>) -> Result<ValidateReport, CliError> {
    let report = validate(cfg)?;
    if let Some(path) = out {
        std::fs::write(path, report.to_text()).map_err(|e| CliError::io(path, e))?;
    }
    if !report.passed() {
        let failing: Vec<String> = report
            .species
            .iter()
            .filter(|s| s.adjusted_p <= report.alpha)
            .map(|s| format!("{} (p = {})", s.specie, s.adjusted_p))
            .chain(
                report
                    .selection
                    .iter()
                    .filter(|s| s.test.p_value <= report.alpha)
                    .map(|s| format!("selection (p = {})", s.test.p_value)),
            )
            .collect();
        return Err(CliError::ValidationFailed(failing.join(", ")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn identical_seeds_are_refused() {
        let cfg = parse_config("model = birth_death_dimer\nmax_time = 1\nseed = 4\noracle_seed = 4").unwrap();
        assert!(matches!(validate(&cfg), Err(CliError::Config(ConfigError::Invalid(_)))));
    }

    #[test]
    fn large_universe_is_refused() {
        let cfg = parse_config("model = colored\nN = 100\nOmega = 1000\nmax_time = 1").unwrap();
        let err = validate(&cfg).unwrap_err();
        assert!(err.to_string().contains("too large"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn needs_horizon() {
        let cfg = parse_config("model = birth_death_dimer\nmax_reactions = 10").unwrap();
        assert!(matches!(validate(&cfg), Err(CliError::Config(ConfigError::Missing("max_time")))));
    }

    #[test]
    fn small_birth_death_run_passes() {
        let cfg = parse_config("model = birth_death_dimer\nmax_time = 2\nreplicates = 500\ndraws = 2000\nseed = 5").unwrap();
        let report = run_validate(&cfg, None).unwrap();
        assert_eq!(report.species.len(), 2);
        assert!(report.selection.is_some());
        assert!(report.to_text().ends_with("result = PASS\n"));
    }

    #[test]
    fn histogram_counts_values() {
        assert_eq!(histogram([0, 2, 2, 5].into_iter()), vec![1, 0, 2, 0, 0, 1]);
    }
}
