//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Keys are case-sensitive. A key
//! is either one of the run keys below or a parameter of the selected model;
//! anything else is rejected with its line number.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use epdm_core::models::Model;
use epdm_core::Parameters;
use thiserror::Error;

/// Keys that configure the run rather than the model.
pub const RUN_KEYS: &[&str] = &[
    "model",
    "seed",
    "max_reactions",
    "max_time",
    "sample_interval",
    "out",
    "engine",
    "sweep",
    "replicates",
    "timeout",
    "oracle_seed",
    "draws",
    "alpha",
    "max_universe",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("no stop condition: set max_reactions and/or max_time")]
    NoStopCondition,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Epdm,
    Dm,
}

impl EngineChoice {
    pub fn name(self) -> &'static str {
        match self {
            EngineChoice::Epdm => "epdm",
            EngineChoice::Dm => "dm",
        }
    }
}

impl FromStr for EngineChoice {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "epdm" => Ok(EngineChoice::Epdm),
            "dm" => Ok(EngineChoice::Dm),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: String,
    /// Model parameters, passed through to the rule set unchanged.
    pub params: Parameters,
    pub seed: u64,
    pub max_reactions: Option<u64>,
    pub max_time: Option<f64>,
    /// Spacing of intermediate trajectory snapshots.
    pub sample_interval: Option<f64>,
    pub out: Option<PathBuf>,
    /// Engines compared by `bench`, in order.
    pub engines: Vec<EngineChoice>,
    /// Values of the model's `N` parameter swept by `bench`.
    pub sweep: Vec<u64>,
    pub replicates: Option<u64>,
    /// Per-cell wall-clock limit in seconds for `bench`.
    pub timeout: Option<f64>,
    pub oracle_seed: Option<u64>,
    /// Frozen-state selection draws for `validate`.
    pub draws: u64,
    /// Significance threshold for `validate`.
    pub alpha: f64,
    /// Largest universe `validate` will enumerate.
    pub max_universe: u64,
}

impl RunConfig {
    pub fn build_model(&self) -> Result<Model, ConfigError> {
        Model::from_params(&self.model, &self.params).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Model for one sweep cell: the configured parameters with `N` replaced.
    pub fn build_model_with_n(&self, n: u64) -> Result<Model, ConfigError> {
        let mut params = self.params.clone();
        params.insert("N".to_string(), n.to_string());
        Model::from_params(&self.model, &params).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::Syntax { line, message: format!("{key} = {value:?} is not a valid value") })
}

fn parse_time(line: usize, key: &str, value: &str, allow_zero: bool) -> Result<f64, ConfigError> {
    let t: f64 = parse_value(line, key, value)?;
    let ok = t.is_finite() && if allow_zero { t >= 0.0 } else { t > 0.0 };
    if !ok {
        let bound = if allow_zero { "a finite nonnegative" } else { "a finite positive" };
        return Err(ConfigError::Syntax { line, message: format!("{key} must be {bound} number, got {value:?}") });
    }
    Ok(t)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut model = None;
    let mut model_params: Vec<(usize, String, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut cfg = RunConfig {
        model: String::new(),
        params: Parameters::new(),
        seed: 0,
        max_reactions: None,
        max_time: None,
        sample_interval: None,
        out: None,
        engines: vec![EngineChoice::Epdm],
        sweep: Vec::new(),
        replicates: None,
        timeout: None,
        oracle_seed: None,
        draws: 100_000,
        alpha: 0.01,
        max_universe: 10_000,
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, got {content:?}") });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, message: "empty key".to_string() });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Syntax { line, message: format!("duplicate key {key:?}") });
        }
        match key {
            "model" => model = Some((line, value.to_string())),
            "seed" => cfg.seed = parse_value(line, key, value)?,
            "max_reactions" => cfg.max_reactions = Some(parse_value(line, key, value)?),
            "max_time" => cfg.max_time = Some(parse_time(line, key, value, true)?),
            "sample_interval" => cfg.sample_interval = Some(parse_time(line, key, value, false)?),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "engine" => {
                let engines: Result<Vec<EngineChoice>, ()> = match value {
                    "both" => Ok(vec![EngineChoice::Epdm, EngineChoice::Dm]),
                    list => list.split(',').map(|s| s.trim().parse()).collect(),
                };
                cfg.engines = engines.map_err(|_| ConfigError::Syntax {
                    line,
                    message: format!("engine must be epdm, dm, both or a comma list, got {value:?}"),
                })?;
            }
            "sweep" => {
                cfg.sweep = value
                    .split(',')
                    .map(|s| parse_value::<u64>(line, key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "replicates" => {
                let r: u64 = parse_value(line, key, value)?;
                if r == 0 {
                    return Err(ConfigError::Syntax { line, message: "replicates must be at least 1".to_string() });
                }
                cfg.replicates = Some(r);
            }
            "timeout" => cfg.timeout = Some(parse_time(line, key, value, false)?),
            "oracle_seed" => cfg.oracle_seed = Some(parse_value(line, key, value)?),
            "draws" => cfg.draws = parse_value(line, key, value)?,
            "alpha" => {
                let a: f64 = parse_value(line, key, value)?;
                if !(a > 0.0 && a < 1.0) {
                    return Err(ConfigError::Syntax { line, message: format!("alpha must lie in (0, 1), got {value}") });
                }
                cfg.alpha = a;
            }
            "max_universe" => cfg.max_universe = parse_value(line, key, value)?,
            _ => model_params.push((line, key.to_string(), value.to_string())),
        }
    }

    if cfg.max_reactions.is_none() && cfg.max_time.is_none() {
        return Err(ConfigError::NoStopCondition);
    }
    let (model_line, name) = model.ok_or(ConfigError::Missing("model"))?;
    let keys = Model::parameter_keys(&name).ok_or_else(|| ConfigError::Syntax {
        line: model_line,
        message: format!("unknown model {name:?}; expected one of {}", Model::NAMES.join(", ")),
    })?;
    for (line, key, value) in model_params {
        if !keys.contains(&key.as_str()) {
            return Err(ConfigError::Syntax { line, message: format!("unknown key {key:?}") });
        }
        cfg.params.insert(key, value);
    }
    cfg.model = name;
    // surface bad parameter values at parse time
    cfg.build_model()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colliding_example() {
        let cfg = parse_config("model = colliding\nN = 10\nk = 0.5\nn0 = 50\nseed = 1\nmax_reactions = 5000").unwrap();
        assert_eq!(cfg.model, "colliding");
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.max_reactions, Some(5000));
        assert_eq!(cfg.max_time, None);
        assert_eq!(cfg.params.get("N").map(String::as_str), Some("10"));
        assert_eq!(cfg.build_model().unwrap().initial_state().len(), 10);
    }

    #[test]
    fn negative_reaction_limit_is_rejected() {
        assert!(matches!(
            parse_config("max_reactions = -1"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn empty_file_has_no_stop_condition() {
        assert_eq!(parse_config(""), Err(ConfigError::NoStopCondition));
        assert_eq!(parse_config("# nothing\n\n"), Err(ConfigError::NoStopCondition));
    }

    #[test]
    fn model_is_required() {
        assert_eq!(parse_config("max_time = 1"), Err(ConfigError::Missing("model")));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = parse_config("model = colliding\n\nmax_time = 2\nOmega = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 4, .. }), "{err}");
        let err = parse_config("model = colliding\nmax_time = 2\nfrobnicate = 1").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }));
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("  model=colored # inline\n# N = 99\nN=4\nOmega = 7\n\tmax_time = 2.5  \n").unwrap();
        assert_eq!(cfg.params.get("N").map(String::as_str), Some("4"));
        assert_eq!(cfg.max_time, Some(2.5));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_config("model colliding"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config("max_time = 1\nmax_time = 2"), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!(parse_config("max_time = nan"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(parse_config("max_time = 1\nsample_interval = 0"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(parse_config("max_time = 1\nmodel = nope"), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!(parse_config("max_time = 1\nmodel = colliding\nN = x"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn bench_and_validate_keys() {
        let cfg = parse_config(
            "model = colliding\nmax_reactions = 10\nengine = both\nsweep = 50, 100,200\nreplicates = 3\ntimeout = 1.5\n\
             oracle_seed = 9\ndraws = 10\nalpha = 0.05",
        )
        .unwrap();
        assert_eq!(cfg.engines, vec![EngineChoice::Epdm, EngineChoice::Dm]);
        assert_eq!(cfg.sweep, vec![50, 100, 200]);
        assert_eq!(cfg.replicates, Some(3));
        assert_eq!(cfg.timeout, Some(1.5));
        assert_eq!(cfg.oracle_seed, Some(9));
        assert_eq!((cfg.draws, cfg.alpha), (10, 0.05));
        assert!(parse_config("model = colliding\nmax_time = 1\nengine = gpu").is_err());
        assert!(parse_config("model = colliding\nmax_time = 1\nreplicates = 0").is_err());
    }
}
