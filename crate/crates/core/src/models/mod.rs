//! Built-in rule sets.

mod birth_death;
mod colliding;
mod colored;

use std::str::FromStr;

pub use birth_death::BirthDeathDimer;
pub use colliding::CollidingParticles;
pub use colored::ColoredParticles;

use crate::reaction::ReactionSpec;
use crate::rules::{Parameters, RuleError, RuleSet};
use crate::specie::SpecieId;

/// A built-in model selected by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Colliding(CollidingParticles),
    Colored(ColoredParticles),
    BirthDeathDimer(BirthDeathDimer),
}

impl Model {
    pub const NAMES: &'static [&'static str] = &["colliding", "colored", "birth_death_dimer"];

    /// Parameter keys understood by the model called `name`.
    pub fn parameter_keys(name: &str) -> Option<&'static [&'static str]> {
        match name {
            "colliding" => Some(CollidingParticles::KEYS),
            "colored" => Some(ColoredParticles::KEYS),
            "birth_death_dimer" => Some(BirthDeathDimer::KEYS),
            _ => None,
        }
    }

    pub fn from_params(name: &str, params: &Parameters) -> Result<Self, RuleError> {
        let keys = Self::parameter_keys(name).ok_or_else(|| RuleError::Parameter(format!("unknown model {name:?}")))?;
        if let Some(extra) = params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(RuleError::Parameter(format!("model {name} has no parameter {extra:?}")));
        }
        Ok(match name {
            "colliding" => Model::Colliding(CollidingParticles::from_params(params)?),
            "colored" => Model::Colored(ColoredParticles::from_params(params)?),
            _ => Model::BirthDeathDimer(BirthDeathDimer::from_params(params)?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Colliding(_) => "colliding",
            Model::Colored(_) => "colored",
            Model::BirthDeathDimer(_) => "birth_death_dimer",
        }
    }

    pub fn initial_state(&self) -> Vec<(SpecieId, u64)> {
        match self {
            Model::Colliding(m) => m.initial_state(),
            Model::Colored(m) => m.initial_state(),
            Model::BirthDeathDimer(m) => m.initial_state(),
        }
    }

    /// Number of species that can ever exist.
    pub fn universe_size(&self) -> u64 {
        match self {
            Model::Colliding(m) => m.species,
            Model::Colored(m) => m.universe_size(),
            Model::BirthDeathDimer(_) => 2,
        }
    }

    pub fn universe(&self) -> Vec<SpecieId> {
        match self {
            Model::Colliding(m) => m.universe(),
            Model::Colored(m) => m.universe(),
            Model::BirthDeathDimer(m) => m.universe(),
        }
    }
}

impl RuleSet for Model {
    fn generate(&self, a: &SpecieId, b: &SpecieId) -> Result<Vec<ReactionSpec>, RuleError> {
        match self {
            Model::Colliding(m) => m.generate(a, b),
            Model::Colored(m) => m.generate(a, b),
            Model::BirthDeathDimer(m) => m.generate(a, b),
        }
    }

    fn parameters(&self) -> Parameters {
        match self {
            Model::Colliding(m) => m.parameters(),
            Model::Colored(m) => m.parameters(),
            Model::BirthDeathDimer(m) => m.parameters(),
        }
    }
}

fn param<T: FromStr>(params: &Parameters, key: &str, default: T) -> Result<T, RuleError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| RuleError::Parameter(format!("{key} = {v:?} is not a valid value"))),
    }
}

/// Decimal index without sign or leading `+`.
fn parse_index(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}
